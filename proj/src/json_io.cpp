#include "asctk/json_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "asctk/errors.hpp"
#include "asctk/nnmx.hpp"

namespace asctk {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  if (!arr.is_array()) throw InvalidInputError("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

json params_to_json(const AscParameterSet& p) {
  return json{{"A", p.amplitude},   {"x", p.x_pos},        {"y", p.y_pos},
              {"alpha", p.alpha},   {"L", p.length},       {"phi_bar", p.phi_bar},
              {"gamma", p.gamma}};
}

AscParameterSet params_from_json(const json& j) {
  AscParameterSet p;
  p.amplitude = j.at("A").get<double>();
  p.x_pos = j.at("x").get<double>();
  p.y_pos = j.at("y").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.length = j.at("L").get<double>();
  p.phi_bar = j.at("phi_bar").get<double>();
  p.gamma = j.at("gamma").get<double>();
  return p;
}

json grid_to_json(const RadarGrid& grid) {
  return json{{"fc_hz", grid.center_frequency},
              {"f_hz", vector_to_json(grid.frequencies)},
              {"phi_rad", vector_to_json(grid.aspects)},
              {"v_mps", grid.velocity}};
}

RadarGrid grid_from_json(const json& j) {
  RadarGrid grid;
  grid.center_frequency = j.at("fc_hz").get<double>();
  grid.frequencies = vector_from_json(j.at("f_hz"));
  grid.aspects = vector_from_json(j.at("phi_rad"));
  grid.velocity = j.at("v_mps").get<double>();
  validate_grid(grid);
  return grid;
}

} // namespace

json scene_to_json(const SceneDescription& scene) {
  json scatterers = json::array();
  for (const auto& p : scene.scatterers) scatterers.push_back(params_to_json(p));
  return json{{"grid", grid_to_json(scene.grid)}, {"scatterers", scatterers}};
}

SceneDescription scene_from_json(const json& j) {
  SceneDescription scene;
  scene.grid = grid_from_json(j.at("grid"));
  for (const auto& s : j.at("scatterers")) scene.scatterers.push_back(params_from_json(s));
  return scene;
}

SceneDescription load_scene(const std::string& path) {
  return scene_from_json(read_json_file(path));
}

void save_scene(const std::string& path, const SceneDescription& scene) {
  write_json_file(path, scene_to_json(scene));
}

json extraction_to_json(const ExtractionResult& result, const RadarGrid& grid) {
  json scatterers = json::array();
  for (const auto& rec : result.scatterers) {
    json s = params_to_json(rec.params);
    s["coeff_re"] = rec.coefficient.real();
    s["coeff_im"] = rec.coefficient.imag();
    scatterers.push_back(std::move(s));
  }
  json trace = json::array();
  for (double e : result.residual_energy) trace.push_back(e);
  return json{{"scatterers", scatterers},
              {"residual_trace", trace},
              {"termination", to_string(result.termination)},
              {"grid", grid_to_json(grid)}};
}

LoadedExtraction extraction_from_json(const json& j) {
  LoadedExtraction out;
  out.grid = grid_from_json(j.at("grid"));
  for (const auto& s : j.at("scatterers")) out.scatterers.push_back(params_from_json(s));
  return out;
}

LoadedExtraction load_extraction(const std::string& path) {
  return extraction_from_json(read_json_file(path));
}

json partition_to_json(const AsccPartition& partition) {
  json components = json::array();
  for (const auto& comp : partition.components) {
    json members = json::array();
    for (std::size_t i : comp.members) members.push_back(i);
    components.push_back(json{{"label", comp.label},
                              {"members", members},
                              {"centroid", vector_to_json(comp.centroid)}});
  }
  return json{{"mode", partition.mode == PartitionMode::Kmeans ? "kmeans" : "table"},
              {"k", partition.k()},
              {"components", components}};
}

void save_readout(const std::string& json_path, const std::string& weights_path,
                  const LinearReadout& readout) {
  write_nnmx_file(weights_path, readout.weights);
  json trace = json::array();
  for (double v : readout.loss_trace) trace.push_back(v);
  write_json_file(json_path, json{{"weights_path", weights_path},
                                  {"bias", vector_to_json(readout.bias)},
                                  {"loss_trace", trace},
                                  {"classes", readout.weights.rows()},
                                  {"feature_dim", readout.weights.cols()}});
}

LinearReadout load_readout(const std::string& json_path) {
  const json j = read_json_file(json_path);
  LinearReadout readout;
  readout.weights = read_nnmx_real(j.at("weights_path").get<std::string>());
  readout.bias = vector_from_json(j.at("bias"));
  for (const auto& v : j.at("loss_trace")) readout.loss_trace.push_back(v.get<double>());
  if (readout.bias.size() != readout.weights.rows())
    throw InvalidInputError("readout metadata does not match its weight matrix");
  return readout;
}

json metric_report_to_json(const MetricReport& report) {
  json params = json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  return json{{"metric", report.metric}, {"value", report.value}, {"params", params}};
}

json decomposition_report_to_json(const MloDecomposition& dec, int rank) {
  json layers = json::array();
  for (const auto& layer : dec.layers) {
    layers.push_back(json{{"objective_final", layer.objective_trace.back()},
                          {"orth_v", layer.orth_v},
                          {"iters", layer.iters},
                          {"violation_norm", layer.violation_norm}});
  }
  return json{{"rank", rank},
              {"layers", layers},
              {"telescoping_residual", dec.telescoping_residual},
              {"first_layer", convergence_report_to_json(dec.first)}};
}

json convergence_report_to_json(const TriFactorLayer& layer) {
  json trace = json::array();
  for (double v : layer.objective_trace) trace.push_back(v);
  return json{{"objective_trace", trace},
              {"orth_u", layer.orth_u},
              {"orth_v", layer.orth_v},
              {"iters", layer.iters},
              {"termination", to_string(layer.termination)}};
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw InvalidInputError("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
  }
}

} // namespace asctk
