#include "asctk/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "asctk/dictionary.hpp"
#include "asctk/errors.hpp"
#include "asctk/metrics.hpp"
#include "asctk/nnmx.hpp"

namespace asctk {

using nlohmann::json;

namespace {

class StageTimer {
public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  // order-sensitive digest mix
  std::uint64_t buf[2] = {a, b};
  return fnv1a(buf, sizeof buf);
}

} // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
  validate_config(cfg.solver);
  if (cfg.k_asc < 1) throw InvalidInputError("pipeline: k_asc must be >= 1");
  const RadarGrid& grid = cfg.scene.grid;
  const bool emit = !cfg.out_dir.empty();
  if (emit) std::filesystem::create_directories(cfg.out_dir);
  const auto out_path = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

  RunReport report;

  // stage 1: synthesize the phase history and the reference image
  StageTimer t1;
  const PhaseHistory ph = synthesize_scene(cfg.scene.scatterers, grid);
  const SarImage reference = form_image(ph);
  if (emit) write_nnmx_file(out_path("ph.nnmx"), ph.data);
  report.stages.push_back({"synth", t1.seconds(), digest(ph.data)});

  // stage 2: OMP extraction over the default bin-aligned dictionary
  StageTimer t2;
  const AscDictionary dict = build_dictionary(
      grid, default_dictionary_spec(grid, cfg.dict_nx, cfg.dict_ny, cfg.dict_y_stride));
  const ExtractionResult extraction =
      omp_extract(ph, dict, cfg.max_scatterers, cfg.residual_tol);
  report.extracted_count = extraction.scatterers.size();
  std::vector<AscParameterSet> recovered;
  Eigen::MatrixXd extract_digest_rows(
      static_cast<Eigen::Index>(extraction.scatterers.size()), 9);
  for (std::size_t i = 0; i < extraction.scatterers.size(); ++i) {
    const auto& rec = extraction.scatterers[i];
    recovered.push_back(rec.params);
    extract_digest_rows.row(static_cast<Eigen::Index>(i)) << rec.params.amplitude,
        rec.params.x_pos, rec.params.y_pos, rec.params.alpha, rec.params.length,
        rec.params.phi_bar, rec.params.gamma, rec.coefficient.real(), rec.coefficient.imag();
  }
  if (emit) write_json_file(out_path("ascs.json"), extraction_to_json(extraction, grid));
  report.stages.push_back({"extract", t2.seconds(), digest(extract_digest_rows)});

  // stage 3: cluster into components and reconstruct their images
  StageTimer t3;
  if (recovered.size() < cfg.k_asc && cfg.mode == PartitionMode::Kmeans)
    throw NumericalError("pipeline: extracted fewer scatterers than k_asc");
  AsccPartition partition = cfg.mode == PartitionMode::Kmeans
                                ? kmeans_cluster(recovered, cfg.k_asc, cfg.seed)
                                : table_cluster(recovered);
  partition = reconstruct_components(partition, grid);
  report.component_count = partition.k();
  const std::string partition_dump = partition_to_json(partition).dump();
  if (emit) {
    write_json_file(out_path("ascc.json"), partition_to_json(partition));
    for (const auto& comp : partition.components)
      write_nnmx_file(out_path("component_" + comp.label + ".nnmx"), comp.image->data);
  }
  report.stages.push_back(
      {"cluster", t3.seconds(), fnv1a(partition_dump.data(), partition_dump.size())});

  // stage 4: two-stage decomposition of the image-domain features. Each
  // component is rescaled onto the feasible peel budget of its layer.
  StageTimer t4;
  const NonNegMatrix features = make_nonneg(reference.magnitude());
  MloDecomposition dec;
  dec.first = onmtf_first_layer(features, cfg.rank, cfg.solver);
  Eigen::MatrixXd w = dec.first.w;
  std::uint64_t factors_digest =
      combine(combine(digest(dec.first.u), digest(dec.first.w)), digest(dec.first.v));
  for (const auto& comp : partition.components) {
    ComponentMatrix prepared =
        prepare_component(comp.image->data, cfg.rank, comp.label);
    const double scale = feasible_component_scale(w, prepared.values);
    prepared.values *= scale;
    ConstrainedLayer layer = onmtf_constrained_layer(w, prepared, cfg.solver);
    w = layer.w_next;
    factors_digest = combine(factors_digest, digest(layer.w_next));
    dec.layers.push_back(std::move(layer));
  }
  dec.telescoping_residual = telescoping_residual(dec.first.w, dec.layers);
  report.telescoping_residual = dec.telescoping_residual;
  report.first_stage_error =
      decomposition_error(features.values, dec.first.u, dec.first.w, dec.first.v);
  for (std::size_t i = 0; i < dec.layers.size(); ++i) {
    const auto& layer = dec.layers[i];
    const Eigen::MatrixXd w_in =
        i == 0 ? dec.first.w : dec.layers[i - 1].w_next;
    report.later_stage_errors.push_back(
        decomposition_error(w_in, layer.u, layer.w_next, layer.v));
  }
  if (emit) {
    write_nnmx_file(out_path("U1.nnmx"), dec.first.u);
    write_nnmx_file(out_path("W1.nnmx"), dec.first.w);
    write_nnmx_file(out_path("V1.nnmx"), dec.first.v);
    for (std::size_t i = 0; i < dec.layers.size(); ++i) {
      const std::string tag = "layer" + std::to_string(i + 1);
      write_nnmx_file(out_path(tag + "_U.nnmx"), dec.layers[i].u);
      write_nnmx_file(out_path(tag + "_V.nnmx"), dec.layers[i].v);
      write_nnmx_file(out_path(tag + "_W.nnmx"), dec.layers[i].w_next);
    }
    write_json_file(out_path("decomposition.json"),
                    decomposition_report_to_json(dec, cfg.rank));
  }
  report.stages.push_back({"decompose", t4.seconds(), factors_digest});

  // stage 5: reconstruction fidelity of the component union
  StageTimer t5;
  Eigen::MatrixXcd composite = Eigen::MatrixXcd::Zero(grid.rows(), grid.cols());
  for (const auto& comp : partition.components) composite += comp.image->data;
  const Eigen::MatrixXd recon_mag = composite.cwiseAbs();
  const Eigen::MatrixXd ref_mag = reference.magnitude();
  report.ssim_reconstruction = ssim(ref_mag, recon_mag);
  report.mse_reconstruction = mse(ref_mag, recon_mag);
  if (emit) write_nnmx_file(out_path("reconstruction.nnmx"), composite);
  report.stages.push_back({"eval", t5.seconds(), digest(recon_mag)});

  if (emit) write_json_file(out_path("report.json"), run_report_to_json(report));
  return report;
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig cfg;
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("k_asc")) cfg.k_asc = j.at("k_asc").get<std::size_t>();
  if (j.contains("rank")) cfg.rank = j.at("rank").get<int>();
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "kmeans") cfg.mode = PartitionMode::Kmeans;
    else if (mode == "table") cfg.mode = PartitionMode::Table;
    else throw InvalidInputError("pipeline config: mode must be 'kmeans' or 'table'");
  }
  if (j.contains("scene_path")) cfg.scene = load_scene(j.at("scene_path").get<std::string>());
  else if (j.contains("scene")) cfg.scene = scene_from_json(j.at("scene"));
  else throw InvalidInputError("pipeline config: needs 'scene' or 'scene_path'");
  if (j.contains("dict")) {
    const auto& d = j.at("dict");
    if (d.contains("nx")) cfg.dict_nx = d.at("nx").get<std::size_t>();
    if (d.contains("ny")) cfg.dict_ny = d.at("ny").get<std::size_t>();
    if (d.contains("y_stride")) cfg.dict_y_stride = d.at("y_stride").get<double>();
  }
  if (j.contains("max_scatterers")) cfg.max_scatterers = j.at("max_scatterers").get<std::size_t>();
  if (j.contains("residual_tol")) cfg.residual_tol = j.at("residual_tol").get<double>();
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (s.contains("max_iters")) cfg.solver.max_iters = s.at("max_iters").get<int>();
    if (s.contains("rel_tol")) cfg.solver.rel_tol = s.at("rel_tol").get<double>();
    if (s.contains("epsilon_guard")) cfg.solver.epsilon_guard = s.at("epsilon_guard").get<double>();
  }
  cfg.solver.seed = cfg.seed;
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

json run_report_to_json(const RunReport& report) {
  json stages = json::array();
  for (const auto& s : report.stages)
    stages.push_back(json{{"name", s.name}, {"seconds", s.seconds}, {"digest", s.digest}});
  json later = json::array();
  for (double e : report.later_stage_errors) later.push_back(e);
  return json{{"stages", stages},
              {"extracted_count", report.extracted_count},
              {"component_count", report.component_count},
              {"ssim_reconstruction", report.ssim_reconstruction},
              {"mse_reconstruction", report.mse_reconstruction},
              {"decomposition_errors",
               json{{"first_stage", report.first_stage_error}, {"later_stages", later}}},
              {"telescoping_residual", report.telescoping_residual}};
}

} // namespace asctk
