#ifndef ASCTK_JSON_IO_HPP
#define ASCTK_JSON_IO_HPP

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "asctk/clustering.hpp"
#include "asctk/metrics.hpp"
#include "asctk/mlo.hpp"
#include "asctk/omp.hpp"
#include "asctk/scattering.hpp"

namespace asctk {

struct SceneDescription {
  RadarGrid grid;
  std::vector<AscParameterSet> scatterers;
};

// Scene JSON keys: {"grid": {"fc_hz", "f_hz", "phi_rad", "v_mps"},
// "scatterers": [{"A","x","y","alpha","L","phi_bar","gamma"}, ...]}.
nlohmann::json scene_to_json(const SceneDescription& scene);
SceneDescription scene_from_json(const nlohmann::json& j);
SceneDescription load_scene(const std::string& path);
void save_scene(const std::string& path, const SceneDescription& scene);

// Extraction JSON: {"scatterers": [... with "coeff_re"/"coeff_im"],
// "residual_trace", "termination"} plus the grid for downstream commands.
nlohmann::json extraction_to_json(const ExtractionResult& result, const RadarGrid& grid);
struct LoadedExtraction {
  std::vector<AscParameterSet> scatterers;
  RadarGrid grid;
};
LoadedExtraction extraction_from_json(const nlohmann::json& j);
LoadedExtraction load_extraction(const std::string& path);

// Partition JSON: {"mode", "k", "components": [{"label", "members", "centroid"}]}.
nlohmann::json partition_to_json(const AsccPartition& partition);

nlohmann::json metric_report_to_json(const MetricReport& report);

// Readout persistence: weights as NNMX next to a JSON metadata file carrying
// the bias and loss trace.
void save_readout(const std::string& json_path, const std::string& weights_path,
                  const LinearReadout& readout);
LinearReadout load_readout(const std::string& json_path);

// Decomposition report: {"rank", "layers": [{"objective_final", "orth_v",
// "iters", "violation_norm"}...], "telescoping_residual"}.
nlohmann::json decomposition_report_to_json(const MloDecomposition& dec, int rank);

nlohmann::json convergence_report_to_json(const TriFactorLayer& layer);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

} // namespace asctk

#endif
