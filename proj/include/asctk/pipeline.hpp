#ifndef ASCTK_PIPELINE_HPP
#define ASCTK_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "asctk/clustering.hpp"
#include "asctk/factorization.hpp"
#include "asctk/json_io.hpp"
#include "asctk/mlo.hpp"
#include "asctk/omp.hpp"

namespace asctk {

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t k_asc = 6;
  int rank = 16;
  PartitionMode mode = PartitionMode::Kmeans;
  SceneDescription scene;
  std::size_t dict_nx = 24;
  std::size_t dict_ny = 24;
  double dict_y_stride = 2.0;
  std::size_t max_scatterers = 20;
  double residual_tol = 1e-3;
  SolverConfig solver;
  std::string out_dir;   ///< artifacts are written here when non-empty
};

struct StageReport {
  std::string name;
  double seconds = 0.0;
  std::uint64_t digest = 0;
};

struct RunReport {
  std::vector<StageReport> stages;   ///< synth, extract, cluster, decompose, eval
  std::size_t extracted_count = 0;
  std::size_t component_count = 0;
  double ssim_reconstruction = 0.0;
  double mse_reconstruction = 0.0;
  double first_stage_error = 0.0;             ///< squared Frobenius, first layer
  std::vector<double> later_stage_errors;     ///< squared Frobenius per peel layer
  double telescoping_residual = 0.0;
};

/// Runs synth -> extract -> cluster -> decompose -> eval on one scene.
/// Component matrices are rescaled onto the feasible peel budget of each
/// layer before decomposition. Deterministic given cfg.seed: all stage
/// digests reproduce across runs.
RunReport run_pipeline(const PipelineConfig& cfg);

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json run_report_to_json(const RunReport& report);

} // namespace asctk

#endif
