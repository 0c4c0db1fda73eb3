#ifndef ASCTK_FACTORIZATION_HPP
#define ASCTK_FACTORIZATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace asctk {

/// Non-negative matrix together with the scalar shift applied at ingestion.
struct NonNegMatrix {
  Eigen::MatrixXd values;
  double offset = 0.0;   ///< subtracted minimum, 0 if input was non-negative
};

/// Shifts a matrix to be entrywise non-negative, recording the offset.
NonNegMatrix make_nonneg(const Eigen::MatrixXd& x);

enum class SolverTermination { Converged, MaxIters };

std::string to_string(SolverTermination t);

struct SolverConfig {
  int max_iters = 5000;
  double rel_tol = 1e-8;
  double epsilon_guard = 1e-12;   ///< denominator floor
  std::uint64_t seed = 0;
  double eta = 1.0;               ///< multiplicative-update learning rate, (0, 1]
};

void validate_config(const SolverConfig& cfg);

struct NmfResult {
  Eigen::MatrixXd w;                    ///< m x r
  Eigen::MatrixXd h;                    ///< r x n
  std::vector<double> objective_trace;  ///< 0.5*||X - WH||_F^2, initial value first
  int iters = 0;
  SolverTermination termination = SolverTermination::Converged;
  double final_rel_change = 0.0;
};

/// Lee-Seung multiplicative NMF from seeded uniform(0,1] initialization.
NmfResult nmf_factorize(const NonNegMatrix& x, int rank, const SolverConfig& cfg);

/// One tri-factorization layer X ~ U W V^T with orthogonality diagnostics.
struct TriFactorLayer {
  Eigen::MatrixXd u;   ///< m x r
  Eigen::MatrixXd w;   ///< r x r
  Eigen::MatrixXd v;   ///< n x r
  std::vector<double> objective_trace;
  double orth_u = 0.0;   ///< ||U^T U - I||_F at termination
  double orth_v = 0.0;   ///< ||V^T V - I||_F at termination
  int iters = 0;
  SolverTermination termination = SolverTermination::Converged;
  double final_rel_change = 0.0;
};

/// Orthogonal non-negative tri-factorization by multiplicative updates on the
/// Stiefel manifold. Factors start from a k-means co-clustering of the rows
/// and columns (indicator matrices with a small positive floor), which keeps
/// the iteration on the orthogonal branch; U and V columns are rescaled to
/// unit norm after each update.
TriFactorLayer onmtf_first_layer(const NonNegMatrix& x, int rank, const SolverConfig& cfg);

} // namespace asctk

#endif
