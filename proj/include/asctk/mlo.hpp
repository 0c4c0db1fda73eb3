#ifndef ASCTK_MLO_HPP
#define ASCTK_MLO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "asctk/factorization.hpp"

namespace asctk {

/// One ASC-component matrix brought to factorization shape.
struct ComponentMatrix {
  Eigen::MatrixXd values;   ///< r x r, entrywise >= 0
  std::string label;
  double offset = 0.0;      ///< min shift applied during preparation
};

/// Relative clamping mass above which a layer is rejected as infeasible.
constexpr double kViolationTol = 1e-6;

/// Pools a real or complex image to r x r (block averages, fractional edge
/// blocks weighted by overlap), then min-shifts to non-negative. Complex
/// input contributes its magnitude.
ComponentMatrix prepare_component(const Eigen::MatrixXd& image, int rank,
                                  const std::string& label = "");
ComponentMatrix prepare_component(const Eigen::MatrixXcd& image, int rank,
                                  const std::string& label = "");

/// One constrained factorization layer W_i ~ U_{i+1} W_{i+1} V_{i+1}^T under
/// W_i - W_{i+1} = P.
struct ConstrainedLayer {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::MatrixXd w_next;        ///< W_{i+1}, fixed by the peel constraint
  Eigen::MatrixXd effective_p;   ///< W_i - W_{i+1}, exact in floating point
  std::vector<double> objective_trace;
  double orth_v = 0.0;           ///< ||V^T V - I||_F at termination
  double violation_norm = 0.0;   ///< Frobenius norm of the clamped negative mass
  int iters = 0;
  SolverTermination termination = SolverTermination::Converged;
  double final_rel_change = 0.0;
};

/// Solves one peel layer. W_{i+1} is pinned to clamp(W_i - P, 0) and adjusted
/// by one rounding step so that W_{i+1} + effective_p == W_i holds bitwise;
/// U and V then follow the multiplicative updates (V column-rescaled each
/// iteration, V is the orthogonality-carrying factor). Throws NumericalError
/// when the clamped mass exceeds kViolationTol * ||W_i||_F.
ConstrainedLayer onmtf_constrained_layer(const Eigen::MatrixXd& w_i, const ComponentMatrix& p,
                                         const SolverConfig& cfg);

struct MloDecomposition {
  TriFactorLayer first;
  std::vector<ConstrainedLayer> layers;
  double telescoping_residual = 0.0;   ///< ||W_1 - (sum effective_p + W_{k+1})||_F
};

/// Runs the constrained layers of a decomposition, threading W_i -> W_{i+1}
/// from the given starting core. Layer errors rethrow with the layer index.
std::vector<ConstrainedLayer> decompose_chain(const Eigen::MatrixXd& w1,
                                              const std::vector<ComponentMatrix>& components,
                                              const SolverConfig& cfg);

/// Full decomposition: first layer on X, then the component chain.
MloDecomposition mlo_decompose(const NonNegMatrix& x,
                               const std::vector<ComponentMatrix>& components, int rank,
                               const SolverConfig& cfg);

/// Telescoping residual ||W_1 - (sum p_i + w_last)||_F computed by summing
/// the chain back up from the deepest layer.
double telescoping_residual(const Eigen::MatrixXd& w1,
                            const std::vector<ConstrainedLayer>& layers);

/// Squared Frobenius decomposition error sum_ij (X_ij - (U W V^T)_ij)^2.
double decomposition_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                           const Eigen::MatrixXd& w, const Eigen::MatrixXd& v);

/// Largest s >= 0 such that w - s * c stays entrywise non-negative, damped by
/// the given safety factor; 0 when c has no positive mass.
double feasible_component_scale(const Eigen::MatrixXd& w, const Eigen::MatrixXd& c,
                                double safety = 0.95);

} // namespace asctk

#endif
