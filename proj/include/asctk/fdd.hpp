#ifndef ASCTK_FDD_HPP
#define ASCTK_FDD_HPP

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

namespace asctk {

/// One h x w x c feature tensor stored flat.
struct FeatureMap {
  Eigen::VectorXd values;
  int h = 0, w = 0, c = 0;

  bool same_shape(const FeatureMap& other) const {
    return h == other.h && w == other.w && c == other.c &&
           values.size() == other.values.size();
  }
};

/// Deep feature tensor with the intermediate filter outputs.
struct FeatureStack {
  FeatureMap x_sar;                      ///< X^SAR
  std::vector<FeatureMap> intermediate;  ///< f_i^mid for i = 1..K
};

/// Cosine similarity clamped to [-1, 1]. Rejects zero-norm inputs.
double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Telescoped component approximations: P_1 = X - f_1, P_i = f_{i-1} - f_i.
std::vector<FeatureMap> derive_approx_components(const FeatureStack& stack);

/// Per-anchor similarity pair: one positive, any number of negatives.
struct SimilarityAnchor {
  double positive = 0.0;
  std::vector<double> negatives;
};

struct GlobalLossResult {
  double loss = 0.0;
  std::vector<double> grad_positive;              ///< d loss / d s+ per anchor
  std::vector<std::vector<double>> grad_negative; ///< d loss / d s-_j per anchor
};

/// Discrimination loss -sum log(g(s+) / (g(s+) + sum_j g(s-_j))) over anchors
/// with the positivity mapping g(s) = (s+1)/2 + 1e-6 applied to raw cosine
/// similarities. Analytic gradients are with respect to the raw similarities.
GlobalLossResult global_discrimination_loss(const std::vector<SimilarityAnchor>& anchors);

/// Gate threshold, weight exponent, and the previous-iteration similarity
/// store for the local pixel weight.
struct LocalWeightState {
  double eps_gate = 0.05;
  double rho = 2.0;
  std::map<std::pair<int, int>, double> previous;  ///< keyed (component, pixel group)

  void remember(int component, int pixel_group, double similarity);
  double recall(int component, int pixel_group, double fallback) const;
};

/// Gate decision: 1 when the relative similarity gain
/// (d_t - d_prev) / max(|d_t|, 1e-12) reaches eps_gate, else 0.
double gate_beta(double d_t, double d_prev, const LocalWeightState& state);

/// Weight formula at a given gate value:
/// lambda = clamp(1 - beta*(d_t + 2)/2, 0, 1)^rho.
double local_weight_at_gate(double beta, double d_t, double rho);

/// Gated corrective weight combining gate_beta and local_weight_at_gate.
double local_weight(double d_t, double d_prev, const LocalWeightState& state);

struct LocalLossResult {
  double loss = 0.0;
  std::vector<Eigen::VectorXd> grad_features;   ///< d loss / d f_k
};

/// Weighted pixel loss -sum_k lambda_k * cos(l2n(f_k), l2n(prototype)) with
/// analytic feature gradients.
LocalLossResult local_pixel_loss(const std::vector<Eigen::VectorXd>& features,
                                 const Eigen::VectorXd& prototype,
                                 const Eigen::VectorXd& weights);

} // namespace asctk

#endif
