#include "asctk/fdd.hpp"

#include <cmath>

#include "asctk/errors.hpp"

namespace asctk {

namespace {

constexpr double kPositivityShift = 1e-6;

double mapped(double s) { return (s + 1.0) / 2.0 + kPositivityShift; }

void check_similarity(double s) {
  if (!std::isfinite(s) || s < -1.0 || s > 1.0)
    throw InvalidInputError("similarity must lie in [-1, 1]");
}

} // namespace

double cosine_sim(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidInputError("cosine_sim: length mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw InvalidInputError("cosine_sim: zero-norm input");
  const double c = a.dot(b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

std::vector<FeatureMap> derive_approx_components(const FeatureStack& stack) {
  std::vector<FeatureMap> out;
  const FeatureMap* prev = &stack.x_sar;
  for (const auto& f : stack.intermediate) {
    if (!f.same_shape(stack.x_sar))
      throw InvalidInputError("derive_approx_components: shape mismatch in stack");
    FeatureMap p;
    p.h = f.h;
    p.w = f.w;
    p.c = f.c;
    p.values = prev->values - f.values;
    out.push_back(std::move(p));
    prev = &f;
  }
  return out;
}

GlobalLossResult global_discrimination_loss(const std::vector<SimilarityAnchor>& anchors) {
  if (anchors.empty())
    throw InvalidInputError("global_discrimination_loss: empty positive set");

  GlobalLossResult res;
  res.grad_positive.reserve(anchors.size());
  res.grad_negative.reserve(anchors.size());
  for (const auto& a : anchors) {
    check_similarity(a.positive);
    for (double s : a.negatives) check_similarity(s);
    const double p = mapped(a.positive);
    double q = 0.0;
    for (double s : a.negatives) q += mapped(s);
    // loss term log(p + q) - log(p); gradients pass through dg/ds = 1/2
    res.loss += std::log(p + q) - std::log(p);
    res.grad_positive.push_back(0.5 * (1.0 / (p + q) - 1.0 / p));
    std::vector<double> gneg(a.negatives.size(), 0.5 / (p + q));
    res.grad_negative.push_back(std::move(gneg));
  }
  return res;
}

void LocalWeightState::remember(int component, int pixel_group, double similarity) {
  check_similarity(similarity);
  previous[{component, pixel_group}] = similarity;
}

double LocalWeightState::recall(int component, int pixel_group, double fallback) const {
  const auto it = previous.find({component, pixel_group});
  return it == previous.end() ? fallback : it->second;
}

double gate_beta(double d_t, double d_prev, const LocalWeightState& state) {
  const double dt = std::clamp(d_t, -1.0, 1.0);
  const double dp = std::clamp(d_prev, -1.0, 1.0);
  const double gain = (dt - dp) / std::max(std::abs(dt), 1e-12);
  return gain >= state.eps_gate ? 1.0 : 0.0;
}

double local_weight_at_gate(double beta, double d_t, double rho) {
  if (rho < 0.0) throw InvalidInputError("local_weight: rho must be >= 0");
  const double dt = std::clamp(d_t, -1.0, 1.0);
  const double base = std::clamp(1.0 - beta * (dt + 2.0) / 2.0, 0.0, 1.0);
  return std::pow(base, rho);
}

double local_weight(double d_t, double d_prev, const LocalWeightState& state) {
  return local_weight_at_gate(gate_beta(d_t, d_prev, state), d_t, state.rho);
}

LocalLossResult local_pixel_loss(const std::vector<Eigen::VectorXd>& features,
                                 const Eigen::VectorXd& prototype,
                                 const Eigen::VectorXd& weights) {
  if (static_cast<Eigen::Index>(features.size()) != weights.size())
    throw InvalidInputError("local_pixel_loss: weight count mismatch");
  const double np = prototype.norm();
  if (np == 0.0) throw InvalidInputError("local_pixel_loss: zero-norm prototype");

  const Eigen::VectorXd p_hat = prototype / np;
  LocalLossResult res;
  res.grad_features.reserve(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    const Eigen::VectorXd& f = features[k];
    if (f.size() != prototype.size())
      throw InvalidInputError("local_pixel_loss: feature length mismatch");
    const double nf = f.norm();
    if (nf == 0.0) throw InvalidInputError("local_pixel_loss: zero-norm feature");
    const double lambda = weights[static_cast<Eigen::Index>(k)];
    if (lambda < 0.0 || lambda > 1.0)
      throw InvalidInputError("local_pixel_loss: weights must lie in [0, 1]");
    const double cos_fp = f.dot(p_hat) / nf;
    res.loss -= lambda * cos_fp;
    // d cos / d f = p_hat / ||f|| - cos * f / ||f||^2
    res.grad_features.push_back(-lambda * (p_hat / nf - cos_fp * f / (nf * nf)));
  }
  return res;
}

} // namespace asctk
