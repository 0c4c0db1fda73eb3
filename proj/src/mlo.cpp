#include "asctk/mlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "asctk/errors.hpp"

namespace asctk {

namespace {

// Pooling weights mapping `in` samples onto `out` cells: row i holds the
// overlap of output cell i with each input cell, normalized to sum 1.
Eigen::MatrixXd pooling_weights(Eigen::Index out, Eigen::Index in) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(out, in);
  const double step = static_cast<double>(in) / static_cast<double>(out);
  for (Eigen::Index i = 0; i < out; ++i) {
    const double lo = static_cast<double>(i) * step;
    const double hi = lo + step;
    for (Eigen::Index j = static_cast<Eigen::Index>(std::floor(lo)); j < in; ++j) {
      const double a = std::max(lo, static_cast<double>(j));
      const double b = std::min(hi, static_cast<double>(j + 1));
      if (b <= a) {
        if (static_cast<double>(j) >= hi) break;
        continue;
      }
      w(i, j) = (b - a) / step;
    }
  }
  return w;
}

void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm > 0.0) m.col(j) /= norm;
  }
}

// Permutation init matching rows/columns of W_i to rows/columns of W_{i+1}
// by sorted norms (ranks are invariant under the permutation model).
void norm_match_init(const Eigen::MatrixXd& w_i, const Eigen::MatrixXd& w_next,
                     Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  const Eigen::Index r = w_i.rows();
  constexpr double kFloor = 1e-5;

  const auto rank_order = [](const Eigen::VectorXd& vals) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    return order;
  };

  const auto match = [&](const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
    const auto of = rank_order(from);
    const auto ot = rank_order(to);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(from.size()));
    for (std::size_t k = 0; k < perm.size(); ++k)
      perm[static_cast<std::size_t>(of[k])] = ot[k];
    return perm;
  };

  const auto sigma = match(w_i.rowwise().norm(), w_next.rowwise().norm());
  const auto tau = match(w_i.colwise().norm().transpose(), w_next.colwise().norm().transpose());

  u = Eigen::MatrixXd::Constant(r, r, kFloor);
  v = Eigen::MatrixXd::Constant(r, r, kFloor);
  for (Eigen::Index i = 0; i < r; ++i) u(i, sigma[static_cast<std::size_t>(i)]) = 1.0;
  for (Eigen::Index j = 0; j < r; ++j) v(j, tau[static_cast<std::size_t>(j)]) = 1.0;
}

void multiplicative_step(Eigen::MatrixXd& factor, const Eigen::MatrixXd& num,
                         const Eigen::MatrixXd& den, const SolverConfig& cfg) {
  Eigen::ArrayXXd ratio = num.array() / (den.array() + cfg.epsilon_guard);
  if (cfg.eta != 1.0) ratio = ratio.pow(cfg.eta);
  factor.array() *= ratio;
}

bool should_stop(const std::vector<double>& trace, double rel_tol, double* rel_change) {
  const double prev = trace[trace.size() - 2];
  const double cur = trace.back();
  if (prev <= 1e-300) {
    *rel_change = 0.0;
    return true;
  }
  *rel_change = std::abs(prev - cur) / prev;
  return *rel_change < rel_tol;
}

ComponentMatrix finish_component(Eigen::MatrixXd pooled, const std::string& label) {
  ComponentMatrix comp;
  const double min = pooled.size() > 0 ? pooled.minCoeff() : 0.0;
  if (min < 0.0) {
    comp.values = pooled.array() - min;
    comp.offset = -min;
  } else {
    comp.values = std::move(pooled);
    comp.offset = 0.0;
  }
  comp.label = label;
  return comp;
}

} // namespace

ComponentMatrix prepare_component(const Eigen::MatrixXd& image, int rank,
                                  const std::string& label) {
  if (!image.allFinite()) throw InvalidInputError("prepare_component: non-finite input");
  if (rank < 1) throw InvalidInputError("prepare_component: rank must be >= 1");
  if (rank > image.rows() && rank > image.cols())
    throw InvalidInputError("prepare_component: rank exceeds both input dimensions");
  if (image.rows() == rank && image.cols() == rank && image.minCoeff() >= 0.0) {
    ComponentMatrix comp;
    comp.values = image;
    comp.label = label;
    return comp;
  }
  const Eigen::MatrixXd rows = pooling_weights(rank, image.rows());
  const Eigen::MatrixXd cols = pooling_weights(rank, image.cols());
  return finish_component(rows * image * cols.transpose(), label);
}

ComponentMatrix prepare_component(const Eigen::MatrixXcd& image, int rank,
                                  const std::string& label) {
  if (!image.allFinite()) throw InvalidInputError("prepare_component: non-finite input");
  return prepare_component(Eigen::MatrixXd(image.cwiseAbs()), rank, label);
}

ConstrainedLayer onmtf_constrained_layer(const Eigen::MatrixXd& w_i, const ComponentMatrix& p,
                                         const SolverConfig& cfg) {
  validate_config(cfg);
  if (w_i.rows() != w_i.cols()) throw InvalidInputError("constrained layer: W_i must be square");
  if (p.values.rows() != w_i.rows() || p.values.cols() != w_i.cols())
    throw InvalidInputError("constrained layer: component shape does not match W_i");
  if ((w_i.array() < 0.0).any())
    throw InvalidInputError("constrained layer: W_i must be non-negative");

  const Eigen::Index r = w_i.rows();
  ConstrainedLayer layer;

  const Eigen::MatrixXd diff = w_i - p.values;
  layer.violation_norm = diff.cwiseMin(0.0).norm();
  const double scale = w_i.norm();
  if (layer.violation_norm > kViolationTol * scale)
    throw NumericalError("constrained layer infeasible: clamped violation norm " +
                         std::to_string(layer.violation_norm) + " exceeds " +
                         std::to_string(kViolationTol * scale));

  // Pin W_{i+1} and re-derive it from the rounded difference so that
  // W_{i+1} + effective_p reproduces W_i exactly in floating point
  // (0 <= W_{i+1} <= W_i entrywise makes the rounded subtraction lossless).
  Eigen::MatrixXd w_next = diff.cwiseMax(0.0);
  layer.effective_p = w_i - w_next;
  layer.w_next = w_i - layer.effective_p;

  norm_match_init(w_i, layer.w_next, layer.u, layer.v);

  const auto objective = [&] {
    return 0.5 * (w_i - layer.u * layer.w_next * layer.v.transpose()).squaredNorm();
  };
  layer.objective_trace.push_back(objective());

  for (int it = 0; it < cfg.max_iters; ++it) {
    // V <- V . (W_i^T U W_next) / (V W_next^T U^T W_i V)
    multiplicative_step(
        layer.v, w_i.transpose() * layer.u * layer.w_next,
        layer.v * layer.w_next.transpose() * layer.u.transpose() * w_i * layer.v, cfg);
    normalize_columns(layer.v);
    // U <- U . (W_i V W_next^T) / (U W_next W_next^T)
    multiplicative_step(layer.u, w_i * layer.v * layer.w_next.transpose(),
                        layer.u * layer.w_next * layer.w_next.transpose(), cfg);
    layer.objective_trace.push_back(objective());
    layer.iters = it + 1;
    if (should_stop(layer.objective_trace, cfg.rel_tol, &layer.final_rel_change)) {
      layer.termination = SolverTermination::Converged;
      break;
    }
    if (it + 1 == cfg.max_iters) layer.termination = SolverTermination::MaxIters;
  }

  layer.orth_v =
      (layer.v.transpose() * layer.v - Eigen::MatrixXd::Identity(r, r)).norm();
  return layer;
}

std::vector<ConstrainedLayer> decompose_chain(const Eigen::MatrixXd& w1,
                                              const std::vector<ComponentMatrix>& components,
                                              const SolverConfig& cfg) {
  std::vector<ConstrainedLayer> layers;
  Eigen::MatrixXd w = w1;
  for (std::size_t i = 0; i < components.size(); ++i) {
    try {
      layers.push_back(onmtf_constrained_layer(w, components[i], cfg));
    } catch (const NumericalError& e) {
      throw NumericalError("layer " + std::to_string(i + 1) + ": " + e.what());
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("layer " + std::to_string(i + 1) + ": " + e.what());
    }
    w = layers.back().w_next;
  }
  return layers;
}

double telescoping_residual(const Eigen::MatrixXd& w1,
                            const std::vector<ConstrainedLayer>& layers) {
  Eigen::MatrixXd acc =
      layers.empty() ? w1 : layers.back().w_next;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) acc += it->effective_p;
  return (w1 - acc).norm();
}

MloDecomposition mlo_decompose(const NonNegMatrix& x,
                               const std::vector<ComponentMatrix>& components, int rank,
                               const SolverConfig& cfg) {
  for (const auto& c : components) {
    if (c.values.rows() != rank || c.values.cols() != rank)
      throw InvalidInputError("mlo_decompose: component is not rank x rank");
  }
  MloDecomposition dec;
  dec.first = onmtf_first_layer(x, rank, cfg);
  dec.layers = decompose_chain(dec.first.w, components, cfg);
  dec.telescoping_residual = telescoping_residual(dec.first.w, dec.layers);
  return dec;
}

double decomposition_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                           const Eigen::MatrixXd& w, const Eigen::MatrixXd& v) {
  if (u.cols() != w.rows() || w.cols() != v.cols() || x.rows() != u.rows() ||
      x.cols() != v.rows())
    throw InvalidInputError("decomposition_error: nonconformable shapes");
  return (x - u * w * v.transpose()).squaredNorm();
}

double feasible_component_scale(const Eigen::MatrixXd& w, const Eigen::MatrixXd& c,
                                double safety) {
  if (w.rows() != c.rows() || w.cols() != c.cols())
    throw InvalidInputError("feasible_component_scale: shape mismatch");
  const double cmax = c.size() > 0 ? c.maxCoeff() : 0.0;
  if (cmax <= 0.0) return 0.0;
  const double threshold = 1e-12 * cmax;
  double scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      if (c(i, j) > threshold) scale = std::min(scale, w(i, j) / c(i, j));
  if (!std::isfinite(scale) || scale <= 0.0) return 0.0;
  return safety * scale;
}

} // namespace asctk
