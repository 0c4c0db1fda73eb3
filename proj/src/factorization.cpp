#include "asctk/factorization.hpp"

#include <cmath>

#include "asctk/errors.hpp"
#include "asctk/kmeans_core.hpp"
#include "asctk/rng.hpp"

namespace asctk {

namespace {

Eigen::MatrixXd uniform_open_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform_open0();
  return m;
}

void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm > 0.0) m.col(j) /= norm;
  }
}

/// Applies the elementwise multiplicative rule num/den with the epsilon guard
/// and the configured learning rate.
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

/// k-means labels over L2-normalized rows of a matrix (the co-clustering
/// structure of an exactly factorizable X makes same-cluster rows parallel).
std::vector<int> cluster_rows(const Eigen::MatrixXd& x, int k, std::uint64_t seed) {
  Eigen::MatrixXd pts = x;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double n = pts.row(i).norm();
    if (n > 0.0) pts.row(i) /= n;
  }
  return kmeans(pts, k, seed, 100, 4).assignment;
}

constexpr double kIndicatorFloor = 1e-3;

} // namespace

std::string to_string(SolverTermination t) {
  return t == SolverTermination::Converged ? "converged" : "max-iters";
}

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidInputError("solver max_iters must be >= 1");
  if (!(cfg.rel_tol > 0.0)) throw InvalidInputError("solver rel_tol must be > 0");
  if (!(cfg.epsilon_guard > 0.0)) throw InvalidInputError("solver epsilon_guard must be > 0");
  if (!(cfg.eta > 0.0) || cfg.eta > 1.0)
    throw InvalidInputError("solver learning rate must lie in (0, 1]");
}

NonNegMatrix make_nonneg(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw InvalidInputError("make_nonneg: non-finite entry");
  NonNegMatrix out;
  const double min = x.size() > 0 ? x.minCoeff() : 0.0;
  if (min < 0.0) {
    out.values = x.array() - min;
    out.offset = -min;
  } else {
    out.values = x;
    out.offset = 0.0;
  }
  return out;
}

NmfResult nmf_factorize(const NonNegMatrix& x, int rank, const SolverConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index m = x.values.rows();
  const Eigen::Index n = x.values.cols();
  if (rank < 1 || rank > std::min(m, n))
    throw InvalidInputError("nmf rank must lie in [1, min(m, n)]");
  if ((x.values.array() < 0.0).any())
    throw InvalidInputError("nmf input must be non-negative");

  Rng rng(cfg.seed);
  NmfResult res;
  res.w = uniform_open_matrix(rng, m, rank);
  res.h = uniform_open_matrix(rng, rank, n);

  const auto objective = [&] { return 0.5 * (x.values - res.w * res.h).squaredNorm(); };
  res.objective_trace.push_back(objective());

  for (int it = 0; it < cfg.max_iters; ++it) {
    multiplicative_step(res.h, res.w.transpose() * x.values,
                        res.w.transpose() * res.w * res.h, cfg);
    multiplicative_step(res.w, x.values * res.h.transpose(),
                        res.w * res.h * res.h.transpose(), cfg);
    res.objective_trace.push_back(objective());
    res.iters = it + 1;
    if (should_stop(res.objective_trace, cfg.rel_tol, &res.final_rel_change)) {
      res.termination = SolverTermination::Converged;
      return res;
    }
  }
  res.termination = SolverTermination::MaxIters;
  return res;
}

TriFactorLayer onmtf_first_layer(const NonNegMatrix& x, int rank, const SolverConfig& cfg) {
  validate_config(cfg);
  const Eigen::Index m = x.values.rows();
  const Eigen::Index n = x.values.cols();
  if (rank < 1 || rank > std::min(m, n))
    throw InvalidInputError("onmtf rank must lie in [1, min(m, n)]");
  if ((x.values.array() < 0.0).any())
    throw InvalidInputError("onmtf input must be non-negative");

  TriFactorLayer layer;

  // Co-clustering initialization: indicator matrices from row/column k-means
  // with a strictly positive floor so every entry stays live under the
  // multiplicative updates.
  const std::vector<int> row_labels =
      cluster_rows(x.values, rank, derive_seed(cfg.seed, 101));
  const std::vector<int> col_labels =
      cluster_rows(x.values.transpose(), rank, derive_seed(cfg.seed, 202));
  layer.u = Eigen::MatrixXd::Constant(m, rank, kIndicatorFloor);
  layer.v = Eigen::MatrixXd::Constant(n, rank, kIndicatorFloor);
  for (Eigen::Index i = 0; i < m; ++i) layer.u(i, row_labels[static_cast<std::size_t>(i)]) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) layer.v(j, col_labels[static_cast<std::size_t>(j)]) = 1.0;
  normalize_columns(layer.u);
  normalize_columns(layer.v);
  layer.w = (layer.u.transpose() * x.values * layer.v).cwiseMax(cfg.epsilon_guard);

  const auto objective = [&] {
    return 0.5 * (x.values - layer.u * layer.w * layer.v.transpose()).squaredNorm();
  };
  layer.objective_trace.push_back(objective());

  for (int it = 0; it < cfg.max_iters; ++it) {
    // U <- U . (X V W^T) / (U W V^T X^T U)
    multiplicative_step(layer.u, x.values * layer.v * layer.w.transpose(),
                        layer.u * layer.w * layer.v.transpose() * x.values.transpose() * layer.u,
                        cfg);
    normalize_columns(layer.u);
    // V <- V . (X^T U W) / (V W^T U^T X V)
    multiplicative_step(layer.v, x.values.transpose() * layer.u * layer.w,
                        layer.v * layer.w.transpose() * layer.u.transpose() * x.values * layer.v,
                        cfg);
    normalize_columns(layer.v);
    // W <- W . (U^T X V) / (U^T U W V^T V)
    multiplicative_step(layer.w, layer.u.transpose() * x.values * layer.v,
                        layer.u.transpose() * layer.u * layer.w * layer.v.transpose() * layer.v,
                        cfg);
    layer.objective_trace.push_back(objective());
    layer.iters = it + 1;
    if (should_stop(layer.objective_trace, cfg.rel_tol, &layer.final_rel_change)) {
      layer.termination = SolverTermination::Converged;
      break;
    }
    if (it + 1 == cfg.max_iters) layer.termination = SolverTermination::MaxIters;
  }

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(rank, rank);
  layer.orth_u = (layer.u.transpose() * layer.u - eye).norm();
  layer.orth_v = (layer.v.transpose() * layer.v - eye).norm();
  return layer;
}

} // namespace asctk
