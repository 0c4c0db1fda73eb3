#include <doctest.h>

#include <cmath>

#include "asctk/errors.hpp"
#include "asctk/factorization.hpp"
#include "asctk/rng.hpp"

using namespace asctk;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index m, Eigen::Index n, double lo = 0.0,
                              double hi = 1.0) {
  Eigen::MatrixXd x(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) x(i, j) = lo + (hi - lo) * rng.uniform();
  return x;
}

// Column-disjoint non-negative orthonormal factor: each row supports one
// column, columns normalized.
Eigen::MatrixXd stiefel_nonneg(Rng& rng, Eigen::Index dim, int r) {
  std::vector<int> assign(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) assign[static_cast<std::size_t>(i)] = i % r;
  for (Eigen::Index i = dim - 1; i > 0; --i) {
    const Eigen::Index j =
        static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(assign[static_cast<std::size_t>(i)], assign[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, r);
  for (Eigen::Index i = 0; i < dim; ++i)
    m(i, assign[static_cast<std::size_t>(i)]) = 0.5 + rng.uniform();
  for (int j = 0; j < r; ++j) m.col(j) /= m.col(j).norm();
  return m;
}

NonNegMatrix planted_instance(std::uint64_t seed, Eigen::Index m, Eigen::Index n, int r) {
  Rng rng(seed);
  const Eigen::MatrixXd u = stiefel_nonneg(rng, m, r);
  const Eigen::MatrixXd v = stiefel_nonneg(rng, n, r);
  const Eigen::MatrixXd w = random_matrix(rng, r, r, 0.5, 1.5);
  return NonNegMatrix{u * w * v.transpose(), 0.0};
}

double frob2_oracle(const Eigen::MatrixXd& x) {
  long double acc = 0.0L;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      acc += static_cast<long double>(x(i, j)) * x(i, j);
  return static_cast<double>(acc);
}

} // namespace

TEST_CASE("make_nonneg shifts by the minimum and records it") {
  Eigen::MatrixXd x(2, 2);
  x << -3.0, 1.0, 0.0, 2.0;
  const NonNegMatrix nn = make_nonneg(x);
  CHECK(nn.offset == 3.0);
  CHECK(nn.values(0, 0) == 0.0);
  CHECK(nn.values(1, 1) == 5.0);

  Eigen::MatrixXd y(2, 2);
  y << 0.5, 1.0, 0.0, 2.0;
  const NonNegMatrix id = make_nonneg(y);
  CHECK(id.offset == 0.0);
  CHECK(id.values == y);
}

TEST_CASE("make_nonneg output minimum is zero exactly when input had negatives") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd x = random_matrix(rng, 6, 5, -0.5, 1.0);
    const NonNegMatrix nn = make_nonneg(x);
    if (x.minCoeff() < 0.0)
      CHECK(nn.values.minCoeff() == 0.0);
    else
      CHECK(nn.values == x);
  }
  CHECK_THROWS_AS(make_nonneg(Eigen::MatrixXd::Constant(2, 2, std::nan(""))),
                  InvalidInputError);
}

TEST_CASE("rank-1 outer products factorize to numerical zero") {
  Rng rng(17);
  SolverConfig cfg;
  cfg.rel_tol = 1e-12;
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd w = random_matrix(rng, 20, 1);
    Eigen::VectorXd h = random_matrix(rng, 15, 1);
    const NonNegMatrix x{w * h.transpose(), 0.0};
    cfg.seed = static_cast<std::uint64_t>(t);
    const NmfResult res = nmf_factorize(x, 1, cfg);
    CHECK(res.objective_trace.back() <= 1e-8 * x.values.squaredNorm());
  }
}

TEST_CASE("zero data drives the NMF objective to zero after one iteration") {
  const NonNegMatrix x{Eigen::MatrixXd::Zero(6, 4), 0.0};
  const NmfResult res = nmf_factorize(x, 2, SolverConfig{});
  REQUIRE(res.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] == 0.0);
}

TEST_CASE("the NMF objective trace is non-increasing and matches an oracle") {
  Rng rng(23);
  SolverConfig cfg;
  cfg.max_iters = 200;
  for (int t = 0; t < 10; ++t) {
    const NonNegMatrix x{random_matrix(rng, 20, 15), 0.0};
    cfg.seed = static_cast<std::uint64_t>(t);
    const NmfResult res = nmf_factorize(x, 5, cfg);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-10);
    // final trace entry agrees with an independent Frobenius evaluation
    const double oracle = 0.5 * frob2_oracle(x.values - res.w * res.h);
    CHECK(res.objective_trace.back() ==
          doctest::Approx(oracle).epsilon(1e-12));
    CHECK((res.w.array() >= 0.0).all());
    CHECK((res.h.array() >= 0.0).all());
  }
}

TEST_CASE("NMF rejects out-of-range ranks") {
  const NonNegMatrix x{Eigen::MatrixXd::Ones(4, 3), 0.0};
  CHECK_THROWS_AS(nmf_factorize(x, 0, SolverConfig{}), InvalidInputError);
  CHECK_THROWS_AS(nmf_factorize(x, 4, SolverConfig{}), InvalidInputError);
}

TEST_CASE("positive diagonal matrices factorize exactly at full rank") {
  Rng rng(5);
  for (int r : {3, 6}) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i) d(i, i) = 0.5 + rng.uniform();
    const NonNegMatrix x{d, 0.0};
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(r);
    const TriFactorLayer layer = onmtf_first_layer(x, r, cfg);
    CHECK(layer.objective_trace.back() <= 1e-6 * x.values.squaredNorm());
  }
}

TEST_CASE("planted instances are recovered with orthogonal factors") {
  for (int r : {4, 8}) {
    const NonNegMatrix x = planted_instance(100 + r, 4 * r, 4 * r + 4, r);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(r);
    const TriFactorLayer layer = onmtf_first_layer(x, r, cfg);
    CHECK(layer.objective_trace.back() <= 1e-4 * x.values.squaredNorm());
    CHECK(layer.orth_u <= 0.05);
    CHECK(layer.orth_v <= 0.05);
    CHECK((layer.u.array() >= 0.0).all());
    CHECK((layer.w.array() >= 0.0).all());
    CHECK((layer.v.array() >= 0.0).all());
  }
}

TEST_CASE("converged updates have unit ratios on the active support") {
  // At a stall of the objective the multiplicative ratios sit at 1 for every
  // entry that carries mass; entries decaying to zero satisfy the fixed point
  // as zeros instead.
  const int r = 4;
  const NonNegMatrix x = planted_instance(77, 16, 20, r);
  SolverConfig cfg;
  cfg.seed = 9;
  cfg.rel_tol = 1e-12;
  const TriFactorLayer layer = onmtf_first_layer(x, r, cfg);

  const Eigen::MatrixXd num_w = layer.u.transpose() * x.values * layer.v;
  const Eigen::MatrixXd den_w =
      layer.u.transpose() * layer.u * layer.w * layer.v.transpose() * layer.v;
  const double tol = 10.0 * std::max(cfg.rel_tol, layer.final_rel_change);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < r; ++i) {
      if (layer.w(i, j) <= 1e-6 * layer.w.col(j).maxCoeff()) continue;
      const double ratio = num_w(i, j) / (den_w(i, j) + cfg.epsilon_guard);
      CHECK(ratio == doctest::Approx(1.0).epsilon(std::max(tol, 1e-6)));
    }
}

TEST_CASE("identical inputs and seeds give bit-identical traces") {
  const NonNegMatrix x = planted_instance(55, 18, 14, 4);
  SolverConfig cfg;
  cfg.seed = 4242;
  cfg.max_iters = 300;
  const TriFactorLayer a = onmtf_first_layer(x, 4, cfg);
  const TriFactorLayer b = onmtf_first_layer(x, 4, cfg);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.w == b.w);
  CHECK(a.u == b.u);
  CHECK(a.v == b.v);

  const NmfResult na = nmf_factorize(x, 3, cfg);
  const NmfResult nb = nmf_factorize(x, 3, cfg);
  CHECK(na.objective_trace == nb.objective_trace);
  CHECK(na.w == nb.w);
}

TEST_CASE("solver configuration is validated") {
  const NonNegMatrix x{Eigen::MatrixXd::Ones(4, 4), 0.0};
  SolverConfig cfg;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(nmf_factorize(x, 2, cfg), InvalidInputError);
  cfg.eta = 1.5;
  CHECK_THROWS_AS(onmtf_first_layer(x, 2, cfg), InvalidInputError);
  cfg = SolverConfig{};
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(nmf_factorize(x, 2, cfg), InvalidInputError);
}
