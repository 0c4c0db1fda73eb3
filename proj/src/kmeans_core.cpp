#include "asctk/kmeans_core.hpp"

#include <limits>

#include "asctk/errors.hpp"
#include "asctk/rng.hpp"

namespace asctk {

namespace {

double sq_dist(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::RowVectorXd& c) {
  return (points.row(i) - c).squaredNorm();
}

KmeansResult run_once(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iters,
                      std::vector<double>* inertia_trace = nullptr) {
  const Eigen::Index n = points.rows();
  KmeansResult res;
  res.centroids.resize(k, points.cols());

  // k-means++ seeding
  std::vector<Eigen::Index> seeds;
  seeds.push_back(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(points, i, points.row(seeds[0]));
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    } else {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    seeds.push_back(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(points, i, points.row(pick)));
  }
  for (int j = 0; j < k; ++j) res.centroids.row(j) = points.row(seeds[j]);

  // Lloyd iterations to an assignment fixpoint
  res.assignment.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<int> next(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd best_d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int j = 0; j < k; ++j) {
        const double d = sq_dist(points, i, res.centroids.row(j));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      next[static_cast<std::size_t>(i)] = arg;
      best_d[i] = best;
    }
    // empty-cluster repair: reseed at the point farthest from its centroid
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(next[i])];
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(next[i])] <= 1) continue;
        if (best_d[i] > far_d) {
          far_d = best_d[i];
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(next[far])];
      next[static_cast<std::size_t>(far)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      best_d[far] = 0.0;
    }
    const bool stable = std::equal(next.begin(), next.end(), res.assignment.begin());
    if (inertia_trace) inertia_trace->push_back(best_d.sum());
    res.assignment = next;
    res.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      res.centroids.row(res.assignment[static_cast<std::size_t>(i)]) += points.row(i);
    for (int j = 0; j < k; ++j)
      if (counts[static_cast<std::size_t>(j)] > 0)
        res.centroids.row(j) /= counts[static_cast<std::size_t>(j)];
    if (stable) break;
  }

  // Single-point swap polish: move a point when the exact inertia delta
  // improves. First improvement wins; repeat to a fixpoint.
  bool improved = true;
  int guard = 0;
  while (improved && guard++ < 10000) {
    improved = false;
    for (Eigen::Index i = 0; i < n && !improved; ++i) {
      const int a = res.assignment[static_cast<std::size_t>(i)];
      const int na = counts[static_cast<std::size_t>(a)];
      if (na <= 1) continue;
      const double cost_a =
          static_cast<double>(na) / (na - 1) * sq_dist(points, i, res.centroids.row(a));
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        const int nb = counts[static_cast<std::size_t>(b)];
        const double cost_b =
            static_cast<double>(nb) / (nb + 1) * sq_dist(points, i, res.centroids.row(b));
        if (cost_b < cost_a - 1e-12) {
          res.centroids.row(a) = (res.centroids.row(a) * na - points.row(i)) / (na - 1);
          res.centroids.row(b) = (res.centroids.row(b) * nb + points.row(i)) / (nb + 1);
          --counts[static_cast<std::size_t>(a)];
          ++counts[static_cast<std::size_t>(b)];
          res.assignment[static_cast<std::size_t>(i)] = b;
          improved = true;
          break;
        }
      }
    }
  }

  res.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    res.inertia += sq_dist(points, i, res.centroids.row(res.assignment[static_cast<std::size_t>(i)]));
  return res;
}

} // namespace

KmeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iters,
                    int restarts) {
  if (k < 1) throw InvalidInputError("k must be >= 1");
  if (points.rows() < k)
    throw InvalidInputError("k-means needs at least k points");
  if (restarts < 1) restarts = 1;

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int t = 0; t < restarts; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    KmeansResult cand = run_once(points, k, rng, max_iters);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

KmeansResult kmeans_single(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           int max_iters, std::vector<double>* inertia_trace) {
  if (k < 1) throw InvalidInputError("k must be >= 1");
  if (points.rows() < k) throw InvalidInputError("k-means needs at least k points");
  Rng rng(seed);
  return run_once(points, k, rng, max_iters, inertia_trace);
}

} // namespace asctk
