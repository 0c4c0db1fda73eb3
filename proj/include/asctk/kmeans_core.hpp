#ifndef ASCTK_KMEANS_CORE_HPP
#define ASCTK_KMEANS_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace asctk {

struct KmeansResult {
  std::vector<int> assignment;   ///< per point, in [0, k)
  Eigen::MatrixXd centroids;     ///< k x dim
  double inertia = 0.0;          ///< sum of squared distances to assigned centroid
};

/// Lloyd's algorithm with k-means++ seeding, deterministic empty-cluster
/// repair (reseed at the point farthest from its centroid) and a
/// single-point swap polish. Runs `restarts` independent seeded attempts and
/// keeps the lowest inertia. Deterministic given seed.
KmeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters = 300, int restarts = 16);

/// One seeded k-means++/Lloyd run. When `inertia_trace` is given it receives
/// the inertia after every Lloyd assignment step.
KmeansResult kmeans_single(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           int max_iters = 300, std::vector<double>* inertia_trace = nullptr);

} // namespace asctk

#endif
