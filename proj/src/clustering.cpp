#include "asctk/clustering.hpp"

#include <array>
#include <cmath>
#include <map>

#include "asctk/errors.hpp"
#include "asctk/kmeans_core.hpp"

namespace asctk {

namespace {

constexpr std::array<double, 5> kCanonicalAlphas = {-1.0, -0.5, 0.0, 0.5, 1.0};

double snap_alpha(double alpha) {
  double best = kCanonicalAlphas[0];
  double best_d = std::abs(alpha - kCanonicalAlphas[0]);
  for (double c : kCanonicalAlphas) {
    const double d = std::abs(alpha - c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Eigen::RowVectorXd parameter_vector(const AscParameterSet& p) {
  Eigen::RowVectorXd v(7);
  v << p.amplitude, p.x_pos, p.y_pos, p.alpha, p.length, p.phi_bar, p.gamma;
  return v;
}

} // namespace

std::string to_string(GeometricType t) {
  switch (t) {
    case GeometricType::Dihedral: return "Dihedral";
    case GeometricType::Trihedral: return "Trihedral";
    case GeometricType::Cylinder: return "Cylinder";
    case GeometricType::TopHat: return "TopHat";
    case GeometricType::Sphere: return "Sphere";
    case GeometricType::EdgeBroadside: return "EdgeBroadside";
    case GeometricType::EdgeDiffraction: return "EdgeDiffraction";
    case GeometricType::CornerDiffraction: return "CornerDiffraction";
  }
  return "?";
}

GeometricType geometric_classify(double alpha, double length) {
  if (!std::isfinite(alpha) || !std::isfinite(length))
    throw InvalidInputError("geometric_classify: non-finite input");
  const double a = snap_alpha(alpha);
  const bool long_l = length > kLengthEps;
  if (a == 1.0) return long_l ? GeometricType::Dihedral : GeometricType::Trihedral;
  if (a == 0.5) return long_l ? GeometricType::Cylinder : GeometricType::TopHat;
  if (a == 0.0) return long_l ? GeometricType::EdgeBroadside : GeometricType::Sphere;
  if (a == -0.5 && long_l) return GeometricType::EdgeDiffraction;
  if (a == -1.0 && !long_l) return GeometricType::CornerDiffraction;
  throw InvalidInputError("geometric_classify: pair (alpha=" + std::to_string(a) +
                          ", L " + (long_l ? ">0" : "=0") + ") has no table row");
}

AsccPartition kmeans_cluster(const std::vector<AscParameterSet>& ascs, std::size_t k_asc,
                             std::uint64_t seed) {
  if (k_asc < 1) throw InvalidInputError("k_asc must be >= 1");
  if (ascs.size() < k_asc)
    throw InvalidInputError("k-means clustering needs at least k_asc scatterers");

  const Eigen::Index n = static_cast<Eigen::Index>(ascs.size());
  Eigen::MatrixXd raw(n, 7);
  for (Eigen::Index i = 0; i < n; ++i)
    raw.row(i) = parameter_vector(ascs[static_cast<std::size_t>(i)]);

  // Standardize columns; drop zero-variance dimensions.
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd feat(n, 7);
  for (Eigen::Index j = 0; j < 7; ++j) {
    const double mean = raw.col(j).mean();
    const double var = (raw.col(j).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * (std::abs(mean) + 1.0)) continue;
    feat.col(static_cast<Eigen::Index>(kept.size())) = (raw.col(j).array() - mean) / sd;
    kept.push_back(j);
  }
  const Eigen::Index dims = static_cast<Eigen::Index>(kept.size());
  const Eigen::MatrixXd points = feat.leftCols(dims);

  AsccPartition part;
  part.mode = PartitionMode::Kmeans;
  part.ascs = ascs;
  part.components.resize(k_asc);

  if (dims == 0) {
    // All scatterers identical in every parameter: any assignment attains
    // zero inertia, so distribute round-robin.
    for (std::size_t j = 0; j < k_asc; ++j) {
      part.components[j].label = "k" + std::to_string(j);
      part.components[j].centroid = Eigen::VectorXd::Zero(0);
    }
    for (std::size_t i = 0; i < ascs.size(); ++i)
      part.components[i % k_asc].members.push_back(i);
    return part;
  }

  const KmeansResult km = kmeans(points, static_cast<int>(k_asc), seed);
  for (std::size_t j = 0; j < k_asc; ++j) {
    part.components[j].label = "k" + std::to_string(j);
    part.components[j].centroid = km.centroids.row(static_cast<Eigen::Index>(j)).transpose();
  }
  for (std::size_t i = 0; i < ascs.size(); ++i)
    part.components[static_cast<std::size_t>(km.assignment[i])].members.push_back(i);
  return part;
}

AsccPartition table_cluster(const std::vector<AscParameterSet>& ascs) {
  std::map<int, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < ascs.size(); ++i) {
    try {
      const GeometricType t = geometric_classify(ascs[i].alpha, ascs[i].length);
      by_type[static_cast<int>(t)].push_back(i);
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("scatterer " + std::to_string(i) + ": " + e.what());
    }
  }

  AsccPartition part;
  part.mode = PartitionMode::Table;
  part.ascs = ascs;
  for (const auto& [type, members] : by_type) {
    AsccComponent comp;
    comp.label = to_string(static_cast<GeometricType>(type));
    comp.members = members;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(7);
    for (std::size_t i : members) mean += parameter_vector(ascs[i]);
    comp.centroid = (mean / static_cast<double>(members.size())).transpose();
    part.components.push_back(std::move(comp));
  }
  return part;
}

AsccPartition reconstruct_components(AsccPartition partition, const RadarGrid& grid) {
  for (auto& comp : partition.components) {
    std::vector<AscParameterSet> scene;
    scene.reserve(comp.members.size());
    for (std::size_t i : comp.members) scene.push_back(partition.ascs[i]);
    comp.image = form_image(synthesize_scene(scene, grid));
  }
  return partition;
}

} // namespace asctk
