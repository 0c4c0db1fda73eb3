#ifndef ASCTK_CLUSTERING_HPP
#define ASCTK_CLUSTERING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asctk/scattering.hpp"

namespace asctk {

/// Geometric scattering types inferred from frequency dependence and length.
enum class GeometricType {
  Dihedral,
  Trihedral,
  Cylinder,
  TopHat,
  Sphere,
  EdgeBroadside,
  EdgeDiffraction,
  CornerDiffraction,
};

constexpr int kGeometricTypeCount = 8;

std::string to_string(GeometricType t);

/// Length threshold separating L = 0 from L > 0 in the type table.
constexpr double kLengthEps = 1e-6;

/// Classifies a scatterer by its (alpha, L) pair. Alpha snaps to the nearest
/// canonical value; ties between canonical values resolve toward the smaller
/// one. The two snapped pairs outside the table are rejected.
GeometricType geometric_classify(double alpha, double length);

enum class PartitionMode { Kmeans, Table };

struct AsccComponent {
  std::string label;
  std::vector<std::size_t> members;   ///< indices into the partition's asc list
  Eigen::VectorXd centroid;
  std::optional<SarImage> image;
};

/// Partition of a set of scattering centers into components.
struct AsccPartition {
  PartitionMode mode = PartitionMode::Kmeans;
  std::vector<AscParameterSet> ascs;
  std::vector<AsccComponent> components;

  std::size_t k() const { return components.size(); }
};

/// K-means over standardized 7-dimensional parameter vectors (zero-variance
/// dimensions dropped). k-means++ seeding, Lloyd to a fixpoint; deterministic
/// given seed. Centroids are reported in standardized coordinates.
AsccPartition kmeans_cluster(const std::vector<AscParameterSet>& ascs, std::size_t k_asc,
                             std::uint64_t seed);

/// Partition keyed by geometric type; empty types are omitted. Components are
/// ordered by the type table. Centroids are raw parameter means.
AsccPartition table_cluster(const std::vector<AscParameterSet>& ascs);

/// Synthesizes and images each component from its member scatterers.
AsccPartition reconstruct_components(AsccPartition partition, const RadarGrid& grid);

} // namespace asctk

#endif
