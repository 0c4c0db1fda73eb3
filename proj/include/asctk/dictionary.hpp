#ifndef ASCTK_DICTIONARY_HPP
#define ASCTK_DICTIONARY_HPP

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <vector>

#include "asctk/scattering.hpp"

namespace asctk {

/// Parameter grids for dictionary construction. One atom is built per point
/// of the Cartesian product; every axis must be non-empty.
struct DiscretizationSpec {
  std::vector<double> x_positions;
  std::vector<double> y_positions;
  std::vector<double> alphas{0.0};
  std::vector<double> lengths{0.0};
  std::vector<double> phi_bars{0.0};
  std::vector<double> gammas{0.0};

  std::size_t atom_count() const {
    return x_positions.size() * y_positions.size() * alphas.size() * lengths.size() *
           phi_bars.size() * gammas.size();
  }
};

/// Index of an atom within its discretization axes.
struct AtomIndex {
  std::size_t ix = 0, iy = 0, ia = 0, il = 0, ip = 0, ig = 0;
  bool operator==(const AtomIndex&) const = default;
};

/// Dictionary of unit-norm vectorized ASC responses over one grid.
struct AscDictionary {
  RadarGrid grid;
  DiscretizationSpec spec;
  std::vector<AscParameterSet> params;   ///< per atom, amplitude fixed at 1
  std::vector<AtomIndex> indices;        ///< per atom
  std::vector<double> raw_norms;         ///< response norm before unit scaling
  Eigen::MatrixXcd atoms;                ///< (M*N) x n_atoms, unit columns

  Eigen::Index atom_count() const { return atoms.cols(); }
};

/// Builds one atom per Cartesian-product point, each normalized to unit
/// Euclidean norm. Atoms with norm below 1e-12 are dropped.
AscDictionary build_dictionary(const RadarGrid& grid, const DiscretizationSpec& spec);

/// Position lattice aligned to image resolution cells: x spacing of one cell,
/// y spacing of y_stride cells, both centered on the scene origin. Bin-aligned
/// positions keep atom coherence low across the whole lattice.
DiscretizationSpec default_dictionary_spec(const RadarGrid& grid, std::size_t nx = 24,
                                           std::size_t ny = 24, double y_stride = 2.0);

/// Resolution-cell sizes implied by the grid sampling
/// (x: frequency axis, y: aspect axis).
std::array<double, 2> resolution_cells(const RadarGrid& grid);

} // namespace asctk

#endif
