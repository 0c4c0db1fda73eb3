#include "asctk/dictionary.hpp"

#include <cmath>

#include "asctk/errors.hpp"

namespace asctk {

std::array<double, 2> resolution_cells(const RadarGrid& grid) {
  const Eigen::Index m = grid.rows();
  const Eigen::Index n = grid.cols();
  // Unambiguous extents follow from the sample spacings; one cell is extent/M.
  const double df = m > 1 ? grid.frequencies[1] - grid.frequencies[0]
                          : grid.frequencies[0];
  const double dphi = n > 1 ? grid.aspects[1] - grid.aspects[0] : 1.0;
  const double x_cell = grid.velocity / (2.0 * df) / static_cast<double>(m);
  const double y_cell = grid.velocity / (4.0 * grid.center_frequency * dphi) /
                        static_cast<double>(n);
  return {x_cell, y_cell};
}

DiscretizationSpec default_dictionary_spec(const RadarGrid& grid, std::size_t nx,
                                           std::size_t ny, double y_stride) {
  if (nx == 0 || ny == 0) throw InvalidInputError("dictionary lattice must be non-empty");
  const auto [x_cell, y_cell] = resolution_cells(grid);
  DiscretizationSpec spec;
  spec.x_positions.resize(nx);
  spec.y_positions.resize(ny);
  for (std::size_t i = 0; i < nx; ++i)
    spec.x_positions[i] = (static_cast<double>(i) - static_cast<double>(nx) / 2.0 + 0.5) * x_cell;
  for (std::size_t i = 0; i < ny; ++i)
    spec.y_positions[i] =
        (static_cast<double>(i) - static_cast<double>(ny) / 2.0 + 0.5) * y_cell * y_stride;
  return spec;
}

AscDictionary build_dictionary(const RadarGrid& grid, const DiscretizationSpec& spec) {
  validate_grid(grid);
  if (spec.x_positions.empty() || spec.y_positions.empty() || spec.alphas.empty() ||
      spec.lengths.empty() || spec.phi_bars.empty() || spec.gammas.empty())
    throw InvalidInputError("dictionary discretization has an empty axis");

  const Eigen::Index dim = grid.rows() * grid.cols();
  AscDictionary dict;
  dict.grid = grid;
  dict.spec = spec;
  dict.atoms.resize(dim, static_cast<Eigen::Index>(spec.atom_count()));

  Eigen::Index col = 0;
  AtomIndex idx;
  for (idx.ix = 0; idx.ix < spec.x_positions.size(); ++idx.ix)
    for (idx.iy = 0; idx.iy < spec.y_positions.size(); ++idx.iy)
      for (idx.ia = 0; idx.ia < spec.alphas.size(); ++idx.ia)
        for (idx.il = 0; idx.il < spec.lengths.size(); ++idx.il)
          for (idx.ip = 0; idx.ip < spec.phi_bars.size(); ++idx.ip)
            for (idx.ig = 0; idx.ig < spec.gammas.size(); ++idx.ig) {
              AscParameterSet p;
              p.amplitude = 1.0;
              p.x_pos = spec.x_positions[idx.ix];
              p.y_pos = spec.y_positions[idx.iy];
              p.alpha = spec.alphas[idx.ia];
              p.length = spec.lengths[idx.il];
              p.phi_bar = spec.phi_bars[idx.ip];
              p.gamma = spec.gammas[idx.ig];
              const PhaseHistory ph = evaluate_asc_response(p, grid);
              Eigen::VectorXcd v =
                  Eigen::Map<const Eigen::VectorXcd>(ph.data.data(), dim);
              const double norm = v.norm();
              if (norm < 1e-12) continue;  // degenerate atom, drop
              dict.atoms.col(col) = v / norm;
              dict.params.push_back(p);
              dict.indices.push_back(idx);
              dict.raw_norms.push_back(norm);
              ++col;
            }
  dict.atoms.conservativeResize(dim, col);
  return dict;
}

} // namespace asctk
