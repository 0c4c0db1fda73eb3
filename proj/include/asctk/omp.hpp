#ifndef ASCTK_OMP_HPP
#define ASCTK_OMP_HPP

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "asctk/dictionary.hpp"
#include "asctk/scattering.hpp"

namespace asctk {

enum class OmpTermination { ResidualTol, MaxScatterers };

std::string to_string(OmpTermination t);

/// One recovered scattering center. The coefficient is fitted against the
/// unit-norm atom; params.amplitude carries the model amplitude
/// |coefficient| / raw_norm, so the parameters re-synthesize the input.
struct RecoveredAsc {
  AscParameterSet params;
  std::complex<double> coefficient;
  Eigen::Index atom = -1;   ///< column index into the dictionary
};

struct ExtractionResult {
  std::vector<RecoveredAsc> scatterers;      ///< in selection order
  std::vector<double> residual_energy;       ///< ||r||^2, initial value first
  OmpTermination termination = OmpTermination::ResidualTol;
};

/// Classical orthogonal matching pursuit: pick the atom with maximal
/// |inner product| against the residual (ties resolved toward the lowest
/// atom index), re-solve least squares over all selected atoms, repeat until
/// the residual drops below residual_tol * ||ph|| or max_scatterers is hit.
ExtractionResult omp_extract(const PhaseHistory& ph, const AscDictionary& dict,
                             std::size_t max_scatterers = 20, double residual_tol = 1e-3);

} // namespace asctk

#endif
