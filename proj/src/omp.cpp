#include "asctk/omp.hpp"

#include <cmath>

#include "asctk/errors.hpp"

namespace asctk {

std::string to_string(OmpTermination t) {
  return t == OmpTermination::ResidualTol ? "residual-tol" : "max-scatterers";
}

ExtractionResult omp_extract(const PhaseHistory& ph, const AscDictionary& dict,
                             std::size_t max_scatterers, double residual_tol) {
  if (!ph.grid.same_sampling(dict.grid))
    throw InvalidInputError("phase history grid does not match dictionary grid");
  if (!ph.data.allFinite())
    throw InvalidInputError("phase history has non-finite entries");
  if (residual_tol < 0.0) throw InvalidInputError("residual tolerance must be >= 0");
  if (ph.data.rows() != dict.grid.rows() || ph.data.cols() != dict.grid.cols())
    throw InvalidInputError("phase history shape does not match its grid");

  const Eigen::Index dim = ph.data.size();
  const Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(ph.data.data(), dim);
  const double norm_x = x.norm();
  const Eigen::Index n_atoms = dict.atom_count();

  ExtractionResult result;
  Eigen::VectorXcd residual = x;
  result.residual_energy.push_back(residual.squaredNorm());

  std::vector<Eigen::Index> selected;
  std::vector<bool> used(static_cast<std::size_t>(n_atoms), false);
  Eigen::VectorXcd coeffs;

  const Eigen::Index cap =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(max_scatterers), n_atoms);

  while (static_cast<Eigen::Index>(selected.size()) < cap &&
         residual.norm() > residual_tol * norm_x) {
    // Score all unselected atoms against the residual; lowest index wins ties.
    const Eigen::VectorXd scores = (dict.atoms.adjoint() * residual).cwiseAbs();
    Eigen::Index best = -1;
    double best_score = -1.0;
    for (Eigen::Index j = 0; j < n_atoms; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (scores[j] > best_score) {
        best_score = scores[j];
        best = j;
      }
    }
    if (best < 0) break;  // dictionary exhausted
    used[static_cast<std::size_t>(best)] = true;
    selected.push_back(best);

    // Re-solve least squares over the selected atoms via the Gram system.
    const Eigen::Index k = static_cast<Eigen::Index>(selected.size());
    Eigen::MatrixXcd sub(dim, k);
    for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = dict.atoms.col(selected[j]);
    const Eigen::MatrixXcd gram = sub.adjoint() * sub;
    const Eigen::VectorXcd rhs = sub.adjoint() * x;
    coeffs = gram.ldlt().solve(rhs);
    residual = x - sub * coeffs;
    result.residual_energy.push_back(residual.squaredNorm());
  }

  result.termination = residual.norm() <= residual_tol * norm_x
                           ? OmpTermination::ResidualTol
                           : OmpTermination::MaxScatterers;

  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(selected.size()); ++j) {
    RecoveredAsc rec;
    rec.params = dict.params[static_cast<std::size_t>(selected[j])];
    rec.coefficient = coeffs[j];
    // coefficients are fitted against unit-norm atoms; dividing by the raw
    // response norm recovers the model amplitude, so re-synthesizing the
    // recovered parameters reproduces the input scene
    rec.params.amplitude =
        std::abs(coeffs[j]) / dict.raw_norms[static_cast<std::size_t>(selected[j])];
    rec.atom = selected[j];
    result.scatterers.push_back(rec);
  }
  return result;
}

} // namespace asctk
