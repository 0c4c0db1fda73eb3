#include "asctk/scattering.hpp"

#include <cmath>
#include <numbers>

#include "asctk/errors.hpp"

namespace asctk {

namespace {

constexpr double kPi = std::numbers::pi;

bool strictly_increasing(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

// Centered DFT matrix pair. The inverse carries the 1/K factor so that
// forward(inverse(x)) == x up to rounding.
Eigen::MatrixXcd centered_dft_matrix(Eigen::Index k, bool inverse) {
  const double c = std::floor(static_cast<double>(k) / 2.0);
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = inverse ? 1.0 / static_cast<double>(k) : 1.0;
  Eigen::MatrixXcd f(k, k);
  for (Eigen::Index p = 0; p < k; ++p) {
    for (Eigen::Index q = 0; q < k; ++q) {
      const double angle =
          sign * 2.0 * kPi * (static_cast<double>(p) - c) * (static_cast<double>(q) - c) /
          static_cast<double>(k);
      f(p, q) = scale * std::complex<double>(std::cos(angle), std::sin(angle));
    }
  }
  return f;
}

} // namespace

bool RadarGrid::same_sampling(const RadarGrid& other) const {
  return center_frequency == other.center_frequency && velocity == other.velocity &&
         frequencies.size() == other.frequencies.size() &&
         aspects.size() == other.aspects.size() && frequencies == other.frequencies &&
         aspects == other.aspects;
}

RadarGrid make_default_grid(Eigen::Index m, Eigen::Index n, double fc, double bandwidth,
                            double aspect_span, double v) {
  RadarGrid grid;
  grid.center_frequency = fc;
  grid.velocity = v;
  grid.frequencies = Eigen::VectorXd::LinSpaced(m, fc - bandwidth / 2.0, fc + bandwidth / 2.0);
  grid.aspects = Eigen::VectorXd::LinSpaced(n, -aspect_span / 2.0, aspect_span / 2.0);
  validate_grid(grid);
  return grid;
}

void validate_grid(const RadarGrid& grid) {
  if (grid.rows() < 1 || grid.cols() < 1)
    throw InvalidInputError("radar grid needs at least one frequency and one aspect sample");
  if (!(grid.center_frequency > 0.0) || !std::isfinite(grid.center_frequency))
    throw InvalidInputError("radar grid center frequency must be positive");
  if (!(grid.velocity > 0.0) || !std::isfinite(grid.velocity))
    throw InvalidInputError("radar grid propagation velocity must be positive");
  if (!grid.frequencies.allFinite() || !grid.aspects.allFinite())
    throw InvalidInputError("radar grid samples must be finite");
  if (grid.frequencies.minCoeff() <= 0.0)
    throw InvalidInputError("radar grid frequencies must be positive");
  if (!strictly_increasing(grid.frequencies))
    throw InvalidInputError("radar grid frequencies must be strictly increasing");
  if (!strictly_increasing(grid.aspects))
    throw InvalidInputError("radar grid aspects must be strictly increasing");
}

void validate_params(const AscParameterSet& p) {
  const double fields[] = {p.amplitude, p.x_pos, p.y_pos, p.alpha,
                           p.length,    p.phi_bar, p.gamma};
  for (double f : fields) {
    if (!std::isfinite(f)) throw InvalidInputError("scatterer parameter is not finite");
  }
  if (p.amplitude < 0.0) throw InvalidInputError("scatterer amplitude must be >= 0");
  if (p.length < 0.0) throw InvalidInputError("scatterer length must be >= 0");
  if (p.phi_bar < -kPi || p.phi_bar >= kPi)
    throw InvalidInputError("scatterer orientation must lie in [-pi, pi)");
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

PhaseHistory evaluate_asc_response(const AscParameterSet& p, const RadarGrid& grid) {
  validate_grid(grid);
  validate_params(p);

  const Eigen::Index m = grid.rows();
  const Eigen::Index n = grid.cols();
  PhaseHistory ph;
  ph.grid = grid;
  ph.data.resize(m, n);

  // (j f/f_c)^alpha on the principal branch: f/f_c > 0 puts the base on the
  // positive imaginary axis, so the power splits into a real magnitude and a
  // fixed phase alpha*pi/2.
  const std::complex<double> alpha_phase(std::cos(p.alpha * kPi / 2.0),
                                         std::sin(p.alpha * kPi / 2.0));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double phi = grid.aspects[j];
    const double sphi = std::sin(phi);
    const double cphi = std::cos(phi);
    const double proj = p.x_pos * cphi + p.y_pos * sphi;
    const double sin_rel = std::sin(phi - p.phi_bar);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double f = grid.frequencies[i];
      const double mag = p.amplitude * std::pow(f / grid.center_frequency, p.alpha) *
                         std::exp(-2.0 * kPi * p.gamma * f * sphi) *
                         sinc(2.0 * kPi * (p.length / grid.velocity) * f * sin_rel);
      const double pos_angle = 4.0 * kPi * (f / grid.velocity) * proj;
      ph.data(i, j) = mag * alpha_phase *
                      std::complex<double>(std::cos(pos_angle), std::sin(pos_angle));
    }
  }
  return ph;
}

PhaseHistory synthesize_scene(const std::vector<AscParameterSet>& scene, const RadarGrid& grid) {
  validate_grid(grid);
  PhaseHistory ph;
  ph.grid = grid;
  ph.data = Eigen::MatrixXcd::Zero(grid.rows(), grid.cols());
  for (const auto& p : scene) {
    ph.data += evaluate_asc_response(p, grid).data;
  }
  return ph;
}

SarImage form_image(const PhaseHistory& ph) {
  if (!ph.data.allFinite()) throw InvalidInputError("phase history has non-finite entries");
  const Eigen::MatrixXcd fm = centered_dft_matrix(ph.data.rows(), true);
  const Eigen::MatrixXcd fn = centered_dft_matrix(ph.data.cols(), true);
  SarImage img;
  img.data = fm * ph.data * fn.transpose();
  return img;
}

Eigen::MatrixXcd forward_transform(const Eigen::MatrixXcd& image) {
  if (!image.allFinite()) throw InvalidInputError("image has non-finite entries");
  const Eigen::MatrixXcd fm = centered_dft_matrix(image.rows(), false);
  const Eigen::MatrixXcd fn = centered_dft_matrix(image.cols(), false);
  return fm * image * fn.transpose();
}

} // namespace asctk
