#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "asctk/errors.hpp"
#include "asctk/rng.hpp"
#include "asctk/scattering.hpp"

using namespace asctk;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent scalar oracle: evaluates one matrix entry straight from the
// model expression, using the complex power route instead of the polar form.
std::complex<double> entry_oracle(const AscParameterSet& p, const RadarGrid& g,
                                  Eigen::Index i, Eigen::Index j) {
  const double f = g.frequencies[i];
  const double phi = g.aspects[j];
  const std::complex<double> jf(0.0, f / g.center_frequency);
  const double arg = 2.0 * kPi * (p.length / g.velocity) * f * std::sin(phi - p.phi_bar);
  const double s = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
  return p.amplitude * std::pow(jf, p.alpha) *
         std::exp(-2.0 * kPi * p.gamma * f * std::sin(phi)) *
         std::exp(std::complex<double>(0.0, 4.0 * kPi * (f / g.velocity) *
                                                (p.x_pos * std::cos(phi) +
                                                 p.y_pos * std::sin(phi)))) *
         s;
}

AscParameterSet random_params(Rng& rng) {
  AscParameterSet p;
  p.amplitude = 0.5 + 2.0 * rng.uniform();
  p.x_pos = (rng.uniform() - 0.5) * 4.0;
  p.y_pos = (rng.uniform() - 0.5) * 2.0;
  const double alphas[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  p.alpha = alphas[rng.uniform_index(5)];
  p.length = rng.uniform() < 0.5 ? 0.0 : 0.3 * rng.uniform();
  p.phi_bar = (rng.uniform() - 0.5) * 0.2;
  p.gamma = rng.uniform() < 0.5 ? 0.0 : 1e-11 * rng.uniform();
  return p;
}

} // namespace

TEST_CASE("unit-amplitude point scatterer gives all-ones response") {
  const RadarGrid grid = make_default_grid(16, 16);
  AscParameterSet p;  // A=1, everything else 0
  const PhaseHistory ph = evaluate_asc_response(p, grid);
  for (Eigen::Index i = 0; i < ph.data.rows(); ++i)
    for (Eigen::Index j = 0; j < ph.data.cols(); ++j) {
      CHECK(std::abs(ph.data(i, j) - std::complex<double>(1.0, 0.0)) <= 1e-12);
    }
}

TEST_CASE("alpha=1 scatterer at center frequency gives 2j") {
  RadarGrid grid;
  grid.center_frequency = 10e9;
  grid.frequencies = Eigen::VectorXd::Constant(1, 10e9);
  grid.aspects = Eigen::VectorXd::Constant(1, 0.0);
  grid.velocity = 3e8;
  AscParameterSet p;
  p.amplitude = 2.0;
  p.alpha = 1.0;
  const PhaseHistory ph = evaluate_asc_response(p, grid);
  CHECK(std::abs(ph.data(0, 0) - std::complex<double>(0.0, 2.0)) <= 1e-12);
}

TEST_CASE("quarter-wavelength offset gives a pi/2 phase") {
  RadarGrid grid;
  grid.center_frequency = 10e9;
  grid.frequencies = Eigen::VectorXd::Constant(1, 10e9);
  grid.aspects = Eigen::VectorXd::Constant(1, 0.0);
  grid.velocity = 3e8;
  AscParameterSet p;
  p.x_pos = grid.velocity / (8.0 * grid.frequencies[0]);
  const PhaseHistory ph = evaluate_asc_response(p, grid);
  const std::complex<double> expected = std::polar(1.0, kPi / 2.0);
  CHECK(std::abs(ph.data(0, 0) - expected) <= 1e-12);
}

TEST_CASE("response matches the scalar oracle entrywise") {
  const RadarGrid grid = make_default_grid(12, 10);
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const AscParameterSet p = random_params(rng);
    const PhaseHistory ph = evaluate_asc_response(p, grid);
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      for (Eigen::Index j = 0; j < grid.cols(); ++j) {
        const std::complex<double> e = entry_oracle(p, grid, i, j);
        CHECK(std::abs(ph.data(i, j) - e) <= 1e-12 * std::max(1.0, std::abs(e)));
      }
  }
}

TEST_CASE("empty scene synthesizes to zero") {
  const RadarGrid grid = make_default_grid(8, 8);
  const PhaseHistory ph = synthesize_scene({}, grid);
  CHECK(ph.data.norm() == 0.0);
}

TEST_CASE("duplicate scatterer doubles the response") {
  const RadarGrid grid = make_default_grid(8, 8);
  Rng rng(5);
  const AscParameterSet p = random_params(rng);
  const PhaseHistory one = evaluate_asc_response(p, grid);
  const PhaseHistory two = synthesize_scene({p, p}, grid);
  CHECK((two.data - 2.0 * one.data).norm() <= 1e-12 * one.data.norm());
}

TEST_CASE("scene synthesis matches brute-force summation") {
  const RadarGrid grid = make_default_grid(10, 10);
  Rng rng(11);
  std::vector<AscParameterSet> scene;
  for (int i = 0; i < 5; ++i) scene.push_back(random_params(rng));
  const PhaseHistory ph = synthesize_scene(scene, grid);
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      std::complex<double> sum = 0.0;
      for (const auto& p : scene) sum += entry_oracle(p, grid, i, j);
      CHECK(std::abs(ph.data(i, j) - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    }
}

TEST_CASE("scene synthesis is additive over scene unions") {
  const RadarGrid grid = make_default_grid(8, 8);
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AscParameterSet> s1, s2, both;
    const int n1 = 1 + static_cast<int>(rng.uniform_index(3));
    const int n2 = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < n1; ++i) s1.push_back(random_params(rng));
    for (int i = 0; i < n2; ++i) s2.push_back(random_params(rng));
    both = s1;
    both.insert(both.end(), s2.begin(), s2.end());
    const Eigen::MatrixXcd lhs = synthesize_scene(both, grid).data;
    const Eigen::MatrixXcd rhs =
        synthesize_scene(s1, grid).data + synthesize_scene(s2, grid).data;
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("amplitude scaling scales the response") {
  const RadarGrid grid = make_default_grid(8, 8);
  Rng rng(17);
  AscParameterSet p = random_params(rng);
  const PhaseHistory base = evaluate_asc_response(p, grid);
  p.amplitude *= 3.5;
  const PhaseHistory scaled = evaluate_asc_response(p, grid);
  CHECK((scaled.data - 3.5 * base.data).norm() <= 1e-12 * scaled.data.norm());
}

TEST_CASE("sinc series guard stays within the quadratic bound") {
  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform() - 0.5) * 2e-4;
    // one ulp of slack at 1.0 covers the rounding of 1 - x^2/6
    CHECK(std::abs(sinc(x) - 1.0) <= x * x / 6.0 + 1.2e-16);
  }
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(kPi) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero phase history forms a zero image") {
  PhaseHistory ph;
  ph.grid = make_default_grid(8, 8);
  ph.data = Eigen::MatrixXcd::Zero(8, 8);
  CHECK(form_image(ph).data.norm() == 0.0);
}

TEST_CASE("constant phase history forms a centered impulse") {
  PhaseHistory ph;
  ph.grid = make_default_grid(8, 8);
  ph.data = Eigen::MatrixXcd::Constant(8, 8, 1.0);
  const SarImage img = form_image(ph);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) {
      const double expected = (i == 4 && j == 4) ? 1.0 : 0.0;
      CHECK(std::abs(img.data(i, j) - expected) <= 1e-12);
    }
}

TEST_CASE("forward transform inverts image formation") {
  Rng rng(23);
  PhaseHistory ph;
  ph.grid = make_default_grid(16, 12);
  ph.data.resize(16, 12);
  for (Eigen::Index j = 0; j < 12; ++j)
    for (Eigen::Index i = 0; i < 16; ++i)
      ph.data(i, j) = std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
  const Eigen::MatrixXcd back = forward_transform(form_image(ph).data);
  CHECK((back - ph.data).norm() <= 1e-10 * ph.data.norm());
}

TEST_CASE("invalid inputs are rejected") {
  const RadarGrid grid = make_default_grid(4, 4);
  AscParameterSet p;
  p.amplitude = std::nan("");
  CHECK_THROWS_AS(evaluate_asc_response(p, grid), InvalidInputError);
  p.amplitude = -1.0;
  CHECK_THROWS_AS(evaluate_asc_response(p, grid), InvalidInputError);
  p.amplitude = 1.0;
  p.length = -0.1;
  CHECK_THROWS_AS(evaluate_asc_response(p, grid), InvalidInputError);

  RadarGrid bad = grid;
  bad.center_frequency = -1.0;
  CHECK_THROWS_AS(evaluate_asc_response(AscParameterSet{}, bad), InvalidInputError);
  bad = grid;
  bad.frequencies[1] = bad.frequencies[0];  // not strictly increasing
  CHECK_THROWS_AS(evaluate_asc_response(AscParameterSet{}, bad), InvalidInputError);
}
