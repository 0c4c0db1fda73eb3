#ifndef ASCTK_SCATTERING_HPP
#define ASCTK_SCATTERING_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace asctk {

/// Physical parameters of one attributed scattering center.
struct AscParameterSet {
  double amplitude = 1.0;   ///< echo amplitude A, >= 0
  double x_pos = 0.0;       ///< meters, scene-relative
  double y_pos = 0.0;       ///< meters, scene-relative
  double alpha = 0.0;       ///< frequency dependence, canonical {-1,-0.5,0,0.5,1}
  double length = 0.0;      ///< distributed length L, meters, >= 0
  double phi_bar = 0.0;     ///< orientation, radians, in [-pi, pi)
  double gamma = 0.0;       ///< aspect dependency, 1/Hz
};

/// Frequency/aspect sampling lattice of the radar.
struct RadarGrid {
  double center_frequency = 0.0;    ///< f_c, Hz
  Eigen::VectorXd frequencies;      ///< f_1..f_M, Hz, strictly increasing
  Eigen::VectorXd aspects;          ///< phi_1..phi_N, radians, strictly increasing
  double velocity = 299792458.0;    ///< propagation velocity, m/s

  Eigen::Index rows() const { return frequencies.size(); }
  Eigen::Index cols() const { return aspects.size(); }
  bool same_sampling(const RadarGrid& other) const;
};

/// Uniform desk-scale grid: X-band, 1 GHz bandwidth, small aspect span.
RadarGrid make_default_grid(Eigen::Index m = 64, Eigen::Index n = 64,
                            double fc = 10e9, double bandwidth = 1e9,
                            double aspect_span = 0.1, double v = 3e8);

enum class Provenance { Synthetic, Loaded };

/// Complex frequency-domain response sampled on a RadarGrid.
struct PhaseHistory {
  RadarGrid grid;
  Eigen::MatrixXcd data;   ///< M x N, indexed (frequency, aspect)
  Provenance provenance = Provenance::Synthetic;
};

/// Complex spatial-domain image obtained from a phase history.
struct SarImage {
  Eigen::MatrixXcd data;
  Eigen::MatrixXd magnitude() const { return data.cwiseAbs(); }
};

/// sin(x)/x with the removable singularity handled by a series below |x| < 1e-4.
double sinc(double x);

/// Response of a single scattering center on the grid.
/// Entry (m, n) combines the frequency-dependence power term, aspect damping,
/// position phase and the distributed-length sinc.
PhaseHistory evaluate_asc_response(const AscParameterSet& params, const RadarGrid& grid);

/// Sum of responses over a scene; empty scenes give the zero matrix.
PhaseHistory synthesize_scene(const std::vector<AscParameterSet>& scene, const RadarGrid& grid);

/// Centered 2-D inverse DFT, no windowing. form_image is exactly inverted by
/// forward_transform.
SarImage form_image(const PhaseHistory& ph);

/// Centered 2-D forward DFT, the exact inverse of form_image.
Eigen::MatrixXcd forward_transform(const Eigen::MatrixXcd& image);

void validate_grid(const RadarGrid& grid);
void validate_params(const AscParameterSet& params);

} // namespace asctk

#endif
