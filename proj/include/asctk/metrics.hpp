#ifndef ASCTK_METRICS_HPP
#define ASCTK_METRICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace asctk {

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

struct MsSsimConfig {
  SsimConfig ssim;
  int scales = 3;   ///< desk-size default; 5 scales need >= 176-pixel sides
};

struct MetricReport {
  std::string metric;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

/// Mean squared difference.
double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Mean local SSIM over valid windows: Gaussian window, dynamic range taken
/// as the max-minus-min over both images.
double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimConfig& cfg = {});

/// Multi-scale SSIM: contrast-structure terms per scale, luminance folded in
/// at the coarsest scale, standard 5-scale exponents truncated and
/// renormalized to the configured scale count, 2x average-pool downsampling.
double ms_ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
               const MsSsimConfig& cfg = {});

MetricReport mse_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
MetricReport ssim_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const SsimConfig& cfg = {});
MetricReport ms_ssim_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const MsSsimConfig& cfg = {});

/// Multinomial logistic readout trained by full-batch gradient descent.
struct LinearReadout {
  Eigen::MatrixXd weights;   ///< classes x feature-dim
  Eigen::VectorXd bias;
  std::vector<double> loss_trace;
};

/// Fits the readout on flattened features (one row per sample). The step
/// halves whenever an epoch would increase the loss, so the returned trace is
/// non-increasing. Deterministic (zero initialization).
LinearReadout fit_linear_readout(const Eigen::MatrixXd& features,
                                 const std::vector<int>& labels, int epochs = 500,
                                 double step = 0.5);

struct ReadoutGradient {
  double loss = 0.0;              ///< mean softmax cross-entropy
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};

/// Loss and analytic gradient of the softmax cross-entropy at the given
/// readout parameters.
ReadoutGradient readout_gradient(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                                 const Eigen::MatrixXd& features,
                                 const std::vector<int>& labels);

std::vector<int> predict(const LinearReadout& readout, const Eigen::MatrixXd& features);

double accuracy(const LinearReadout& readout, const Eigen::MatrixXd& features,
                const std::vector<int>& labels);

/// Mean absolute readout weight per component block, affinely rescaled per
/// class so the smallest maps to 1 and the largest to 10 (all-equal blocks
/// map to all-ones). Feature dimension must divide into n_blocks.
Eigen::MatrixXd attribute_weights(const LinearReadout& readout, int n_blocks);

} // namespace asctk

#endif
