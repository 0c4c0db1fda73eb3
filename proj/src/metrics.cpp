#include "asctk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "asctk/errors.hpp"

namespace asctk {

namespace {

Eigen::VectorXd gaussian_window(int size, double sigma) {
  Eigen::VectorXd g(size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) g[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
  return g / g.sum();
}

// Valid-mode separable filter: rows then columns.
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& img, const Eigen::VectorXd& g) {
  const int k = static_cast<int>(g.size());
  const Eigen::Index rows = img.rows() - k + 1;
  const Eigen::Index cols = img.cols() - k + 1;
  Eigen::MatrixXd tmp(rows, img.cols());
  for (Eigen::Index j = 0; j < img.cols(); ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      tmp(i, j) = g.dot(img.col(j).segment(i, k));
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      out(i, j) = g.dot(tmp.row(i).segment(j, k).transpose());
  return out;
}

struct SsimMaps {
  Eigen::ArrayXXd luminance;
  Eigen::ArrayXXd contrast_structure;
};

SsimMaps ssim_maps(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimConfig& cfg,
                   double dynamic_range) {
  const Eigen::VectorXd g = gaussian_window(cfg.window, cfg.sigma);
  const double c1 = (cfg.k1 * dynamic_range) * (cfg.k1 * dynamic_range);
  const double c2 = (cfg.k2 * dynamic_range) * (cfg.k2 * dynamic_range);

  const Eigen::ArrayXXd mu1 = filter_valid(a, g).array();
  const Eigen::ArrayXXd mu2 = filter_valid(b, g).array();
  const Eigen::ArrayXXd s11 = filter_valid(a.cwiseProduct(a), g).array() - mu1 * mu1;
  const Eigen::ArrayXXd s22 = filter_valid(b.cwiseProduct(b), g).array() - mu2 * mu2;
  const Eigen::ArrayXXd s12 = filter_valid(a.cwiseProduct(b), g).array() - mu1 * mu2;

  SsimMaps maps;
  maps.luminance = (2.0 * mu1 * mu2 + c1) / (mu1 * mu1 + mu2 * mu2 + c1);
  maps.contrast_structure = (2.0 * s12 + c2) / (s11 + s22 + c2);
  return maps;
}

double dynamic_range_of(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::max(a.maxCoeff(), b.maxCoeff()) - std::min(a.minCoeff(), b.minCoeff());
}

Eigen::MatrixXd downsample2(const Eigen::MatrixXd& img) {
  const Eigen::Index rows = img.rows() / 2;
  const Eigen::Index cols = img.cols() / 2;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      out(i, j) = 0.25 * (img(2 * i, 2 * j) + img(2 * i + 1, 2 * j) + img(2 * i, 2 * j + 1) +
                          img(2 * i + 1, 2 * j + 1));
  return out;
}

constexpr double kMsSsimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

void check_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInputError("metric inputs must have equal shapes");
  if (!a.allFinite() || !b.allFinite())
    throw InvalidInputError("metric inputs must be finite");
}

} // namespace

double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  check_pair(a, b);
  if (a.size() == 0) throw InvalidInputError("mse: empty input");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimConfig& cfg) {
  check_pair(a, b);
  if (std::min(a.rows(), a.cols()) < cfg.window)
    throw InvalidInputError("ssim: image smaller than the window");
  const double range = dynamic_range_of(a, b);
  if (range == 0.0) return 1.0;  // both images one identical constant
  const SsimMaps maps = ssim_maps(a, b, cfg, range);
  return (maps.luminance * maps.contrast_structure).mean();
}

double ms_ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const MsSsimConfig& cfg) {
  check_pair(a, b);
  if (cfg.scales < 1 || cfg.scales > 5)
    throw InvalidInputError("ms_ssim: scale count must lie in [1, 5]");
  Eigen::Index side = std::min(a.rows(), a.cols());
  for (int s = 1; s < cfg.scales; ++s) side /= 2;
  if (side < cfg.ssim.window)
    throw InvalidInputError("ms_ssim: image too small for the configured scale count");
  if (cfg.scales == 1) return ssim(a, b, cfg.ssim);

  double wsum = 0.0;
  for (int s = 0; s < cfg.scales; ++s) wsum += kMsSsimWeights[s];

  const double range = dynamic_range_of(a, b);
  if (range == 0.0) return 1.0;

  Eigen::MatrixXd ca = a;
  Eigen::MatrixXd cb = b;
  double result = 1.0;
  for (int s = 0; s < cfg.scales; ++s) {
    const SsimMaps maps = ssim_maps(ca, cb, cfg.ssim, range);
    const double w = kMsSsimWeights[s] / wsum;
    // per-scale means clamp at zero: a negative contrast-structure mean has
    // no real fractional power
    if (s + 1 == cfg.scales) {
      result *= std::pow(std::max((maps.luminance * maps.contrast_structure).mean(), 0.0), w);
    } else {
      result *= std::pow(std::max(maps.contrast_structure.mean(), 0.0), w);
      ca = downsample2(ca);
      cb = downsample2(cb);
    }
  }
  return result;
}

MetricReport mse_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return MetricReport{"mse", mse(a, b), {}};
}

MetricReport ssim_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const SsimConfig& cfg) {
  return MetricReport{"ssim",
                      ssim(a, b, cfg),
                      {{"window", static_cast<double>(cfg.window)},
                       {"sigma", cfg.sigma},
                       {"k1", cfg.k1},
                       {"k2", cfg.k2},
                       {"dynamic_range", dynamic_range_of(a, b)}}};
}

MetricReport ms_ssim_report(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const MsSsimConfig& cfg) {
  return MetricReport{"ms-ssim",
                      ms_ssim(a, b, cfg),
                      {{"window", static_cast<double>(cfg.ssim.window)},
                       {"sigma", cfg.ssim.sigma},
                       {"k1", cfg.ssim.k1},
                       {"k2", cfg.ssim.k2},
                       {"scales", static_cast<double>(cfg.scales)},
                       {"dynamic_range", dynamic_range_of(a, b)}}};
}

LinearReadout fit_linear_readout(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                 int epochs, double step) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 1 || static_cast<Eigen::Index>(labels.size()) != n)
    throw InvalidInputError("fit_linear_readout: label count must match sample count");
  if (epochs < 1 || !(step > 0.0))
    throw InvalidInputError("fit_linear_readout: epochs and step must be positive");
  if (!features.allFinite()) throw InvalidInputError("fit_linear_readout: non-finite feature");

  int classes = 0;
  for (int y : labels) {
    if (y < 0) throw InvalidInputError("fit_linear_readout: negative label");
    classes = std::max(classes, y + 1);
  }
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  if (classes < 2) throw InvalidInputError("fit_linear_readout: need at least 2 classes");
  for (int c = 0; c < classes; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw InvalidInputError("fit_linear_readout: class " + std::to_string(c) +
                              " has no samples");

  LinearReadout readout;
  readout.weights = Eigen::MatrixXd::Zero(classes, d);
  readout.bias = Eigen::VectorXd::Zero(classes);

  ReadoutGradient g = readout_gradient(readout.weights, readout.bias, features, labels);
  readout.loss_trace.push_back(g.loss);

  double lr = step;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Halve the step until the epoch does not increase the loss.
    Eigen::MatrixXd w_new;
    Eigen::VectorXd b_new;
    ReadoutGradient g_new;
    for (int tries = 0; tries < 60; ++tries) {
      w_new = readout.weights - lr * g.grad_weights;
      b_new = readout.bias - lr * g.grad_bias;
      g_new = readout_gradient(w_new, b_new, features, labels);
      if (g_new.loss <= readout.loss_trace.back() + 1e-15) break;
      lr *= 0.5;
    }
    readout.weights = std::move(w_new);
    readout.bias = std::move(b_new);
    g = std::move(g_new);
    readout.loss_trace.push_back(g.loss);
  }
  return readout;
}

ReadoutGradient readout_gradient(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                                 const Eigen::MatrixXd& features,
                                 const std::vector<int>& labels) {
  const Eigen::Index n = features.rows();
  const Eigen::Index classes = weights.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw InvalidInputError("readout_gradient: label count must match sample count");
  if (bias.size() != classes || weights.cols() != features.cols())
    throw InvalidInputError("readout_gradient: parameter shape mismatch");

  Eigen::MatrixXd logits = features * weights.transpose();
  logits.rowwise() += bias.transpose();
  Eigen::MatrixXd probs(n, classes);
  ReadoutGradient g;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= classes) throw InvalidInputError("readout_gradient: label out of range");
    const double m = logits.row(i).maxCoeff();
    const Eigen::ArrayXd e = (logits.row(i).transpose().array() - m).exp();
    probs.row(i) = (e / e.sum()).transpose();
    g.loss -= std::log(std::max(probs(i, y), 1e-300));
    probs(i, y) -= 1.0;
  }
  g.loss /= static_cast<double>(n);
  probs /= static_cast<double>(n);
  g.grad_weights = probs.transpose() * features;
  g.grad_bias = probs.colwise().sum().transpose();
  return g;
}

std::vector<int> predict(const LinearReadout& readout, const Eigen::MatrixXd& features) {
  if (features.cols() != readout.weights.cols())
    throw InvalidInputError("predict: feature dimension mismatch");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Eigen::VectorXd logits =
        readout.weights * features.row(i).transpose() + readout.bias;
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

double accuracy(const LinearReadout& readout, const Eigen::MatrixXd& features,
                const std::vector<int>& labels) {
  const std::vector<int> pred = predict(readout, features);
  if (pred.size() != labels.size())
    throw InvalidInputError("accuracy: label count mismatch");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

Eigen::MatrixXd attribute_weights(const LinearReadout& readout, int n_blocks) {
  const Eigen::Index d = readout.weights.cols();
  if (n_blocks < 1 || d % n_blocks != 0)
    throw InvalidInputError("attribute_weights: feature dimension does not divide into blocks");
  const Eigen::Index block = d / n_blocks;
  const Eigen::Index classes = readout.weights.rows();

  Eigen::MatrixXd out(classes, n_blocks);
  for (Eigen::Index c = 0; c < classes; ++c) {
    Eigen::VectorXd means(n_blocks);
    for (int k = 0; k < n_blocks; ++k)
      means[k] = readout.weights.row(c).segment(k * block, block).cwiseAbs().mean();
    const double lo = means.minCoeff();
    const double hi = means.maxCoeff();
    if (hi - lo <= 0.0) {
      out.row(c).setOnes();
    } else {
      out.row(c) = (1.0 + 9.0 * (means.array() - lo) / (hi - lo)).transpose();
    }
  }
  return out;
}

} // namespace asctk
