#include "occdet/naive_bayes.hpp"

#include <algorithm>
#include <cmath>

namespace occdet {

namespace {
constexpr double kVarSmoothing = 1e-9;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}  // namespace

GnbModel gnb_fit(const FeatureMatrix& m) {
  const std::size_t d = m.cols();
  if (m.rows < 2 || d == 0) {
    throw ValueError("gnb_fit requires at least two rows and one feature");
  }
  std::array<std::size_t, 2> counts{0, 0};
  for (int lbl : m.labels) {
    if (lbl != 0 && lbl != 1) throw ValueError("labels must be 0 or 1");
    ++counts[static_cast<std::size_t>(lbl)];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw ValueError("gnb_fit requires both classes in the training data");
  }

  GnbModel model;
  model.dim = d;
  for (int cls = 0; cls < 2; ++cls) {
    model.priors[cls] =
        static_cast<double>(counts[cls]) / static_cast<double>(m.rows);
    model.means[cls].assign(d, 0.0);
    model.variances[cls].assign(d, 0.0);
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    const int cls = m.labels[r];
    for (std::size_t c = 0; c < d; ++c) {
      model.means[cls][c] += m.at(r, c);
    }
  }
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t c = 0; c < d; ++c) {
      model.means[cls][c] /= static_cast<double>(counts[cls]);
    }
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    const int cls = m.labels[r];
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = m.at(r, c) - model.means[cls][c];
      model.variances[cls][c] += dev * dev;
    }
  }
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t c = 0; c < d; ++c) {
      model.variances[cls][c] /= static_cast<double>(counts[cls]);
    }
  }

  // Variance floor derived from the pooled (class-agnostic) feature variances.
  std::vector<double> pooled_mean(d, 0.0), pooled_var(d, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) pooled_mean[c] += m.at(r, c);
  }
  for (std::size_t c = 0; c < d; ++c) {
    pooled_mean[c] /= static_cast<double>(m.rows);
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = m.at(r, c) - pooled_mean[c];
      pooled_var[c] += dev * dev;
    }
  }
  double max_var = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    max_var = std::max(max_var, pooled_var[c] / static_cast<double>(m.rows));
  }
  double eps = kVarSmoothing * max_var;
  if (eps <= 0.0) eps = kVarSmoothing;
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t c = 0; c < d; ++c) model.variances[cls][c] += eps;
  }
  return model;
}

std::array<double, 2> GnbModel::posterior(std::span<const double> x) const {
  if (x.size() != dim) {
    throw ValueError("gnb posterior input has wrong dimension");
  }
  std::array<double, 2> logp{std::log(priors[0]), std::log(priors[1])};
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double var = variances[cls][c];
      const double dev = x[c] - means[cls][c];
      logp[cls] += -0.5 * (kLog2Pi + std::log(var)) - dev * dev / (2.0 * var);
    }
  }
  const double top = std::max(logp[0], logp[1]);
  std::array<double, 2> p{std::exp(logp[0] - top), std::exp(logp[1] - top)};
  const double total = p[0] + p[1];
  p[0] /= total;
  p[1] /= total;
  return p;
}

int GnbModel::predict(std::span<const double> x) const {
  const auto p = posterior(x);
  return p[1] > p[0] ? 1 : 0;
}

}  // namespace occdet
