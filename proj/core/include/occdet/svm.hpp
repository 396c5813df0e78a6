#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

enum class KernelKind { linear, rbf };

struct SvmParams {
  double c = 1.0;
  KernelKind kernel = KernelKind::rbf;
  std::optional<double> gamma;  // nullopt -> 1 / (n_features * pooled variance)
  double tolerance = 1e-3;      // KKT violation tolerance
  double step_eps = 1e-4;       // minimum useful alpha change
  int max_passes = 10;          // cap on examine-all sweeps
  int max_sweeps = 100;         // hard cap on total sweeps
  // Hard cap on successful optimization steps; each step costs one pass over
  // the data to refresh the error cache, so this bounds total work. Fits
  // that exhaust it return the best iterate flagged as non-converged.
  std::uint64_t max_steps = 1000000;
  std::uint64_t seed = 0;       // sweep-order shuffling
};

// C-SVC dual solution. Support vectors are stored in training feature space;
// sv_coef[i] is alpha_i * y_i with y in {-1, +1}.
struct SvmModel {
  KernelKind kernel = KernelKind::rbf;
  double gamma = 0.0;
  double c = 0.0;
  double bias = 0.0;
  std::size_t dim = 0;
  std::vector<double> sv_values;  // row-major, n_sv x dim
  std::vector<double> sv_coef;    // n_sv
  bool converged = true;

  std::size_t n_sv() const { return sv_coef.size(); }
  std::span<const double> sv(std::size_t i) const {
    return std::span<const double>(sv_values.data() + i * dim, dim);
  }
  double decision(std::span<const double> x) const;
  int predict(std::span<const double> x) const;  // 1 iff decision >= 0
};

// gamma = 1 / (n_features * population variance of all matrix entries pooled).
// Throws ValueError when the pooled variance is zero.
double auto_gamma(const FeatureMatrix& m);

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Sequential minimal optimization over the C-SVC dual. Requires both classes.
// If the sweep caps are exhausted before the KKT conditions hold within
// tolerance, the best iterate is returned with converged = false.
SvmModel svm_fit(const FeatureMatrix& m, const SvmParams& params);

int svm_predict(const SvmModel& model, std::span<const double> x);

}  // namespace occdet
