#include "occdet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "occdet/rng.hpp"

namespace occdet {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sq_dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

// SMO working state over the training matrix.
class Smo {
 public:
  Smo(const FeatureMatrix& m, const SvmParams& p, double gamma)
      : m_(m),
        p_(p),
        gamma_(gamma),
        n_(m.rows),
        y_(m.rows),
        alpha_(m.rows, 0.0),
        error_(m.rows),
        exhausted_at_(m.rows, 0),
        rng_(mix_seed(p.seed, 0x534d4f)) {
    nb_min_ = n_;
    nb_max_ = n_;
    for (std::size_t i = 0; i < n_; ++i) {
      y_[i] = m_.labels[i] == 1 ? 1.0 : -1.0;
      error_[i] = -y_[i];  // f(x) = 0 initially
    }
  }

  // Runs the solver; returns true when a full sweep found no KKT violation.
  bool solve() {
    bool examine_all = true;
    int full_passes = 0;
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int sweep = 0; sweep < p_.max_sweeps; ++sweep) {
      rng_.shuffle(order);
      std::size_t changed = 0;
      stalled_ = 0;
      if (examine_all) {
        ++full_passes;
        for (std::size_t i : order) {
          if (version_ >= p_.max_steps) return false;
          changed += examine(i);
        }
        if (changed == 0) {
          // No violation left, or the remaining violators are unfixable and
          // nothing can unblock them; either way the iterate is final.
          return stalled_ == 0;
        }
        if (full_passes >= p_.max_passes) return false;
        examine_all = false;
      } else {
        for (std::size_t i : order) {
          if (version_ >= p_.max_steps) return false;
          if (alpha_[i] > 0.0 && alpha_[i] < p_.c) changed += examine(i);
        }
        if (changed == 0) examine_all = true;
      }
    }
    return false;
  }

  double bias() const { return bias_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& y() const { return y_; }

 private:
  double kernel(std::size_t i, std::size_t j) const {
    auto xi = m_.row(i);
    auto xj = m_.row(j);
    if (p_.kernel == KernelKind::linear) return dot(xi, xj);
    return std::exp(-gamma_ * sq_dist(xi, xj));
  }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    const bool violated =
        (r2 < -p_.tolerance && a2 < p_.c) || (r2 > p_.tolerance && a2 > 0.0);
    if (!violated) return 0;

    // The exhaustive search below is deterministic given the alphas, errors,
    // and bias, all of which change only when some step succeeds. A point
    // that ran out of partners stays stuck until then, so skip it for free.
    if (exhausted_at_[i2] == version_ + 1) {
      ++stalled_;
      return 0;
    }

    // First choice: the non-bound point with the largest |E1 - E2|, which is
    // the non-bound min or max error (tracked incrementally).
    if (nb_min_ < n_) {
      const std::size_t best =
          std::abs(error_[nb_max_] - e2) > std::abs(error_[nb_min_] - e2)
              ? nb_max_
              : nb_min_;
      if (take_step(best, i2)) return 1;
    }

    // Fallbacks: non-bound points, then everything, from a random offset.
    const std::size_t start1 = rng_.below(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i = (start1 + k) % n_;
      if (alpha_[i] <= 0.0 || alpha_[i] >= p_.c) continue;
      if (take_step(i, i2)) return 1;
    }
    const std::size_t start2 = rng_.below(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i = (start2 + k) % n_;
      if (take_step(i, i2)) return 1;
    }
    exhausted_at_[i2] = version_ + 1;
    ++stalled_;
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(p_.c, p_.c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - p_.c);
      hi = std::min(p_.c, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = kernel(i1, i1);
    const double k12 = kernel(i1, i2);
    const double k22 = kernel(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = a2 + y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_new, lo, hi);
    } else {
      // Degenerate curvature: evaluate the dual objective at both ends.
      const double f1 = y1 * (e1 - bias_) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 - bias_) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                            0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                            0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (lo_obj < hi_obj - p_.step_eps) {
        a2_new = lo;
      } else if (lo_obj > hi_obj + p_.step_eps) {
        a2_new = hi;
      } else {
        return false;
      }
    }
    if (std::abs(a2_new - a2) < p_.step_eps * (a2_new + a2 + p_.step_eps)) {
      return false;
    }

    // Round-off can leave an alpha a few ulps off its box bound (1e-17
    // instead of exactly 0, say). Such dust reads as a KKT violation that no
    // partner step can repair, wedging the endgame; snap it onto the bound.
    constexpr double kBoundSnap = 1e-12;
    if (a2_new <= kBoundSnap * p_.c) {
      a2_new = 0.0;
    } else if (a2_new >= (1.0 - kBoundSnap) * p_.c) {
      a2_new = p_.c;
    }
    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new <= kBoundSnap * p_.c) {
      a1_new = 0.0;
    } else if (a1_new >= (1.0 - kBoundSnap) * p_.c) {
      a1_new = p_.c;
    }

    const double da1 = a1_new - a1;
    const double da2 = a2_new - a2;
    const double b1 = bias_ - e1 - y1 * da1 * k11 - y2 * da2 * k12;
    const double b2 = bias_ - e2 - y1 * da1 * k12 - y2 * da2 * k22;
    double bias_new;
    if (a1_new > 0.0 && a1_new < p_.c) {
      bias_new = b1;
    } else if (a2_new > 0.0 && a2_new < p_.c) {
      bias_new = b2;
    } else {
      bias_new = 0.5 * (b1 + b2);
    }
    const double db = bias_new - bias_;

    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    bias_ = bias_new;
    ++version_;
    nb_min_ = n_;
    nb_max_ = n_;
    double e_min = 0.0, e_max = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      error_[i] += y1 * da1 * kernel(i1, i) + y2 * da2 * kernel(i2, i) + db;
      if (alpha_[i] > 0.0 && alpha_[i] < p_.c) {
        if (nb_min_ == n_ || error_[i] < e_min) {
          e_min = error_[i];
          nb_min_ = i;
        }
        if (nb_max_ == n_ || error_[i] > e_max) {
          e_max = error_[i];
          nb_max_ = i;
        }
      }
    }
    return true;
  }

  const FeatureMatrix& m_;
  const SvmParams& p_;
  double gamma_;
  std::size_t n_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  // Indices of the current non-bound min/max error (n_ when none exist).
  std::size_t nb_min_ = 0;
  std::size_t nb_max_ = 0;
  // Successful-step counter; examine() results are stable between steps.
  std::uint64_t version_ = 0;
  std::vector<std::uint64_t> exhausted_at_;
  std::size_t stalled_ = 0;
  double bias_ = 0.0;
  Rng rng_;
};

}  // namespace

double auto_gamma(const FeatureMatrix& m) {
  if (m.rows == 0 || m.cols() == 0) {
    throw ValueError("auto gamma requires a non-empty matrix");
  }
  const double count = static_cast<double>(m.values.size());
  double mean = 0.0;
  for (double v : m.values) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : m.values) {
    const double d = v - mean;
    var += d * d;
  }
  var /= count;
  if (var <= 0.0) {
    throw ValueError("auto gamma undefined: pooled feature variance is zero");
  }
  return 1.0 / (static_cast<double>(m.cols()) * var);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y,
                  double gamma) {
  if (x.size() != y.size()) {
    throw ValueError("rbf kernel requires vectors of equal dimension");
  }
  return std::exp(-gamma * sq_dist(x, y));
}

SvmModel svm_fit(const FeatureMatrix& m, const SvmParams& params) {
  if (m.rows < 2) throw ValueError("svm_fit requires at least two rows");
  bool has0 = false, has1 = false;
  for (int lbl : m.labels) {
    if (lbl == 0) has0 = true;
    if (lbl == 1) has1 = true;
  }
  if (!has0 || !has1) {
    throw ValueError("svm_fit requires both classes in the training data");
  }
  if (params.c <= 0.0) throw ValueError("svm penalty c must be positive");

  double gamma = 0.0;
  if (params.kernel == KernelKind::rbf) {
    gamma = params.gamma ? *params.gamma : auto_gamma(m);
    if (gamma <= 0.0) throw ValueError("rbf gamma must be positive");
  }

  Smo smo(m, params, gamma);
  const bool converged = smo.solve();

  SvmModel model;
  model.kernel = params.kernel;
  model.gamma = gamma;
  model.c = params.c;
  model.bias = smo.bias();
  model.dim = m.cols();
  model.converged = converged;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (smo.alpha()[i] > 0.0) {
      auto row = m.row(i);
      model.sv_values.insert(model.sv_values.end(), row.begin(), row.end());
      model.sv_coef.push_back(smo.alpha()[i] * smo.y()[i]);
    }
  }
  return model;
}

double SvmModel::decision(std::span<const double> x) const {
  if (x.size() != dim) {
    throw ValueError("svm decision input has wrong dimension");
  }
  double f = bias;
  for (std::size_t i = 0; i < n_sv(); ++i) {
    const double k = kernel == KernelKind::linear
                         ? dot(sv(i), x)
                         : std::exp(-gamma * sq_dist(sv(i), x));
    f += sv_coef[i] * k;
  }
  return f;
}

int SvmModel::predict(std::span<const double> x) const {
  return decision(x) >= 0.0 ? 1 : 0;
}

int svm_predict(const SvmModel& model, std::span<const double> x) {
  return model.predict(x);
}

}  // namespace occdet
