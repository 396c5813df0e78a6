#include "occdet/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <string>

namespace occdet {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, const Gradient& g,
                           std::vector<double> x0, const LbfgsParams& params) {
  if (params.memory < 1) throw ValueError("lbfgs memory must be >= 1");
  if (params.grad_tolerance <= 0) throw ValueError("lbfgs gradient tolerance must be > 0");

  const std::size_t dim = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  res.fx = f(res.x);
  if (!std::isfinite(res.fx)) {
    throw ConvergenceError("objective is non-finite at the starting point");
  }
  std::vector<double> grad = g(res.x);
  if (grad.size() != dim || !all_finite(grad)) {
    throw ConvergenceError("gradient is non-finite at the starting point");
  }

  std::deque<Pair> pairs;
  std::vector<double> direction(dim), x_trial(dim), alpha_coef;

  for (res.iterations = 0; res.iterations < params.max_iters; ++res.iterations) {
    if (inf_norm(grad) <= params.grad_tolerance) {
      res.converged = true;
      return res;
    }

    // Two-loop recursion: direction = -H_k * grad.
    direction = grad;
    alpha_coef.assign(pairs.size(), 0.0);
    for (std::size_t i = pairs.size(); i-- > 0;) {
      const Pair& p = pairs[i];
      alpha_coef[i] = p.rho * dot(p.s, direction);
      for (std::size_t j = 0; j < dim; ++j) direction[j] -= alpha_coef[i] * p.y[j];
    }
    if (!pairs.empty()) {
      const Pair& last = pairs.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Pair& p = pairs[i];
      const double beta = p.rho * dot(p.y, direction);
      for (std::size_t j = 0; j < dim; ++j) direction[j] += (alpha_coef[i] - beta) * p.s[j];
    }
    for (double& v : direction) v = -v;

    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      // Numerical breakdown of the curvature estimate; restart from steepest
      // descent.
      pairs.clear();
      for (std::size_t j = 0; j < dim; ++j) direction[j] = -grad[j];
      slope = dot(grad, direction);
      if (!(slope < 0.0)) {
        res.converged = inf_norm(grad) <= params.grad_tolerance;
        return res;
      }
    }

    // Backtracking Armijo line search starting at the unit step. When a step
    // is accepted, also try the minimizer of the parabola interpolating
    // (phi(0), phi'(0), phi(alpha)); for quadratic objectives that candidate
    // is the exact line minimizer, which restores the finite-termination
    // behavior of full BFGS.
    double alpha = 1.0;
    double f_trial = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings <= params.max_halvings; ++halvings) {
      for (std::size_t j = 0; j < dim; ++j) x_trial[j] = res.x[j] + alpha * direction[j];
      f_trial = f(x_trial);
      if (std::isfinite(f_trial) &&
          f_trial <= res.fx + params.armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= params.backtrack_shrink;
    }
    if (!accepted) {
      throw ConvergenceError("line search failed after " +
                             std::to_string(params.max_halvings) + " halvings");
    }

    const double denom = 2.0 * (f_trial - res.fx - alpha * slope);
    if (denom > 0.0) {
      const double alpha_q = -slope * alpha * alpha / denom;
      if (std::isfinite(alpha_q) && alpha_q > 0.0 && alpha_q != alpha) {
        std::vector<double> x_q(dim);
        for (std::size_t j = 0; j < dim; ++j) x_q[j] = res.x[j] + alpha_q * direction[j];
        const double f_q = f(x_q);
        if (std::isfinite(f_q) && f_q < f_trial &&
            f_q <= res.fx + params.armijo_c1 * alpha_q * slope) {
          alpha = alpha_q;
          f_trial = f_q;
          x_trial = std::move(x_q);
        }
      }
    }

    std::vector<double> grad_new = g(x_trial);
    if (grad_new.size() != dim || !all_finite(grad_new)) {
      throw ConvergenceError("gradient is non-finite at a line search point");
    }

    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      p.s[j] = x_trial[j] - res.x[j];
      p.y[j] = grad_new[j] - grad[j];
    }
    double sy = dot(p.s, p.y);

    // Powell damping against the initial matrix B0 = I/gamma. A backtracking
    // line search does not enforce the curvature condition, so s'y can come
    // out non-positive; silently skipping those pairs freezes the memory and
    // stalls the iteration in curved valleys. Blending y toward B0*s keeps
    // s'y >= kDampFloor * s'B0 s, so every step refreshes the memory. The
    // floor is small enough that well-scaled steps (s'y comfortably positive,
    // e.g. exact line minimizers on convex quadratics) are stored unmodified.
    constexpr double kDampFloor = 0.01;
    const double gamma0 =
        pairs.empty()
            ? 1.0
            : dot(pairs.back().s, pairs.back().y) /
                  dot(pairs.back().y, pairs.back().y);
    const double s_b0_s = dot(p.s, p.s) / gamma0;
    if (s_b0_s > 0.0 && std::isfinite(s_b0_s)) {
      if (sy < kDampFloor * s_b0_s) {
        const double theta = (1.0 - kDampFloor) * s_b0_s / (s_b0_s - sy);
        for (std::size_t j = 0; j < dim; ++j) {
          p.y[j] = theta * p.y[j] + (1.0 - theta) * p.s[j] / gamma0;
        }
        sy = dot(p.s, p.y);
      }
      if (sy > 0.0 && std::isfinite(1.0 / sy)) {
        p.rho = 1.0 / sy;
        pairs.push_back(std::move(p));
        if (pairs.size() > static_cast<std::size_t>(params.memory)) {
          pairs.pop_front();
        }
      }
    }

    res.x = std::move(x_trial);
    x_trial.resize(dim);
    res.fx = f_trial;
    grad = std::move(grad_new);
  }

  res.converged = inf_norm(grad) <= params.grad_tolerance;
  return res;
}

std::vector<double> finite_diff_grad(const Objective& f, const std::vector<double>& x,
                                     double h) {
  if (h <= 0) throw ValueError("finite difference step must be positive");
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw ConvergenceError("objective is non-finite near the probe point");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace occdet
