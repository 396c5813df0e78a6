#pragma once

#include <functional>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

using Objective = std::function<double(const std::vector<double>&)>;
using Gradient = std::function<std::vector<double>(const std::vector<double>&)>;

struct LbfgsParams {
  int memory = 10;              // stored (s, y) pairs
  double grad_tolerance = 1e-8; // infinity norm
  int max_iters = 500;
  double armijo_c1 = 1e-4;
  double backtrack_shrink = 0.5;
  int max_halvings = 50;
};

struct LbfgsResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS with a backtracking Armijo line search. Curvature pairs
// with s'y <= 1e-10 are skipped to keep the implicit Hessian positive
// definite. Throws ConvergenceError on non-finite values or a failed line
// search; hitting max_iters returns converged = false.
LbfgsResult lbfgs_minimize(const Objective& f, const Gradient& g,
                           std::vector<double> x0, const LbfgsParams& params = {});

// Central-difference gradient; test oracle for analytic gradients.
std::vector<double> finite_diff_grad(const Objective& f, const std::vector<double>& x,
                                     double h = 1e-5);

}  // namespace occdet
