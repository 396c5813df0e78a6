#pragma once

#include <span>
#include <vector>

#include "occdet/lbfgs.hpp"
#include "occdet/types.hpp"

namespace occdet {

struct LgrParams {
  double c = 10.0;  // inverse regularization weight on the data term
  LbfgsParams optimizer;
};

// L2-regularized logistic regression. The fit minimizes
//   0.5 * ||w||^2 + c * sum_i log(1 + exp(-t_i * (w.x_i + b)))
// with t_i in {-1,+1}; the intercept is not penalized.
struct LgrModel {
  std::size_t dim = 0;
  std::vector<double> weights;
  double intercept = 0.0;

  double probability(std::span<const double> x) const;  // P(class 1 | x)
  int predict(std::span<const double> x) const;         // 1 iff prob >= 0.5
};

LgrModel lgr_fit(const FeatureMatrix& m, const LgrParams& params = {});

// The fit's objective and analytic gradient over the packed parameter vector
// [w_0 .. w_{d-1}, intercept]. Exposed so the analytic gradient can be
// checked against finite differences; the returned callables own copies of
// the training data and stay valid after the matrix is destroyed.
struct LgrProblem {
  Objective objective;
  Gradient gradient;
};
LgrProblem lgr_problem(const FeatureMatrix& m, double c);

// Numerically stable log(1 + exp(u)).
double log1pexp(double u);

}  // namespace occdet
