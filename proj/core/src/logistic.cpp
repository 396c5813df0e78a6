#include "occdet/logistic.hpp"

#include <cmath>
#include <memory>

namespace occdet {

double log1pexp(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LgrProblem lgr_problem(const FeatureMatrix& m, double c) {
  const std::size_t d = m.cols();
  const std::size_t n = m.rows;
  if (n < 1 || d == 0) {
    throw ValueError("lgr objective requires a non-empty matrix");
  }
  if (c <= 0.0) throw ValueError("lgr penalty c must be positive");

  // The closures own the training data so they outlive the matrix.
  struct Data {
    std::size_t d = 0;
    std::size_t n = 0;
    double c = 0.0;
    std::vector<double> values;
    std::vector<double> t;  // labels mapped to {-1, +1}
  };
  auto data = std::make_shared<Data>();
  data->d = d;
  data->n = n;
  data->c = c;
  data->values = m.values;
  data->t.resize(n);
  for (std::size_t i = 0; i < n; ++i) data->t[i] = m.labels[i] == 1 ? 1.0 : -1.0;

  // Parameter vector: [w_0 .. w_{d-1}, intercept].
  LgrProblem problem;
  problem.objective = [data](const std::vector<double>& p) {
    const std::size_t d = data->d;
    double f = 0.0;
    for (std::size_t c = 0; c < d; ++c) f += 0.5 * p[c] * p[c];
    for (std::size_t i = 0; i < data->n; ++i) {
      double z = p[d];
      const double* row = data->values.data() + i * d;
      for (std::size_t c = 0; c < d; ++c) z += p[c] * row[c];
      f += data->c * log1pexp(-data->t[i] * z);
    }
    return f;
  };
  problem.gradient = [data](const std::vector<double>& p) {
    const std::size_t d = data->d;
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t c = 0; c < d; ++c) g[c] = p[c];
    for (std::size_t i = 0; i < data->n; ++i) {
      double z = p[d];
      const double* row = data->values.data() + i * d;
      for (std::size_t c = 0; c < d; ++c) z += p[c] * row[c];
      const double coef = -data->c * data->t[i] * sigmoid(-data->t[i] * z);
      for (std::size_t c = 0; c < d; ++c) g[c] += coef * row[c];
      g[d] += coef;
    }
    return g;
  };
  return problem;
}

LgrModel lgr_fit(const FeatureMatrix& m, const LgrParams& params) {
  const std::size_t d = m.cols();
  const std::size_t n = m.rows;
  if (n < 2 || d == 0) {
    throw ValueError("lgr_fit requires at least two rows and one feature");
  }
  bool has0 = false, has1 = false;
  for (int lbl : m.labels) {
    if (lbl == 0) has0 = true;
    if (lbl == 1) has1 = true;
  }
  if (!has0 || !has1) {
    throw ValueError("lgr_fit requires both classes in the training data");
  }

  const LgrProblem problem = lgr_problem(m, params.c);
  std::vector<double> x0(d + 1, 0.0);
  const LbfgsResult res =
      lbfgs_minimize(problem.objective, problem.gradient, x0, params.optimizer);

  LgrModel model;
  model.dim = d;
  model.weights.assign(res.x.begin(), res.x.begin() + static_cast<long>(d));
  model.intercept = res.x[d];
  return model;
}

double LgrModel::probability(std::span<const double> x) const {
  if (x.size() != dim) {
    throw ValueError("lgr probability input has wrong dimension");
  }
  double z = intercept;
  for (std::size_t c = 0; c < dim; ++c) z += weights[c] * x[c];
  return sigmoid(z);
}

int LgrModel::predict(std::span<const double> x) const {
  return probability(x) >= 0.5 ? 1 : 0;
}

}  // namespace occdet
