#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "occdet/lbfgs.hpp"
#include "occdet/logistic.hpp"
#include "occdet/rng.hpp"
#include "test_util.hpp"

using namespace occdet;

namespace {

double rosenbrock(const std::vector<double>& x) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

std::vector<double> rosenbrock_grad(const std::vector<double>& x) {
  const double b = x[1] - x[0] * x[0];
  return {-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b};
}

}  // namespace

TEST_CASE("lbfgs drives a quadratic bowl below 1e-10 from (3,4)") {
  const auto f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += 0.5 * v * v;
    return s;
  };
  const auto g = [](const std::vector<double>& x) { return x; };
  const LbfgsResult res = lbfgs_minimize(f, g, {3.0, 4.0});
  CHECK(res.converged);
  CHECK(res.fx < 1e-10);
  CHECK(std::abs(res.x[0]) < 1e-5);
  CHECK(std::abs(res.x[1]) < 1e-5);
  CHECK(res.fx <= f({3.0, 4.0}));
}

TEST_CASE("lbfgs reaches f < 1e-8 on Rosenbrock from (-1.2, 1)") {
  const LbfgsResult res = lbfgs_minimize(rosenbrock, rosenbrock_grad,
                                         {-1.2, 1.0});
  CHECK(res.converged);
  CHECK(res.fx < 1e-8);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("full-memory lbfgs finishes an SPD quadratic in <= dim+1 iters") {
  // f(x) = 0.5 x'Ax - b'x with A = B'B + I (symmetric positive definite).
  const std::size_t dim = 5;
  Rng rng(11);
  std::vector<double> B(dim * dim);
  for (double& v : B) v = rng.uniform(-1.0, 1.0);
  std::vector<double> A(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < dim; ++k) {
        A[i * dim + j] += B[k * dim + i] * B[k * dim + j];
      }
    }
    A[i * dim + i] += 1.0;
  }
  std::vector<double> b(dim);
  for (double& v : b) v = rng.uniform(-2.0, 2.0);

  const auto mat_vec = [&](const std::vector<double>& x) {
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) out[i] += A[i * dim + j] * x[j];
    }
    return out;
  };
  const auto f = [&](const std::vector<double>& x) {
    const auto ax = mat_vec(x);
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += 0.5 * x[i] * ax[i] - b[i] * x[i];
    return s;
  };
  const auto g = [&](const std::vector<double>& x) {
    auto out = mat_vec(x);
    for (std::size_t i = 0; i < dim; ++i) out[i] -= b[i];
    return out;
  };

  LbfgsParams params;
  params.memory = 64;  // effectively unlimited for dim 5
  const LbfgsResult res = lbfgs_minimize(f, g, std::vector<double>(dim, 0.0),
                                         params);
  CHECK(res.converged);
  CHECK(res.iterations <= static_cast<int>(dim) + 1);
}

TEST_CASE("accepted lbfgs iterates never increase the objective") {
  // The gradient is evaluated exactly once per accepted iterate, so the
  // objective value at each gradient call must be non-increasing.
  std::vector<double> accepted_values;
  const auto f = rosenbrock;
  const auto g = [&](const std::vector<double>& x) {
    accepted_values.push_back(rosenbrock(x));
    return rosenbrock_grad(x);
  };
  const LbfgsResult res = lbfgs_minimize(f, g, {-1.2, 1.0});
  CHECK(res.converged);
  REQUIRE(accepted_values.size() >= 2);
  for (std::size_t i = 1; i < accepted_values.size(); ++i) {
    CHECK(accepted_values[i] <= accepted_values[i - 1]);
  }
}

TEST_CASE("lbfgs is deterministic and validates parameters") {
  const LbfgsResult a = lbfgs_minimize(rosenbrock, rosenbrock_grad,
                                       {-1.2, 1.0});
  const LbfgsResult b = lbfgs_minimize(rosenbrock, rosenbrock_grad,
                                       {-1.2, 1.0});
  CHECK(a.x == b.x);
  CHECK(a.fx == b.fx);
  CHECK(a.iterations == b.iterations);

  LbfgsParams bad;
  bad.memory = 0;
  CHECK_THROWS_AS(
      lbfgs_minimize(rosenbrock, rosenbrock_grad, {0.0, 0.0}, bad),
      ValueError);

  // Hitting the iteration cap reports converged = false instead of throwing.
  LbfgsParams tight;
  tight.max_iters = 2;
  const LbfgsResult capped = lbfgs_minimize(rosenbrock, rosenbrock_grad,
                                            {-1.2, 1.0}, tight);
  CHECK(!capped.converged);

  // Non-finite objective at the start is an error.
  const auto inf_f = [](const std::vector<double>&) {
    return std::numeric_limits<double>::infinity();
  };
  const auto zero_g = [](const std::vector<double>& x) {
    return std::vector<double>(x.size(), 0.0);
  };
  CHECK_THROWS_AS(lbfgs_minimize(inf_f, zero_g, {0.0}), ConvergenceError);
}

TEST_CASE("finite differences recover x^2 derivative at x=3") {
  const auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
  const auto g = finite_diff_grad(f, {3.0}, 1e-5);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("finite differences of a constant are zero") {
  const auto f = [](const std::vector<double>&) { return 4.25; };
  const auto g = finite_diff_grad(f, {1.0, -2.0, 0.5});
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("analytic logistic gradient matches finite differences") {
  Rng rng(21);
  const FeatureMatrix m = testutil::random_dataset(30, 3, rng);
  const LgrProblem problem = lgr_problem(m, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(m.cols() + 1);
    for (double& v : p) v = rng.uniform(-2.0, 2.0);
    const auto analytic = problem.gradient(p);
    const auto numeric = finite_diff_grad(problem.objective, p);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      num = std::max(num, std::abs(analytic[i] - numeric[i]));
      den = std::max(den, std::abs(analytic[i]));
    }
    CHECK(num / std::max(1.0, den) <= 1e-5);
  }
}

TEST_CASE("regularized logistic loss on a separable 4-point set converges") {
  const FeatureMatrix m = testutil::make_matrix(
      1, {-2.0, -1.0, 1.0, 2.0}, {0, 0, 1, 1});
  const LgrProblem problem = lgr_problem(m, 10.0);
  const LbfgsResult res = lbfgs_minimize(problem.objective, problem.gradient,
                                         {0.0, 0.0});
  CHECK(res.converged);
  for (double v : res.x) CHECK(std::isfinite(v));
}
