#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mcu/baselines.hpp"
#include "mcu/errors.hpp"
#include "mcu/model.hpp"
#include "mcu/rng.hpp"
#include "oracles.hpp"

using namespace mcu;

namespace {

ModelSpec logistic_spec(double prior_var) {
  ModelSpec s;
  s.family = Family::LogisticRegression;
  s.prior_variance = prior_var;
  return s;
}

ModelSpec poly_spec(Family family, unsigned degree, double prior_var,
                    double noise_var = 1.0) {
  ModelSpec s;
  s.family = family;
  s.feature_map = FeatureMapKind::Polynomial;
  s.poly_degree = degree;
  s.prior_variance = prior_var;
  s.noise_variance = noise_var;
  return s;
}

LabeledDataset random_dataset(Rng& rng, std::size_t n, std::size_t feature_dim,
                              Task task) {
  LabeledDataset d;
  d.feature_dim = feature_dim;
  d.task = task;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledDataset::Row row;
    for (std::size_t j = 0; j < feature_dim; ++j) {
      row.features.push_back(2.0 * rng.uniform() - 1.0);
    }
    row.label = task == Task::BinaryClassification
                    ? static_cast<double>(rng.below(2))
                    : rng.normal();
    d.rows.push_back(std::move(row));
  }
  return d;
}

ParameterVector random_theta(Rng& rng, std::size_t dim, double scale = 1.0) {
  ParameterVector t;
  for (std::size_t j = 0; j < dim; ++j) t.values.push_back(scale * rng.normal());
  return t;
}

}  // namespace

TEST_CASE("log_prior matches the standard normal mode density") {
  ModelSpec s = logistic_spec(1.0);
  s.feature_map = FeatureMapKind::Polynomial;
  s.poly_degree = 1;  // irrelevant: prior depends only on theta
  CHECK(log_prior(s, ParameterVector{0.0}) ==
        doctest::Approx(-0.918938533204672742).epsilon(1e-12));
}

TEST_CASE("log_prior sums identical mode densities") {
  ModelSpec s = logistic_spec(5.0);
  ParameterVector theta(std::vector<double>(5, 0.0));
  const double expected = 5.0 * (-0.5 * std::log(2.0 * M_PI * 5.0));
  CHECK(log_prior(s, theta) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("log_prior agrees with an extended-precision evaluation") {
  Rng rng(42);
  ModelSpec s = logistic_spec(3.0);
  const ParameterVector theta = random_theta(rng, 9, 2.0);
  const long double expected =
      oracles::gaussian_log_density_sum(theta.values, 0.0L, 3.0L);
  CHECK(log_prior(s, theta) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-14));
}

TEST_CASE("log_likelihood of an empty dataset is zero") {
  LabeledDataset empty;
  empty.feature_dim = 3;
  CHECK(log_likelihood(logistic_spec(1.0), ParameterVector{0, 0, 0, 0}, empty) ==
        0.0);
}

TEST_CASE("zero logit gives probability one half") {
  ModelSpec s = logistic_spec(1.0);
  LabeledDataset d;
  d.feature_dim = 2;
  d.rows.push_back({{0.7, -1.3}, 1.0});
  const ParameterVector theta{0.0, 0.0, 0.0};
  CHECK(log_likelihood(s, theta, d) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("logistic likelihood matches the naive formula where representable") {
  Rng rng(7);
  ModelSpec s = poly_spec(Family::LogisticRegression, 4, 5.0);
  LabeledDataset d = random_dataset(rng, 10, 1, Task::BinaryClassification);
  const ParameterVector theta = random_theta(rng, 5, 0.8);
  const long double expected = oracles::naive_logistic_log_likelihood(s, theta, d);
  CHECK(log_likelihood(s, theta, d) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
}

TEST_CASE("log_joint equals log_prior on empty data and is additive") {
  Rng rng(11);
  ModelSpec s = logistic_spec(2.0);
  LabeledDataset d = random_dataset(rng, 30, 4, Task::BinaryClassification);
  const ParameterVector theta = random_theta(rng, 5);

  LabeledDataset empty;
  empty.feature_dim = 4;
  CHECK(log_joint(s, theta, empty) == log_prior(s, theta));

  std::vector<std::size_t> erased{1, 4, 9, 20, 28};
  const LabeledDataset de = d.subset(erased);
  const LabeledDataset dr = d.without(erased);
  const double lhs = log_joint(s, theta, d) - log_joint(s, theta, dr);
  const double rhs = log_likelihood(s, theta, de);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("grid argmax of the conjugate log_joint sits at the analytic mode") {
  Rng rng(13);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 4.0;
  s.noise_variance = 0.25;
  LabeledDataset d;
  d.feature_dim = 1;
  d.task = Task::Regression;
  for (int i = 0; i < 40; ++i) {
    const double x = 2.0 * rng.uniform() - 1.0;
    d.rows.push_back({{x}, 1.0 + 0.5 * x + 0.5 * rng.normal()});
  }
  const auto post = oracles::conjugate_posterior(s, d);

  double best = -1e300;
  double best_a = 0.0, best_b = 0.0;
  const double step = 0.02;
  for (double a = post.mean(0) - 0.5; a <= post.mean(0) + 0.5; a += step) {
    for (double b = post.mean(1) - 0.5; b <= post.mean(1) + 0.5; b += step) {
      const double v = log_joint(s, ParameterVector{a, b}, d);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  CHECK(std::fabs(best_a - post.mean(0)) <= step);
  CHECK(std::fabs(best_b - post.mean(1)) <= step);
}

TEST_CASE("predict basics and saturation behaviour") {
  ModelSpec s = logistic_spec(1.0);
  CHECK(predict(s, ParameterVector{0, 0, 0}, std::vector<double>{3.0, -4.0}) ==
        0.5);

  ModelSpec lin = poly_spec(Family::LinearRegression, 4, 4.0, 0.01);
  for (double x : {-1.0, 0.0, 0.3, 1.0}) {
    CHECK(predict(lin, ParameterVector{1, 0, 0, 0, 0}, std::vector<double>{x}) ==
          1.0);
  }

  // logit 40: finite, below 1, within 1e-9 of it
  ModelSpec s1 = logistic_spec(1.0);
  const double p =
      predict(s1, ParameterVector{0.0, 40.0}, std::vector<double>{1.0});
  CHECK(p < 1.0);
  CHECK(p > 1.0 - 1e-9);
  const double pn =
      predict(s1, ParameterVector{0.0, -40.0}, std::vector<double>{1.0});
  CHECK(pn > 0.0);
  CHECK(pn < 1e-9);
}

TEST_CASE("gradient of the prior alone is -theta / v") {
  Rng rng(17);
  ModelSpec s = logistic_spec(2.5);
  LabeledDataset empty;
  empty.feature_dim = 4;
  const ParameterVector theta = random_theta(rng, 5);
  const ParameterVector g = grad_log_joint(s, theta, empty);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(g.values[j] == doctest::Approx(-theta.values[j] / 2.5).epsilon(1e-14));
  }
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(19);
  for (int rep = 0; rep < 6; ++rep) {
    const bool logistic = rep % 2 == 0;
    ModelSpec s;
    s.family = logistic ? Family::LogisticRegression : Family::LinearRegression;
    s.prior_variance = 1.5;
    s.noise_variance = 0.5;
    const std::size_t fdim = 1 + rng.below(9);
    LabeledDataset d = random_dataset(
        rng, 5 + rng.below(45), fdim,
        logistic ? Task::BinaryClassification : Task::Regression);
    const ParameterVector theta = random_theta(rng, s.parameter_dim(fdim), 0.5);
    const ParameterVector g = grad_log_joint(s, theta, d);
    const auto fd = oracles::finite_difference_gradient(
        [&](const ParameterVector& t) { return log_joint(s, t, d); }, theta);
    for (std::size_t j = 0; j < g.dim(); ++j) {
      CHECK(std::fabs(g.values[j] - fd[j]) < 1e-4);
    }
  }
}

TEST_CASE("gradient vanishes at the trained MAP point") {
  Rng rng(23);
  ModelSpec s = logistic_spec(2.0);
  LabeledDataset d = random_dataset(rng, 40, 3, Task::BinaryClassification);
  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e-8;
  const TrainResult r = train_map(s, d, cfg);
  REQUIRE(r.converged);
  const ParameterVector g = grad_log_joint(s, r.theta, d);
  double norm = 0.0;
  for (double v : g.values) norm = std::fmax(norm, std::fabs(v));
  CHECK(norm < 1e-6);
}

TEST_CASE("likelihood is permutation invariant") {
  Rng rng(29);
  ModelSpec s = logistic_spec(1.0);
  LabeledDataset d = random_dataset(rng, 25, 3, Task::BinaryClassification);
  const ParameterVector theta = random_theta(rng, 4);
  const double base = log_likelihood(s, theta, d);

  LabeledDataset same_order = d;
  CHECK(log_likelihood(s, theta, same_order) == base);  // bit-for-bit

  LabeledDataset reversed = d;
  std::reverse(reversed.rows.begin(), reversed.rows.end());
  CHECK(log_likelihood(s, theta, reversed) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("stable log-likelihood survives extreme logits") {
  ModelSpec s = logistic_spec(1.0);
  LabeledDataset d;
  d.feature_dim = 1;
  d.rows.push_back({{1.0}, 1.0});
  d.rows.push_back({{1.0}, 0.0});
  const double ll = log_likelihood(s, ParameterVector{0.0, 800.0}, d);
  CHECK(std::isfinite(ll));
  CHECK(ll == doctest::Approx(-800.0).epsilon(1e-12));
}

TEST_CASE("model_core error paths") {
  ModelSpec s = logistic_spec(1.0);
  LabeledDataset d;
  d.feature_dim = 2;
  d.rows.push_back({{1.0, 2.0}, 1.0});

  CHECK_THROWS_AS(log_likelihood(s, ParameterVector{0.0}, d),
                  InvalidArgumentError);
  CHECK_THROWS_AS(predict(s, ParameterVector{0.0}, std::vector<double>{1.0, 2.0}),
                  InvalidArgumentError);

  LabeledDataset bad = d;
  bad.rows[0].label = 2.0;
  CHECK_THROWS_AS(log_likelihood(s, ParameterVector{0, 0, 0}, bad), DataError);

  ModelSpec badspec = s;
  badspec.prior_variance = 0.0;
  CHECK_THROWS_AS(log_prior(badspec, ParameterVector{0.0}), InvalidArgumentError);
}
