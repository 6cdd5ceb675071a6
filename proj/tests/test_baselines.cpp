#include <doctest.h>

#include <cmath>

#include "mcu/baselines.hpp"
#include "mcu/errors.hpp"
#include "mcu/harness/synthetic.hpp"
#include "mcu/metrics.hpp"
#include "mcu/model.hpp"
#include "mcu/rng.hpp"
#include "oracles.hpp"

using namespace mcu;

namespace {

LabeledDataset regression_data(Rng& rng, int n) {
  LabeledDataset d;
  d.feature_dim = 1;
  d.task = Task::Regression;
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * rng.uniform() - 1.0;
    d.rows.push_back({{x}, 1.2 + 0.4 * x + 0.3 * rng.normal()});
  }
  return d;
}

}  // namespace

TEST_CASE("train_map reaches the closed-form conjugate mode") {
  Rng rng(101);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 4.0;
  s.noise_variance = 0.09;
  const LabeledDataset d = regression_data(rng, 50);

  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e-9;
  const TrainResult r = train_map(s, d, cfg);
  REQUIRE(r.converged);

  const auto post = oracles::conjugate_posterior(s, d);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::fabs(r.theta.values[j] - post.mean(j)) < 1e-5);
  }
}

TEST_CASE("prior regularizes the separable all-ones dataset") {
  ModelSpec s;
  s.family = Family::LogisticRegression;
  s.prior_variance = 2.0;
  LabeledDataset d;
  d.feature_dim = 1;
  d.task = Task::BinaryClassification;
  Rng rng(5);
  for (int i = 0; i < 12; ++i) d.rows.push_back({{rng.uniform()}, 1.0});

  OptimizerConfig cfg;
  const TrainResult r = train_map(s, d, cfg);
  CHECK(r.converged);
  CHECK(r.grad_inf_norm <= cfg.grad_tolerance);
  CHECK(r.theta.all_finite());
}

TEST_CASE("symmetric two-point dataset forces a zero bias") {
  ModelSpec s;
  s.family = Family::LogisticRegression;
  s.prior_variance = 3.0;
  LabeledDataset d;
  d.feature_dim = 1;
  d.task = Task::BinaryClassification;
  d.rows.push_back({{0.8}, 1.0});
  d.rows.push_back({{-0.8}, 0.0});

  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e-9;
  const TrainResult r = train_map(s, d, cfg);
  REQUIRE(r.converged);
  CHECK(std::fabs(r.theta.values[0]) < 1e-6);
}

TEST_CASE("train_map is deterministic") {
  Rng rng(7);
  ModelSpec s;
  s.family = Family::LogisticRegression;
  s.prior_variance = 5.0;
  LabeledDataset d;
  d.feature_dim = 2;
  d.task = Task::BinaryClassification;
  for (int i = 0; i < 25; ++i) {
    const double a = rng.normal(), b = rng.normal();
    d.rows.push_back({{a, b}, a + b > 0 ? 1.0 : 0.0});
  }
  OptimizerConfig cfg;
  const TrainResult r1 = train_map(s, d, cfg);
  const TrainResult r2 = train_map(s, d, cfg);
  CHECK(r1.theta.values == r2.theta.values);
}

TEST_CASE("retrain with nothing erased reproduces train_map bit-for-bit") {
  Rng rng(11);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 1.0;
  s.noise_variance = 0.25;
  const LabeledDataset d = regression_data(rng, 30);
  OptimizerConfig cfg;
  const TrainResult a = train_map(s, d, cfg);
  const TrainResult b = retrain(s, d, std::vector<std::size_t>{}, cfg);
  CHECK(a.theta.values == b.theta.values);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("erasing one copy of a duplicated row removes exactly its term") {
  Rng rng(13);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 1.0;
  s.noise_variance = 0.25;
  LabeledDataset d = regression_data(rng, 20);
  d.rows.push_back(d.rows[4]);  // duplicate row 4 at index 20

  const LabeledDataset row4only = d.subset(std::vector<std::size_t>{4});
  const LabeledDataset without_copy = d.without(std::vector<std::size_t>{20});
  for (int rep = 0; rep < 5; ++rep) {
    const ParameterVector theta{rng.normal(), rng.normal()};
    const double full = log_joint(s, theta, d);
    const double reduced = log_joint(s, theta, without_copy);
    const double term = log_likelihood(s, theta, row4only);
    CHECK(full - reduced == doctest::Approx(term).epsilon(1e-9));
  }

  OptimizerConfig cfg;
  const TrainResult a = retrain(s, d, std::vector<std::size_t>{20}, cfg);
  const TrainResult b = train_map(s, without_copy, cfg);
  CHECK(a.theta.values == b.theta.values);
}

TEST_CASE("retraining reacts most where the erased cluster lived") {
  const auto scenario = harness::generate_synthetic("linreg-appendix", 3);
  OptimizerConfig cfg;
  const TrainResult trained = train_map(scenario.model, scenario.data, cfg);
  const TrainResult retrained =
      retrain(scenario.model, scenario.data, scenario.erased_indices, cfg);

  // erased x sit in [-1,-0.6]; compare prediction change there vs elsewhere
  auto mean_abs_change = [&](double lo, double hi) {
    double sum = 0.0;
    int n = 0;
    for (double x = lo; x <= hi + 1e-9; x += (hi - lo) / 40.0) {
      const std::vector<double> xv{x};
      sum += std::fabs(predict(scenario.model, trained.theta, xv) -
                       predict(scenario.model, retrained.theta, xv));
      ++n;
    }
    return sum / n;
  };
  CHECK(mean_abs_change(-1.0, -0.6) > mean_abs_change(-0.6, 1.0));
}

TEST_CASE("naive unlearner leaves theta unchanged at zero iterations") {
  const auto scenario = harness::generate_synthetic("linreg-appendix", 3);
  OptimizerConfig cfg;
  const TrainResult trained = train_map(scenario.model, scenario.data, cfg);
  const LabeledDataset erased = scenario.data.subset(scenario.erased_indices);
  const ParameterVector out =
      naive_unlearn(scenario.model, trained.theta, erased, 0, cfg);
  CHECK(out.values == trained.theta.values);
}

TEST_CASE("naive descent wrecks the remaining-data fit") {
  const auto scenario = harness::generate_synthetic("linreg-appendix", 3);
  OptimizerConfig cfg;
  const TrainResult trained = train_map(scenario.model, scenario.data, cfg);
  const LabeledDataset erased = scenario.data.subset(scenario.erased_indices);
  const LabeledDataset remaining = scenario.data.without(scenario.erased_indices);

  OptimizerConfig naive_cfg;
  naive_cfg.learning_rate = 1e-5;
  const double mse0 = mean_squared_error(scenario.model, trained.theta, remaining);
  const ParameterVector t100 =
      naive_unlearn(scenario.model, trained.theta, erased, 100, naive_cfg);
  CHECK(mean_squared_error(scenario.model, t100, remaining) > mse0);

  // the erased-data objective trace is non-increasing step by step
  double prev = log_joint(scenario.model, trained.theta, erased);
  for (std::uint64_t iters = 1; iters <= 30; ++iters) {
    const ParameterVector t =
        naive_unlearn(scenario.model, trained.theta, erased, iters, naive_cfg);
    const double obj = log_joint(scenario.model, t, erased);
    CHECK(obj <= prev + 1e-9);
    prev = obj;
  }
}

TEST_CASE("influence step with nothing erased is the identity") {
  Rng rng(17);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 1.0;
  s.noise_variance = 0.25;
  const LabeledDataset d = regression_data(rng, 25);
  OptimizerConfig cfg;
  const TrainResult trained = train_map(s, d, cfg);
  const ParameterVector out =
      influence_unlearn(s, trained.theta, d, std::vector<std::size_t>{});
  CHECK(out.values == trained.theta.values);
}

TEST_CASE("influence step is exact on the conjugate quadratic") {
  const auto scenario = harness::generate_synthetic("linreg-appendix", 3);
  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e-10;
  const TrainResult trained = train_map(scenario.model, scenario.data, cfg);

  const ParameterVector corrected = influence_unlearn(
      scenario.model, trained.theta, scenario.data, scenario.erased_indices);
  const auto post = oracles::conjugate_posterior(
      scenario.model, scenario.data.without(scenario.erased_indices));
  for (std::size_t j = 0; j < corrected.dim(); ++j) {
    CHECK(std::fabs(corrected.values[j] - post.mean(j)) < 1e-8);
  }
}

TEST_CASE("influence error grows with the size of the erased cluster") {
  Rng rng(23);
  ModelSpec s;
  s.family = Family::LogisticRegression;
  s.prior_variance = 5.0;
  LabeledDataset d;
  d.feature_dim = 2;
  d.task = Task::BinaryClassification;
  // two blobs plus an off-cluster of positives that erasure will target
  for (int i = 0; i < 300; ++i) {
    const double a = rng.normal(), b = rng.normal();
    d.rows.push_back({{a + 1.0, b}, 1.0});
    d.rows.push_back({{a - 1.0 - 2.0 * rng.uniform(), b}, 0.0});
  }
  for (int i = 0; i < 100; ++i) {
    d.rows.push_back({{-2.0 + 0.2 * rng.normal(), 0.2 * rng.normal()}, 1.0});
  }
  OptimizerConfig cfg;
  const TrainResult trained = train_map(s, d, cfg);

  double prev_gap = -1.0;
  for (std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
    std::vector<std::size_t> erased;
    for (std::size_t i = 0; i < k; ++i) erased.push_back(600 + i);
    const ParameterVector approx = influence_unlearn(s, trained.theta, d, erased);
    const TrainResult exact = retrain(s, d, erased, cfg);
    double gap = 0.0;
    for (std::size_t j = 0; j < approx.dim(); ++j) {
      const double diff = approx.values[j] - exact.theta.values[j];
      gap += diff * diff;
    }
    gap = std::sqrt(gap);
    CHECK(gap > prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("baseline error paths") {
  Rng rng(29);
  ModelSpec s;
  s.family = Family::LinearRegression;
  s.prior_variance = 1.0;
  s.noise_variance = 0.25;
  const LabeledDataset d = regression_data(rng, 10);
  OptimizerConfig cfg;

  LabeledDataset empty;
  empty.feature_dim = 1;
  empty.task = Task::Regression;
  CHECK_THROWS_AS(train_map(s, empty, cfg), InvalidArgumentError);

  std::vector<std::size_t> all(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) all[i] = i;
  CHECK_THROWS_AS(retrain(s, d, all, cfg), InvalidArgumentError);

  OptimizerConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(train_map(s, d, bad), InvalidArgumentError);

  ParameterVector nan_theta{std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_THROWS_AS(naive_unlearn(s, nan_theta, d, 1, cfg), InvalidArgumentError);
}
