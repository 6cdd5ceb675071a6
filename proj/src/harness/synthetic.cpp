#include "mcu/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mcu/errors.hpp"
#include "mcu/model.hpp"
#include "mcu/rng.hpp"

namespace mcu::harness {

namespace {

// Fisher-Yates with the project RNG so generated row orders are portable.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

// Ground-truth curves for the synthetic scenarios. Values are arbitrary
// but fixed; the generators document them in info_json.
constexpr double kLinregCoef[5] = {0.3, 1.5, -2.0, 0.8, 0.5};
constexpr double kBinclassLogit[3] = {0.56, 9.6, -16.0};  // 2 - 16 (x - 0.3)^2

double polyval(std::span<const double> coef, double x) {
  double acc = 0.0;
  double p = 1.0;
  for (double c : coef) {
    acc += c * p;
    p *= x;
  }
  return acc;
}

SyntheticData gen_linreg_appendix(std::uint64_t seed) {
  Rng rng(seed);
  SyntheticData out;
  out.model.family = Family::LinearRegression;
  out.model.feature_map = FeatureMapKind::Polynomial;
  out.model.poly_degree = 4;
  out.model.prior_variance = 4.0;
  out.model.noise_variance = 0.01;

  // 15 erased points clustered at the low end of x, 35 elsewhere.
  struct P {
    double x, y;
    bool erased;
  };
  std::vector<P> pts;
  for (int i = 0; i < 15; ++i) pts.push_back({rng.uniform() * 0.4 - 1.0, 0, true});
  for (int i = 0; i < 35; ++i) pts.push_back({rng.uniform() * 1.6 - 0.6, 0, false});
  for (auto& p : pts) {
    p.y = polyval(kLinregCoef, p.x) + 0.1 * rng.normal();
  }
  shuffle(pts, rng);

  out.data.feature_dim = 1;
  out.data.task = Task::Regression;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.data.rows.push_back({{pts[i].x}, pts[i].y});
    if (pts[i].erased) out.erased_indices.push_back(i);
  }

  nlohmann::json info;
  info["true_coefficients"] = kLinregCoef;
  info["noise_variance"] = 0.01;
  info["erased_x_range"] = {-1.0, -0.6};
  out.info_json = info.dump(2);
  return out;
}

SyntheticData gen_binclass_sec71(std::uint64_t seed) {
  Rng rng(seed);
  SyntheticData out;
  out.model.family = Family::LogisticRegression;
  out.model.feature_map = FeatureMapKind::Polynomial;
  out.model.poly_degree = 4;
  out.model.prior_variance = 5.0;

  struct P {
    double x, y;
    bool erased;
  };
  std::vector<P> pts;
  for (int i = 0; i < 42; ++i) {
    const double x = rng.uniform();
    const double p1 = sigmoid(polyval(kBinclassLogit, x));
    pts.push_back({x, rng.uniform() < p1 ? 1.0 : 0.0, false});
  }
  // The erased rows are a cluster of anomalous always-positive points in a
  // region where the clean curve predicts class 0.
  for (int i = 0; i < 8; ++i) {
    pts.push_back({0.7 + 0.3 * rng.uniform(), 1.0, true});
  }
  shuffle(pts, rng);

  out.data.feature_dim = 1;
  out.data.task = Task::BinaryClassification;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.data.rows.push_back({{pts[i].x}, pts[i].y});
    if (pts[i].erased) out.erased_indices.push_back(i);
  }

  nlohmann::json info;
  info["true_logit_coefficients"] = kBinclassLogit;
  info["erased_x_range"] = {0.7, 1.0};
  out.info_json = info.dump(2);
  return out;
}

// Conjugate construction with x in {+1,-1}: the posterior given all 10
// rows is N((2,4), sD2 I) and the posterior given the 8 non-erased rows is
// N((1,1), sr2 I), with sD2 = 1/10.01 and sr2 = 1/8.01.
SyntheticData gen_two_gaussian(std::uint64_t /*seed*/) {
  SyntheticData out;
  out.model.family = Family::LinearRegression;
  out.model.feature_map = FeatureMapKind::Identity;
  out.model.prior_variance = 100.0;
  out.model.noise_variance = 1.0;

  const double sD2 = 1.0 / 10.01;
  const double sr2 = 1.0 / 8.01;
  // Sufficient statistics (sum y, sum x y) hitting the two centers.
  const double SD0 = 2.0 / sD2, SD1 = 4.0 / sD2;
  const double Sr0 = 1.0 / sr2, Sr1 = 1.0 / sr2;
  const double Se0 = SD0 - Sr0, Se1 = SD1 - Sr1;

  out.data.feature_dim = 1;
  out.data.task = Task::Regression;
  // 8 remaining rows: 4 at x=+1 carrying Sr, 4 at x=-1 with y=0.
  for (int i = 0; i < 4; ++i) out.data.rows.push_back({{1.0}, Sr0 / 4.0});
  for (int i = 0; i < 4; ++i) out.data.rows.push_back({{-1.0}, 0.0});
  // 2 erased rows solving (y+ + y-, y+ - y-) = (Se0, Se1).
  out.data.rows.push_back({{1.0}, (Se0 + Se1) / 2.0});
  out.data.rows.push_back({{-1.0}, (Se0 - Se1) / 2.0});
  out.erased_indices = {8, 9};

  nlohmann::json info;
  info["posterior_full"] = {{"mean", {2.0, 4.0}}, {"variance", sD2}};
  info["posterior_remaining"] = {{"mean", {1.0, 1.0}}, {"variance", sr2}};
  out.info_json = info.dump(2);
  return out;
}

SyntheticData gen_impsamp(std::uint64_t seed) {
  Rng rng(seed);
  SyntheticData out;
  out.model.family = Family::LinearRegression;
  out.model.feature_map = FeatureMapKind::Identity;
  out.model.prior_variance = 1.0;
  out.model.noise_variance = 1.0;

  out.data.feature_dim = 1;
  out.data.task = Task::Regression;
  out.data.rows.reserve(20000);
  for (int i = 0; i < 20000; ++i) {
    out.data.rows.push_back({{1.0 + 1.5 * rng.normal()}, 0.0});
  }

  nlohmann::json info;
  info["proposal"] = {{"mean", 1.0}, {"variance", 2.25}};
  info["target"] = {{"mean", 0.0}, {"variance", 1.0}};
  out.info_json = info.dump(2);
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const std::string& kind, std::uint64_t seed) {
  if (kind == "linreg-appendix") return gen_linreg_appendix(seed);
  if (kind == "binclass-sec71") return gen_binclass_sec71(seed);
  if (kind == "two-gaussian-fig2") return gen_two_gaussian(seed);
  if (kind == "impsamp-fig1") return gen_impsamp(seed);
  throw InvalidArgumentError("unknown synthetic kind: " + kind);
}

std::pair<LabeledDataset, std::vector<std::size_t>> make_corrupt_dataset(
    const LabeledDataset& clean, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidArgumentError("k must be positive");
  if (k >= clean.size()) {
    throw InvalidArgumentError("k must be smaller than the dataset (" +
                               std::to_string(k) + " >= " +
                               std::to_string(clean.size()) + ")");
  }
  if (clean.task != Task::BinaryClassification) {
    throw InvalidArgumentError("make_corrupt_dataset needs classification data");
  }

  Rng rng(seed);
  const std::size_t anchor = rng.below(clean.size());
  const auto& ax = clean.rows[anchor].features;

  std::vector<std::pair<double, std::size_t>> by_distance;
  by_distance.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < clean.feature_dim; ++j) {
      const double d = clean.rows[i].features[j] - ax[j];
      d2 += d * d;
    }
    by_distance.emplace_back(d2, i);
  }
  // Anchor first, then by distance with index tie-break.
  std::sort(by_distance.begin(), by_distance.end(),
            [anchor](const auto& a, const auto& b) {
              if (a.second == anchor) return true;
              if (b.second == anchor) return false;
              return a < b;
            });

  std::vector<std::size_t> flipped;
  flipped.reserve(k);
  for (std::size_t r = 0; r < k; ++r) flipped.push_back(by_distance[r].second);
  std::sort(flipped.begin(), flipped.end());

  LabeledDataset corrupt = clean;
  for (std::size_t i : flipped) {
    corrupt.rows[i].label = 1.0 - corrupt.rows[i].label;
  }
  return {std::move(corrupt), std::move(flipped)};
}

}  // namespace mcu::harness
