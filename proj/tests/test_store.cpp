#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "mcu/candidate_store.hpp"
#include "mcu/errors.hpp"
#include "mcu/rng.hpp"

using namespace mcu;

namespace {

CandidateSet make_set(std::size_t m, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  CandidateSet set;
  set.alpha = 0.25;
  set.spec.family = Family::LinearRegression;
  set.spec.feature_map = FeatureMapKind::Polynomial;
  set.spec.poly_degree = static_cast<unsigned>(dim - 1);
  set.spec.prior_variance = 4.0;
  set.spec.noise_variance = 0.01;
  for (std::size_t i = 0; i < m; ++i) {
    ParameterVector theta;
    for (std::size_t j = 0; j < dim; ++j) theta.values.push_back(rng.normal());
    set.candidates.push_back(std::move(theta));
    set.h_values.push_back(-1000.0 * rng.uniform());
  }
  set.provenance.seed = seed;
  set.provenance.created_at_unix = 1700000000;
  set.provenance.config_digest = "abc123";
  set.provenance.dataset_digest = "def456";
  set.provenance.source_seeds = {seed};
  return set;
}

std::string serialized(const CandidateSet& set) {
  std::ostringstream out(std::ios::binary);
  save(set, out);
  return out.str();
}

void check_equal(const CandidateSet& a, const CandidateSet& b) {
  REQUIRE(a.size() == b.size());
  REQUIRE(a.dim() == b.dim());
  CHECK(a.alpha == b.alpha);
  CHECK(a.spec == b.spec);
  CHECK(a.h_values == b.h_values);  // bit-exact
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.candidates[i].values == b.candidates[i].values);
  }
  CHECK(a.provenance.seed == b.provenance.seed);
  CHECK(a.provenance.created_at_unix == b.provenance.created_at_unix);
  CHECK(a.provenance.config_digest == b.provenance.config_digest);
  CHECK(a.provenance.dataset_digest == b.provenance.dataset_digest);
  CHECK(a.provenance.source_seeds == b.provenance.source_seeds);
}

}  // namespace

TEST_CASE("singleton set round-trips") {
  const CandidateSet set = make_set(1, 3, 1);
  std::istringstream in(serialized(set), std::ios::binary);
  check_equal(set, load(in));
}

TEST_CASE("large set round-trips bit-exactly") {
  const CandidateSet set = make_set(3000, 5, 2);
  std::istringstream in(serialized(set), std::ios::binary);
  check_equal(set, load(in));
}

TEST_CASE("truncated stream is rejected, never a partial set") {
  const std::string bytes = serialized(make_set(10, 4, 3));
  for (std::size_t cut :
       {std::size_t{4}, std::size_t{40}, bytes.size() - 8, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    CHECK_THROWS_AS(load(in), CorruptionError);
  }
}

TEST_CASE("record count must match the declared M") {
  const CandidateSet set = make_set(10, 4, 4);
  const std::string bytes = serialized(set);
  // one extra record appended
  std::string extra = bytes + std::string(5 * 8, '\x7');
  std::istringstream in(extra, std::ios::binary);
  CHECK_THROWS_AS(load(in), CorruptionError);
}

TEST_CASE("alpha outside (0,1] in the header is corruption") {
  // alpha sits at a fixed offset: magic 8 + version 4 + family 1 + map 1 +
  // degree 4 + three spec doubles 24 = 42.
  std::string bytes = serialized(make_set(2, 2, 5));
  for (std::size_t b = 0; b < 8; ++b) bytes[42 + b] = '\0';  // alpha = 0.0
  std::istringstream in(bytes, std::ios::binary);
  CHECK_THROWS_AS(load(in), CorruptionError);
}

TEST_CASE("unknown format version is rejected as unsupported") {
  std::string bytes = serialized(make_set(2, 2, 6));
  bytes[8] = '\x63';  // version 99
  std::istringstream in(bytes, std::ios::binary);
  CHECK_THROWS_AS(load(in), UnsupportedVersionError);
}

TEST_CASE("bad magic is rejected") {
  std::string bytes = serialized(make_set(2, 2, 7));
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  CHECK_THROWS_AS(load(in), CorruptionError);
}

TEST_CASE("non-finite h is corruption") {
  CandidateSet set = make_set(3, 2, 8);
  set.h_values[1] = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out(std::ios::binary);
  CHECK_THROWS_AS(save(set, out), CorruptionError);
}

TEST_CASE("file save is atomic and loads back") {
  namespace fs = std::filesystem;
  const CandidateSet set = make_set(20, 3, 9);
  const std::string path =
      (fs::temp_directory_path() / "mcu_store_test.mcs").string();
  save_file(set, path);
  CHECK(!fs::exists(path + ".tmp"));
  check_equal(set, load_file(path));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_file("/nonexistent/nope.mcs"), IoError);
}

TEST_CASE("concat merges chains and records source seeds") {
  CandidateSet a = make_set(5, 3, 10);
  CandidateSet b = make_set(7, 3, 11);
  b.spec = a.spec;
  b.alpha = a.alpha;
  b.provenance.dataset_digest = a.provenance.dataset_digest;
  const CandidateSet merged = concat({a, b});
  CHECK(merged.size() == 12);
  CHECK(merged.provenance.source_seeds == std::vector<std::uint64_t>{10, 11});

  CandidateSet c = make_set(3, 3, 12);
  c.provenance.dataset_digest = "other";
  CHECK_THROWS_AS(concat({a, c}), InvalidArgumentError);
}
