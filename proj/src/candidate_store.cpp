#include "mcu/candidate_store.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "mcu/errors.hpp"

namespace mcu {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'U', 'C', 'S', 'E', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out) throw IoError("candidate-store write failed");
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  if (!s.empty()) put_bytes(out, s.data(), s.size());
}

void get_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw CorruptionError("candidate-store stream truncated");
  }
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  get_bytes(in, b, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  get_bytes(in, b, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  return std::bit_cast<double>(get_u64(in));
}

std::string get_string(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  if (n > (1u << 20)) throw CorruptionError("unreasonable string length in header");
  std::string s(n, '\0');
  if (n) get_bytes(in, s.data(), n);
  return s;
}

}  // namespace

void save(const CandidateSet& set, std::ostream& out) {
  set.validate();
  put_bytes(out, kMagic, 8);
  put_u32(out, kVersion);
  put_bytes(out, set.spec.family == Family::LogisticRegression ? "\0" : "\1", 1);
  put_bytes(out, set.spec.feature_map == FeatureMapKind::Identity ? "\0" : "\1", 1);
  put_u32(out, set.spec.poly_degree);
  put_f64(out, set.spec.prior_mean);
  put_f64(out, set.spec.prior_variance);
  put_f64(out, set.spec.noise_variance);
  put_f64(out, set.alpha);
  put_u64(out, set.size());
  put_u64(out, set.dim());
  put_u64(out, set.provenance.seed);
  put_u64(out, set.provenance.created_at_unix);
  put_string(out, set.provenance.config_digest);
  put_string(out, set.provenance.dataset_digest);
  put_u32(out, static_cast<std::uint32_t>(set.provenance.source_seeds.size()));
  for (std::uint64_t s : set.provenance.source_seeds) put_u64(out, s);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (double v : set.candidates[i].values) put_f64(out, v);
    put_f64(out, set.h_values[i]);
  }
  out.flush();
  if (!out) throw IoError("candidate-store write failed");
}

void save_file(const CandidateSet& set, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    save(set, out);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

CandidateSet load(std::istream& in) {
  char magic[8];
  get_bytes(in, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw CorruptionError("not a candidate-set file (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw UnsupportedVersionError("unsupported candidate-set format version " +
                                  std::to_string(version));
  }

  CandidateSet set;
  unsigned char family_byte, map_byte;
  get_bytes(in, &family_byte, 1);
  get_bytes(in, &map_byte, 1);
  if (family_byte > 1 || map_byte > 1) {
    throw CorruptionError("invalid family/feature-map byte in header");
  }
  set.spec.family =
      family_byte == 0 ? Family::LogisticRegression : Family::LinearRegression;
  set.spec.feature_map =
      map_byte == 0 ? FeatureMapKind::Identity : FeatureMapKind::Polynomial;
  set.spec.poly_degree = get_u32(in);
  set.spec.prior_mean = get_f64(in);
  set.spec.prior_variance = get_f64(in);
  set.spec.noise_variance = get_f64(in);
  set.alpha = get_f64(in);
  const std::uint64_t m = get_u64(in);
  const std::uint64_t dim = get_u64(in);
  if (m == 0) throw CorruptionError("declared M is zero");
  if (dim == 0 || dim > (1u << 20)) {
    throw CorruptionError("unreasonable candidate dimension in header");
  }
  set.provenance.seed = get_u64(in);
  set.provenance.created_at_unix = get_u64(in);
  set.provenance.config_digest = get_string(in);
  set.provenance.dataset_digest = get_string(in);
  const std::uint32_t n_seeds = get_u32(in);
  if (n_seeds > (1u << 20)) throw CorruptionError("unreasonable seed count");
  set.provenance.source_seeds.resize(n_seeds);
  for (std::uint32_t i = 0; i < n_seeds; ++i) {
    set.provenance.source_seeds[i] = get_u64(in);
  }

  set.candidates.resize(m);
  set.h_values.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    set.candidates[i].values.resize(dim);
    for (std::uint64_t j = 0; j < dim; ++j) {
      set.candidates[i].values[j] = get_f64(in);
    }
    set.h_values[i] = get_f64(in);
  }
  // The declared record count must consume the stream exactly.
  char probe;
  in.read(&probe, 1);
  if (in.gcount() != 0) {
    throw CorruptionError("trailing bytes after declared record count");
  }
  set.validate();
  return set;
}

CandidateSet load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

}  // namespace mcu
