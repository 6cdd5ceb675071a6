#include "mcu/harness/recipe.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mcu/candidate_store.hpp"
#include "mcu/harness/synthetic.hpp"
#include "mcu/metrics.hpp"
#include "mcu/rng.hpp"
#include "mcu/unlearner.hpp"

namespace mcu::harness {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const DataError*>(&e)) return 2;
  return 1;
}

template <typename F>
auto stage(const std::string& name, F&& fn) {
  try {
    return fn();
  } catch (const RecipeError&) {
    throw;
  } catch (const Error& e) {
    throw RecipeError(name, e.what(), exit_code_for(e));
  }
}

std::string subset_tag(std::size_t i) {
  return "s" + std::to_string(i);
}

std::string alpha_tag(double alpha) {
  return "mcu-a" + format_double(alpha);
}

// Derived-seed streams, spread out so stages never collide.
constexpr std::uint64_t kStreamTestSplit = 1;
constexpr std::uint64_t kStreamSampler = 100;    // + alpha index
constexpr std::uint64_t kStreamSubsets = 1000;   // + subset index
constexpr std::uint64_t kStreamCorrupt = 5000;   // + variant index

std::vector<std::size_t> pick_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + rng.below(n - i)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path + " failed");
}

json theta_json(const ParameterVector& theta) {
  return json{{"values", theta.values}};
}

// Accuracy rows for one model over the available splits.
struct SplitSet {
  const LabeledDataset* train = nullptr;
  const LabeledDataset* test = nullptr;
  const LabeledDataset* erased = nullptr;
  const LabeledDataset* clean = nullptr;
};

void push_metrics(std::vector<MetricsRecord>& out, const ModelSpec& spec,
                  const std::string& tag, const std::string& subset_id,
                  const ParameterVector& theta, const SplitSet& splits,
                  double wall_seconds) {
  auto add = [&](const char* split, const LabeledDataset* data) {
    if (data == nullptr || data->empty()) return;
    MetricsRecord r;
    r.model_tag = tag;
    r.split = split;
    r.accuracy = evaluate_accuracy(spec, theta, *data);
    r.wall_time_seconds = wall_seconds;
    r.subset_id = subset_id;
    out.push_back(std::move(r));
  };
  add("train", splits.train);
  add("test", splits.test);
  add("erased", splits.erased);
  add("clean", splits.clean);
}

struct SubsetOutcome {
  std::vector<MetricsRecord> records;
  std::vector<std::pair<std::string, std::string>> files;  // path, content
};

template <typename Fn>
void run_work_items(std::size_t count, unsigned workers, Fn&& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

ExperimentRecipe parse_recipe(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("recipe is not valid JSON: ") + e.what());
  }
  try {
    ExperimentRecipe r;
    r.name = j.at("name").get<std::string>();
    r.seed = j.value("seed", 0ULL);

    const json& m = j.at("model");
    r.model.family = family_from_name(m.at("family").get<std::string>());
    r.model.feature_map =
        feature_map_from_name(m.value("feature_map", std::string("identity")));
    r.model.poly_degree = m.value("poly_degree", 1u);
    r.model.prior_mean = m.value("prior_mean", 0.0);
    r.model.prior_variance = m.at("prior_variance").get<double>();
    r.model.noise_variance = m.value("noise_variance", 1.0);

    const json& d = j.at("data");
    if (d.contains("csv")) {
      r.data_csv = d.at("csv").get<std::string>();
      r.schema.label_column = d.at("label_column").get<std::string>();
      if (d.contains("feature_columns")) {
        r.schema.feature_columns =
            d.at("feature_columns").get<std::vector<std::string>>();
      }
      r.schema.task = task_from_name(
          d.value("task", std::string("binary-classification")));
    } else if (d.contains("generator")) {
      r.generator_kind = d.at("generator").get<std::string>();
    } else {
      throw ParseError("recipe data needs either 'csv' or 'generator'");
    }
    r.standardize = j.value("standardize", false);
    r.test_fraction = j.value("test_fraction", 0.0);
    if (r.test_fraction < 0.0 || r.test_fraction >= 1.0) {
      throw InvalidArgumentError("test_fraction must be in [0, 1)");
    }

    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      r.sampler.num_samples = s.value("num_samples", 1000ULL);
      if (s.contains("burn_in")) r.sampler.burn_in = s.at("burn_in").get<std::uint64_t>();
      r.sampler.proposal_step = s.value("proposal_step", 0.05);
      r.sampler.adapt_step = s.value("adapt_step", false);
    }
    if (j.contains("alphas")) {
      r.alphas = j.at("alphas").get<std::vector<double>>();
      if (r.alphas.empty()) throw InvalidArgumentError("alphas must be nonempty");
    }

    if (j.contains("erased")) {
      const json& e = j.at("erased");
      const std::string rule = e.at("rule").get<std::string>();
      if (rule == "explicit-indices") {
        r.erased.kind = ErasedRule::Kind::ExplicitIndices;
        r.erased.explicit_subsets =
            e.at("subsets").get<std::vector<std::vector<std::size_t>>>();
        r.erased.count = r.erased.explicit_subsets.size();
      } else if (rule == "random-k") {
        r.erased.kind = ErasedRule::Kind::RandomK;
        r.erased.k = e.at("k").get<std::size_t>();
        r.erased.count = e.value("count", std::size_t{1});
      } else if (rule == "nearest-neighbor-flip") {
        r.erased.kind = ErasedRule::Kind::NearestNeighborFlip;
        r.erased.k = e.at("k").get<std::size_t>();
        r.erased.count = e.value("count", std::size_t{1});
      } else {
        throw InvalidArgumentError("unknown erased rule: " + rule);
      }
    } else {
      r.erased.count = 0;
    }

    if (j.contains("baselines")) {
      r.baselines = j.at("baselines").get<std::vector<std::string>>();
      for (const auto& b : r.baselines) {
        if (b != "retrain" && b != "influence") {
          throw InvalidArgumentError("unknown baseline: " + b);
        }
      }
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      r.optimizer.max_iters = o.value("max_iters", 200000ULL);
      r.optimizer.learning_rate = o.value("learning_rate", 1.0);
      r.optimizer.grad_tolerance = o.value("grad_tolerance", 1e-6);
    }
    r.workers = j.value("workers", 1u);
    r.output_dir = j.value("output_dir", std::string("."));
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("recipe field error: ") + e.what());
  }
}

ExperimentRecipe load_recipe_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open recipe " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_recipe(ss.str());
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  out << "model_tag,split,accuracy,wall_time_seconds,subset_id\n";
  for (const auto& r : records) {
    out << r.model_tag << "," << r.split << "," << format_double(r.accuracy)
        << "," << format_double(r.wall_time_seconds) << "," << r.subset_id
        << "\n";
  }
  return out.str();
}

std::string metrics_to_json(const std::vector<MetricsRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"model_tag", r.model_tag},
                   {"split", r.split},
                   {"accuracy", r.accuracy},
                   {"wall_time_seconds", r.wall_time_seconds},
                   {"subset_id", r.subset_id}});
  }
  return json{{"records", arr}}.dump(2);
}

std::vector<MetricsRecord> run_recipe(const ExperimentRecipe& recipe) {
  namespace fs = std::filesystem;
  fs::create_directories(recipe.output_dir);
  const std::string out_dir = recipe.output_dir + "/";

  // ---- ingest ----------------------------------------------------------
  LabeledDataset full = stage("ingest", [&] {
    if (!recipe.generator_kind.empty()) {
      return generate_synthetic(recipe.generator_kind, recipe.seed).data;
    }
    return ingest_csv(recipe.data_csv, recipe.schema);
  });

  LabeledDataset train_data = full;
  LabeledDataset test_data;
  test_data.feature_dim = full.feature_dim;
  test_data.task = full.task;
  if (recipe.test_fraction > 0.0) {
    stage("test-split", [&] {
      const std::size_t n_test = static_cast<std::size_t>(
          std::llround(recipe.test_fraction * static_cast<double>(full.size())));
      Rng rng(derive_seed(recipe.seed, kStreamTestSplit));
      const std::vector<std::size_t> test_idx =
          pick_distinct(full.size(), n_test, rng);
      test_data = full.subset(test_idx);
      train_data = full.without(test_idx);
      return 0;
    });
  }
  if (recipe.standardize) {
    const Standardization st = standardize_fit(train_data);
    if (!test_data.empty()) standardize_apply(test_data, st);
  }
  recipe.model.validate(train_data.feature_dim);

  const bool corrupt_mode =
      recipe.erased.kind == ErasedRule::Kind::NearestNeighborFlip &&
      recipe.erased.count > 0;

  std::vector<MetricsRecord> all_records;
  json summary;
  summary["recipe"] = recipe.name;
  summary["seed"] = recipe.seed;
  json stages_info = json::object();

  if (!corrupt_mode) {
    // ---- train ---------------------------------------------------------
    const auto t_train = Clock::now();
    const TrainResult trained = stage("train", [&] {
      return train_map(recipe.model, train_data, recipe.optimizer);
    });
    const double train_seconds = seconds_since(t_train);
    write_text(out_dir + "theta_trained.json", theta_json(trained.theta).dump(2));

    // ---- sample (one candidate set per alpha) ---------------------------
    std::vector<CandidateSet> sets;
    sets.reserve(recipe.alphas.size());
    json sample_info = json::object();
    for (std::size_t a = 0; a < recipe.alphas.size(); ++a) {
      const auto t_sample = Clock::now();
      CandidateSet set = stage("sample", [&] {
        SamplerConfig cfg = recipe.sampler;
        cfg.alpha = recipe.alphas[a];
        cfg.seed = derive_seed(recipe.seed, kStreamSampler + a);
        cfg.init = SamplerInit::Explicit;
        cfg.init_value = trained.theta;
        return sample_posterior(recipe.model, train_data, cfg);
      });
      const std::string path =
          out_dir + "candidates_a" + format_double(recipe.alphas[a]) + ".mcs";
      save_file(set, path);
      sample_info["alpha_" + format_double(recipe.alphas[a])] = {
          {"file", path}, {"wall_time_seconds", seconds_since(t_sample)}};
      sets.push_back(std::move(set));
    }
    stages_info["sample"] = sample_info;

    // ---- erased subsets --------------------------------------------------
    std::vector<std::vector<std::size_t>> subsets;
    stage("erased-subsets", [&] {
      if (recipe.erased.kind == ErasedRule::Kind::ExplicitIndices) {
        subsets = recipe.erased.explicit_subsets;
        for (const auto& s : subsets) {
          if (s.size() >= train_data.size()) {
            throw InvalidArgumentError("erased subset covers the whole dataset");
          }
        }
      } else {
        if (recipe.erased.k >= train_data.size() && recipe.erased.count > 0) {
          throw InvalidArgumentError("erased k must be < |D|");
        }
        for (std::size_t i = 0; i < recipe.erased.count; ++i) {
          Rng rng(derive_seed(recipe.seed, kStreamSubsets + i));
          subsets.push_back(pick_distinct(train_data.size(), recipe.erased.k, rng));
        }
      }
      return 0;
    });

    const bool do_retrain =
        std::find(recipe.baselines.begin(), recipe.baselines.end(), "retrain") !=
        recipe.baselines.end();
    const bool do_influence =
        std::find(recipe.baselines.begin(), recipe.baselines.end(),
                  "influence") != recipe.baselines.end();

    SplitSet base_splits;
    base_splits.train = &train_data;
    base_splits.test = test_data.empty() ? nullptr : &test_data;

    if (subsets.empty()) {
      push_metrics(all_records, recipe.model, "trained-D", "", trained.theta,
                   base_splits, train_seconds);
    }

    std::vector<SubsetOutcome> outcomes(subsets.size());
    run_work_items(subsets.size(), recipe.workers, [&](std::size_t i) {
      stage("unlearn[" + subset_tag(i) + "]", [&] {
        const std::vector<std::size_t>& idx = subsets[i];
        const LabeledDataset erased = train_data.subset(idx);
        SubsetOutcome& o = outcomes[i];
        SplitSet splits = base_splits;
        splits.erased = &erased;

        push_metrics(o.records, recipe.model, "trained-D", subset_tag(i),
                     trained.theta, splits, train_seconds);

        if (do_retrain) {
          const auto t0 = Clock::now();
          const TrainResult rt =
              retrain(recipe.model, train_data, idx, recipe.optimizer);
          const double secs = seconds_since(t0);
          push_metrics(o.records, recipe.model, "retrained-Dr", subset_tag(i),
                       rt.theta, splits, secs);
          o.files.emplace_back(
              out_dir + "theta_retrained_" + subset_tag(i) + ".json",
              theta_json(rt.theta).dump(2));
        }
        if (do_influence) {
          const auto t0 = Clock::now();
          const ParameterVector ti =
              influence_unlearn(recipe.model, trained.theta, train_data, idx);
          const double secs = seconds_since(t0);
          push_metrics(o.records, recipe.model, "bif-like", subset_tag(i), ti,
                       splits, secs);
        }
        for (std::size_t a = 0; a < sets.size(); ++a) {
          const auto t0 = Clock::now();
          const UnlearnResult r = unlearn(sets[a], erased);
          const double secs = seconds_since(t0);
          push_metrics(o.records, recipe.model, alpha_tag(recipe.alphas[a]),
                       subset_tag(i), r.weighted_mean, splits, secs);
          o.files.emplace_back(out_dir + "unlearn_" + subset_tag(i) + "_a" +
                                   format_double(recipe.alphas[a]) + ".json",
                               unlearn_result_to_json(r));
        }
        return 0;
      });
    });
    json subsets_json = json::array();
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      subsets_json.push_back({{"subset_id", subset_tag(i)},
                              {"indices", subsets[i]}});
      for (const auto& [path, content] : outcomes[i].files) {
        write_text(path, content);
      }
      all_records.insert(all_records.end(), outcomes[i].records.begin(),
                         outcomes[i].records.end());
    }
    summary["subsets"] = subsets_json;
  } else {
    // Corrupt-dataset protocol: every variant trains and samples on its own
    // corrupted copy of the (clean) training data.
    std::vector<SubsetOutcome> outcomes(recipe.erased.count);
    run_work_items(recipe.erased.count, recipe.workers, [&](std::size_t v) {
      stage("corrupt-variant[" + subset_tag(v) + "]", [&] {
        auto [corrupt, flipped] = make_corrupt_dataset(
            train_data, recipe.erased.k, derive_seed(recipe.seed, kStreamCorrupt + v));
        SubsetOutcome& o = outcomes[v];

        const auto t_train = Clock::now();
        const TrainResult trained =
            train_map(recipe.model, corrupt, recipe.optimizer);
        const double train_seconds = seconds_since(t_train);

        const LabeledDataset erased = corrupt.subset(flipped);
        SplitSet splits;
        splits.train = &corrupt;
        splits.test = test_data.empty() ? nullptr : &test_data;
        splits.erased = &erased;
        splits.clean = &train_data;

        push_metrics(o.records, recipe.model, "trained-D", subset_tag(v),
                     trained.theta, splits, train_seconds);

        if (std::find(recipe.baselines.begin(), recipe.baselines.end(),
                      "retrain") != recipe.baselines.end()) {
          const auto t0 = Clock::now();
          const TrainResult rt =
              retrain(recipe.model, corrupt, flipped, recipe.optimizer);
          push_metrics(o.records, recipe.model, "retrained-Dr", subset_tag(v),
                       rt.theta, splits, seconds_since(t0));
        }
        if (std::find(recipe.baselines.begin(), recipe.baselines.end(),
                      "influence") != recipe.baselines.end()) {
          const auto t0 = Clock::now();
          const ParameterVector ti =
              influence_unlearn(recipe.model, trained.theta, corrupt, flipped);
          push_metrics(o.records, recipe.model, "bif-like", subset_tag(v), ti,
                       splits, seconds_since(t0));
        }
        for (std::size_t a = 0; a < recipe.alphas.size(); ++a) {
          SamplerConfig cfg = recipe.sampler;
          cfg.alpha = recipe.alphas[a];
          cfg.seed = derive_seed(recipe.seed, kStreamSampler + 100 * v + a);
          cfg.init = SamplerInit::Explicit;
          cfg.init_value = trained.theta;
          const CandidateSet set = sample_posterior(recipe.model, corrupt, cfg);
          const auto t0 = Clock::now();
          const UnlearnResult r = unlearn(set, erased);
          const double secs = seconds_since(t0);
          push_metrics(o.records, recipe.model, alpha_tag(recipe.alphas[a]),
                       subset_tag(v), r.weighted_mean, splits, secs);
          o.files.emplace_back(out_dir + "unlearn_" + subset_tag(v) + "_a" +
                                   format_double(recipe.alphas[a]) + ".json",
                               unlearn_result_to_json(r));
        }
        return 0;
      });
    });
    for (auto& o : outcomes) {
      for (const auto& [path, content] : o.files) write_text(path, content);
      all_records.insert(all_records.end(), o.records.begin(), o.records.end());
    }
  }

  summary["stages"] = stages_info;
  write_text(out_dir + "metrics.csv", metrics_to_csv(all_records));
  write_text(out_dir + "metrics.json", metrics_to_json(all_records));
  write_text(out_dir + "summary.json", summary.dump(2));
  return all_records;
}

}  // namespace mcu::harness
