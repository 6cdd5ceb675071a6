// mcu — MCMC-based machine unlearning toolbox.
//
// Subcommands: train, sample, unlearn, retrain, explain, synth,
// demo catastrophic, demo impsamp, run-recipe. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 numerical error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcu/baselines.hpp"
#include "mcu/candidate_store.hpp"
#include "mcu/digest.hpp"
#include "mcu/errors.hpp"
#include "mcu/explain.hpp"
#include "mcu/harness/csv.hpp"
#include "mcu/harness/recipe.hpp"
#include "mcu/harness/synthetic.hpp"
#include "mcu/metrics.hpp"
#include "mcu/model.hpp"
#include "mcu/rng.hpp"
#include "mcu/sampler.hpp"
#include "mcu/unlearner.hpp"

namespace {

using nlohmann::json;

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::cerr << "[info] " << msg << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw mcu::IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw mcu::IoError("write to " + path + " failed");
}

struct ModelFlags {
  std::string family = "logistic-regression";
  std::string feature_map = "identity";
  unsigned poly_degree = 1;
  double prior_variance = 1.0;
  double noise_variance = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "logistic-regression | linear-regression");
    cmd->add_option("--feature-map", feature_map, "identity | polynomial");
    cmd->add_option("--degree", poly_degree, "polynomial degree");
    cmd->add_option("--prior-variance", prior_variance, "Gaussian prior variance")
        ->required();
    cmd->add_option("--noise-variance", noise_variance,
                    "observation noise variance (linear regression)");
  }
  mcu::ModelSpec spec() const {
    mcu::ModelSpec s;
    s.family = mcu::family_from_name(family);
    s.feature_map = mcu::feature_map_from_name(feature_map);
    s.poly_degree = poly_degree;
    s.prior_variance = prior_variance;
    s.noise_variance = noise_variance;
    return s;
  }
};

struct DataFlags {
  std::string csv;
  std::string label_column = "label";
  std::vector<std::string> feature_columns;
  std::string task = "binary-classification";

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", csv, "dataset CSV with header row")->required();
    cmd->add_option("--label-column", label_column, "label column name");
    cmd->add_option("--feature-columns", feature_columns,
                    "feature column names (default: all but label)");
    cmd->add_option("--task", task, "binary-classification | regression");
  }
  mcu::LabeledDataset load() const {
    mcu::harness::CsvSchema schema;
    schema.label_column = label_column;
    schema.feature_columns = feature_columns;
    schema.task = mcu::task_from_name(task);
    return mcu::harness::ingest_csv(csv, schema);
  }
};

std::vector<std::size_t> parse_indices(const std::string& arg) {
  // Either a comma-separated list or a path to a file with one index per line.
  std::vector<std::size_t> out;
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::size_t v;
    while (in >> v) out.push_back(v);
    return out;
  }
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoull(tok));
  }
  return out;
}

json theta_json(const mcu::ParameterVector& theta) {
  return json{{"values", theta.values}};
}

mcu::ParameterVector theta_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mcu::IoError("cannot open " + path);
  json j;
  in >> j;
  return mcu::ParameterVector(j.at("values").get<std::vector<double>>());
}

// ---- demo: catastrophic unlearning (appendix linear-regression scene) ----
int demo_catastrophic(std::uint64_t seed, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto scenario = mcu::harness::generate_synthetic("linreg-appendix", seed);
  const mcu::ModelSpec spec = scenario.model;
  const mcu::LabeledDataset& data = scenario.data;
  const mcu::LabeledDataset erased = data.subset(scenario.erased_indices);
  const mcu::LabeledDataset remaining = data.without(scenario.erased_indices);

  mcu::OptimizerConfig opt;
  const mcu::TrainResult trained = mcu::train_map(spec, data, opt);
  const mcu::TrainResult retrained =
      mcu::retrain(spec, data, scenario.erased_indices, opt);

  mcu::OptimizerConfig naive_cfg;
  naive_cfg.learning_rate = 1e-5;
  json rows = json::array();
  const double mse_trained = mcu::mean_squared_error(spec, trained.theta, remaining);
  const double mse_retrained =
      mcu::mean_squared_error(spec, retrained.theta, remaining);
  for (std::uint64_t iters : {0ULL, 10ULL, 100ULL, 500ULL, 2000ULL}) {
    const mcu::ParameterVector theta =
        mcu::naive_unlearn(spec, trained.theta, erased, iters, naive_cfg);
    rows.push_back({{"iterations", iters},
                    {"mse_remaining", mcu::mean_squared_error(spec, theta, remaining)},
                    {"mse_erased", mcu::mean_squared_error(spec, theta, erased)}});
  }

  // The candidate-set route on the same scene, for contrast.
  std::vector<mcu::CandidateSet> chains;
  for (std::uint64_t c = 0; c < 30; ++c) {
    mcu::SamplerConfig cfg;
    cfg.num_samples = 100;
    cfg.burn_in = 30000;
    cfg.proposal_step = 0.05;
    cfg.adapt_step = true;
    cfg.alpha = 0.08;
    cfg.seed = mcu::derive_seed(seed, 7000 + c);
    cfg.init = mcu::SamplerInit::Explicit;
    cfg.init_value = trained.theta;
    chains.push_back(mcu::sample_posterior(spec, data, cfg));
  }
  const mcu::CandidateSet set = mcu::concat(chains);
  const mcu::UnlearnResult r = mcu::unlearn(set, erased);

  json out;
  out["seed"] = seed;
  out["mse_remaining_trained"] = mse_trained;
  out["mse_remaining_retrained"] = mse_retrained;
  out["naive_descent"] = rows;
  out["mcu_alpha"] = set.alpha;
  out["mcu_ess"] = r.ess;
  out["mse_remaining_mcu_weighted_mean"] =
      mcu::mean_squared_error(spec, r.weighted_mean, remaining);
  write_text(out_dir + "/catastrophic.json", out.dump(2));
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---- demo: importance sampling (weighted samples of q represent p) -------
int demo_impsamp(std::uint64_t seed, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto scenario = mcu::harness::generate_synthetic("impsamp-fig1", seed);

  const double qm = 1.0, qv = 2.25, pm = 0.0, pv = 1.0;
  double wsum = 0.0, m1 = 0.0;
  std::vector<double> x(scenario.data.size()), w(scenario.data.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = scenario.data.rows[i].features[0];
    const double lp = -(x[i] - pm) * (x[i] - pm) / (2.0 * pv) - 0.5 * std::log(pv);
    const double lq = -(x[i] - qm) * (x[i] - qm) / (2.0 * qv) - 0.5 * std::log(qv);
    w[i] = std::exp(lp - lq);
    wsum += w[i];
    m1 += w[i] * x[i];
  }
  m1 /= wsum;
  double m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m2 += w[i] * (x[i] - m1) * (x[i] - m1);
  }
  m2 /= wsum;

  // Matched-count direct Monte Carlo from the target, as the reference.
  mcu::Rng rng(mcu::derive_seed(seed, 11));
  double om1 = 0.0, om2 = 0.0;
  std::vector<double> direct(x.size());
  for (double& d : direct) {
    d = rng.normal();
    om1 += d;
  }
  om1 /= static_cast<double>(direct.size());
  for (double d : direct) om2 += (d - om1) * (d - om1);
  om2 /= static_cast<double>(direct.size());

  json out;
  out["samples"] = x.size();
  out["weighted_mean"] = m1;
  out["weighted_variance"] = m2;
  out["direct_mc_mean"] = om1;
  out["direct_mc_variance"] = om2;
  write_text(out_dir + "/impsamp.json", out.dump(2));

  std::ostringstream csv;
  csv << "x,weight\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    csv << mcu::format_double(x[i]) << "," << mcu::format_double(w[i] / wsum)
        << "\n";
  }
  write_text(out_dir + "/impsamp_samples.csv", csv.str());
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCMC-based machine unlearning toolbox"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "root RNG seed")->capture_default_str();
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--log-level", g_log_level, "0 quiet, 1 info, 2 debug");

  // ---- train ----
  auto* cmd_train = app.add_subcommand("train", "MAP-train a model on a CSV");
  ModelFlags train_model;
  DataFlags train_data;
  train_model.attach(cmd_train);
  train_data.attach(cmd_train);
  std::string train_out = "theta_trained.json";
  cmd_train->add_option("--out", train_out, "output parameter JSON");

  // ---- sample ----
  auto* cmd_sample = app.add_subcommand(
      "sample", "draw the candidate set from the (flattened) posterior");
  ModelFlags sample_model;
  DataFlags sample_data;
  sample_model.attach(cmd_sample);
  sample_data.attach(cmd_sample);
  std::uint64_t sample_m = 1000;
  double sample_alpha = 1.0, sample_step = 0.05;
  std::uint64_t sample_burn = 0;
  bool sample_burn_set = false, sample_adapt = false, sample_init_zeros = false;
  std::string sample_out = "candidates.mcs";
  cmd_sample->add_option("--samples", sample_m, "retained samples M");
  cmd_sample->add_option("--alpha", sample_alpha, "flattening scale in (0,1]");
  cmd_sample->add_option("--step", sample_step, "random-walk proposal std dev");
  cmd_sample->add_option("--burn-in", sample_burn, "burn-in iterations")
      ->each([&](const std::string&) { sample_burn_set = true; });
  cmd_sample->add_flag("--adapt", sample_adapt, "adapt step during burn-in");
  cmd_sample->add_flag("--init-zeros", sample_init_zeros,
                       "start at zeros instead of the MAP estimate");
  cmd_sample->add_option("--out", sample_out, "candidate-set file");

  // ---- unlearn ----
  auto* cmd_unlearn = app.add_subcommand(
      "unlearn", "erase a dataset's influence using a candidate set");
  std::string unlearn_set, unlearn_erased_csv, unlearn_indices, unlearn_data_csv;
  std::string unlearn_label = "label", unlearn_task = "binary-classification";
  std::string unlearn_out = "unlearn_result.json";
  cmd_unlearn->add_option("--set", unlearn_set, "candidate-set file")->required();
  cmd_unlearn->add_option("--erased-csv", unlearn_erased_csv,
                          "CSV holding exactly the erased rows");
  cmd_unlearn->add_option("--data", unlearn_data_csv,
                          "training CSV (with --erased-indices)");
  cmd_unlearn->add_option("--erased-indices", unlearn_indices,
                          "comma list or file of row indices into --data");
  cmd_unlearn->add_option("--label-column", unlearn_label, "label column name");
  cmd_unlearn->add_option("--task", unlearn_task, "dataset task");
  cmd_unlearn->add_option("--out", unlearn_out, "result JSON path");

  // ---- retrain ----
  auto* cmd_retrain =
      app.add_subcommand("retrain", "train from scratch on the remaining rows");
  ModelFlags retrain_model;
  DataFlags retrain_data;
  retrain_model.attach(cmd_retrain);
  retrain_data.attach(cmd_retrain);
  std::string retrain_indices;
  std::string retrain_out = "theta_retrained.json";
  cmd_retrain
      ->add_option("--erased-indices", retrain_indices,
                   "comma list or file of erased row indices")
      ->required();
  cmd_retrain->add_option("--out", retrain_out, "output parameter JSON");

  // ---- explain ----
  auto* cmd_explain = app.add_subcommand(
      "explain", "rank training subsets by their unlearning accuracy shift");
  std::string explain_set, explain_data_csv, explain_subsets, explain_eval_csv;
  std::string explain_label = "label";
  std::string explain_estimator = "weighted-mean";
  std::string explain_out = "influence_report";
  cmd_explain->add_option("--set", explain_set, "candidate-set file")->required();
  cmd_explain->add_option("--data", explain_data_csv, "training CSV")->required();
  cmd_explain
      ->add_option("--subsets", explain_subsets,
                   "JSON file: [{\"id\":..., \"indices\":[...]}, ...]")
      ->required();
  cmd_explain->add_option("--eval", explain_eval_csv, "evaluation CSV")
      ->required();
  cmd_explain->add_option("--label-column", explain_label, "label column name");
  cmd_explain->add_option("--estimator", explain_estimator,
                          "weighted-mean | map-candidate");
  cmd_explain->add_option("--out", explain_out,
                          "output basename (.json/.csv appended)");

  // ---- synth ----
  auto* cmd_synth =
      app.add_subcommand("synth", "generate a synthetic scenario to disk");
  std::string synth_kind;
  cmd_synth
      ->add_option("--kind", synth_kind,
                   "linreg-appendix | binclass-sec71 | two-gaussian-fig2 | "
                   "impsamp-fig1")
      ->required();

  // ---- demo ----
  auto* cmd_demo = app.add_subcommand("demo", "built-in demonstrations");
  cmd_demo->require_subcommand(1);
  auto* cmd_demo_cat = cmd_demo->add_subcommand(
      "catastrophic", "descending the erased-data posterior wrecks the model");
  auto* cmd_demo_imp = cmd_demo->add_subcommand(
      "impsamp", "importance reweighting of Gaussian samples");

  // ---- run-recipe ----
  auto* cmd_recipe = app.add_subcommand("run-recipe", "execute a recipe JSON");
  std::string recipe_path;
  unsigned recipe_workers = 0;
  cmd_recipe->add_option("recipe", recipe_path, "recipe JSON file")->required();
  cmd_recipe->add_option("--workers", recipe_workers,
                         "parallel per-subset work items");

  try {
    app.parse(argc, argv);

    if (*cmd_train) {
      const auto data = train_data.load();
      const auto spec = train_model.spec();
      mcu::OptimizerConfig opt;
      opt.seed = seed;
      const mcu::TrainResult result = mcu::train_map(spec, data, opt);
      log_info("train_map: converged=" + std::to_string(result.converged) +
               " iters=" + std::to_string(result.iterations));
      write_text(train_out, theta_json(result.theta).dump(2));
      if (data.task == mcu::Task::BinaryClassification) {
        std::cout << "accuracy_train="
                  << mcu::evaluate_accuracy(spec, result.theta, data) << "\n";
      }
      return 0;
    }

    if (*cmd_sample) {
      const auto data = sample_data.load();
      const auto spec = sample_model.spec();
      mcu::SamplerConfig cfg;
      cfg.num_samples = sample_m;
      if (sample_burn_set) cfg.burn_in = sample_burn;
      cfg.proposal_step = sample_step;
      cfg.alpha = sample_alpha;
      cfg.seed = seed;
      cfg.adapt_step = sample_adapt;
      cfg.init = sample_init_zeros ? mcu::SamplerInit::Zeros
                                   : mcu::SamplerInit::MapEstimate;
      const mcu::CandidateSet set = mcu::sample_posterior(spec, data, cfg);
      mcu::save_file(set, sample_out);
      log_info("wrote " + sample_out + " (M=" + std::to_string(set.size()) +
               ", alpha=" + mcu::format_double(set.alpha) + ")");
      return 0;
    }

    if (*cmd_unlearn) {
      const mcu::CandidateSet set = mcu::load_file(unlearn_set);
      mcu::LabeledDataset erased;
      mcu::harness::CsvSchema schema;
      schema.label_column = unlearn_label;
      schema.task = mcu::task_from_name(unlearn_task);
      if (!unlearn_erased_csv.empty()) {
        erased = mcu::harness::ingest_csv(unlearn_erased_csv, schema);
      } else if (!unlearn_data_csv.empty() && !unlearn_indices.empty()) {
        const auto data = mcu::harness::ingest_csv(unlearn_data_csv, schema);
        const std::string digest = mcu::sha256_hex(mcu::canonical_csv(data));
        if (digest != set.provenance.dataset_digest) {
          throw mcu::DataError(
              "dataset digest mismatch: the candidate set was built from a "
              "different training dataset");
        }
        erased = data.subset(parse_indices(unlearn_indices));
      } else {
        throw CLI::ValidationError(
            "unlearn", "need --erased-csv or --data with --erased-indices");
      }
      const mcu::UnlearnResult result = mcu::unlearn(set, erased);
      write_text(unlearn_out, mcu::unlearn_result_to_json(result));
      std::cout << "ess=" << result.ess << " map_index=" << result.map_index
                << "\n";
      return 0;
    }

    if (*cmd_retrain) {
      const auto data = retrain_data.load();
      const auto spec = retrain_model.spec();
      mcu::OptimizerConfig opt;
      opt.seed = seed;
      const auto indices = parse_indices(retrain_indices);
      const mcu::TrainResult result = mcu::retrain(spec, data, indices, opt);
      write_text(retrain_out, theta_json(result.theta).dump(2));
      return 0;
    }

    if (*cmd_explain) {
      const mcu::CandidateSet set = mcu::load_file(explain_set);
      mcu::harness::CsvSchema schema;
      schema.label_column = explain_label;
      const auto data = mcu::harness::ingest_csv(explain_data_csv, schema);
      const auto eval_data = mcu::harness::ingest_csv(explain_eval_csv, schema);
      std::ifstream sub_in(explain_subsets);
      if (!sub_in) throw mcu::IoError("cannot open " + explain_subsets);
      json sub_json;
      sub_in >> sub_json;
      std::vector<std::pair<std::string, mcu::LabeledDataset>> subsets;
      for (const auto& item : sub_json) {
        const auto indices = item.at("indices").get<std::vector<std::size_t>>();
        subsets.emplace_back(item.at("id").get<std::string>(),
                             data.subset(indices));
      }
      const auto report = mcu::subset_influence(
          set, subsets, eval_data,
          mcu::estimator_from_name(explain_estimator), explain_eval_csv);
      write_text(explain_out + ".json", mcu::report_to_json(report));
      write_text(explain_out + ".csv", mcu::report_to_csv(report));
      std::cout << mcu::report_to_csv(report);
      return 0;
    }

    if (*cmd_synth) {
      namespace fs = std::filesystem;
      fs::create_directories(out_dir);
      const auto scenario = mcu::harness::generate_synthetic(synth_kind, seed);
      mcu::harness::write_csv(scenario.data, out_dir + "/data.csv");
      json erased = scenario.erased_indices;
      write_text(out_dir + "/erased_indices.json", erased.dump());
      write_text(out_dir + "/info.json", scenario.info_json);
      log_info("wrote " + out_dir + "/data.csv (" +
               std::to_string(scenario.data.size()) + " rows)");
      return 0;
    }

    if (*cmd_demo_cat) return demo_catastrophic(seed, out_dir);
    if (*cmd_demo_imp) return demo_impsamp(seed, out_dir);

    if (*cmd_recipe) {
      mcu::harness::ExperimentRecipe recipe =
          mcu::harness::load_recipe_file(recipe_path);
      if (recipe_workers > 0) recipe.workers = recipe_workers;
      if (out_dir != ".") recipe.output_dir = out_dir;
      const auto records = mcu::harness::run_recipe(recipe);
      log_info("recipe '" + recipe.name + "': " +
               std::to_string(records.size()) + " metric rows -> " +
               recipe.output_dir);
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const mcu::harness::RecipeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.suggested_exit;
  } catch (const mcu::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mcu::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mcu::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
