#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maximin/core.hpp"
#include "maximin/environments.hpp"
#include "maximin/io.hpp"
#include "maximin/learners.hpp"

namespace maximin {

enum class OutputFormat { kCsv, kJson };

// A resolved class specification. `tree` is set when the class came from
// the tree constructor (tree descent needs the layout).
struct Instance {
  FunctionClass cls;
  std::optional<TreeMeta> tree;
};

// "class" entry of a config: an inline FunctionClass object, {"path": ...},
// or {"constructor": "k_armed"|"singletons"|"tree"|"linear", ...params}.
Instance build_instance(const json& spec);

struct ExperimentConfig {
  std::string kind;  // gamma, dec, run, sweep, certify, adaptivity, discretize
  std::string id;
  json class_spec;
  NoiseSpec noise;
  std::string learner = "algorithm1";
  LearnerParams params;
  std::optional<std::size_t> true_function;  // unset: uniform per trial
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string out_path;
  OutputFormat format = OutputFormat::kCsv;
  // runtime_ms is persisted as 0 unless this is set; otherwise outputs
  // would not be byte-reproducible.
  bool record_timing = false;
  json raw;  // the full document, for kind-specific fields

  static ExperimentConfig from_json(const json& j);
};

struct TrialRecord {
  std::string experiment_id;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string learner;
  std::string class_name;
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t queries = 0;
  bool success = false;
  std::size_t output_arm = 0;
  double gamma = 0.0;
  double runtime_ms = 0.0;
  std::size_t true_function = 0;
  std::string error;
};

struct MonteCarloStats {
  std::vector<TrialRecord> records;  // sorted by trial index
  double success_rate = 0.0;
  double mean_queries = 0.0;
  double half_width = 0.0;  // binomial 99%
  std::size_t errors = 0;
};

inline constexpr char kCsvHeader[] =
    "experiment_id,seed,trial,learner,class,alpha,delta,queries,success,output_arm,gamma,"
    "runtime_ms";

// Dispatches one learner run by name on the given model.
Transcript run_learner(const std::string& name, const Instance& inst, const LearnerParams& params,
                       const Model& model, std::mt19937_64& rng);

// Worker count from MB_THREADS (default: hardware concurrency), at least 1.
std::size_t worker_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Trial i uses seed derive_seed(config.seed, i).
MonteCarloStats monte_carlo(const ExperimentConfig& config, std::size_t threads = 0);

// 2.5758 * sqrt(p (1-p) / n)
double binomial_half_width(double p, std::size_t n);
// 3 * sqrt(p (1-p) / n)
double three_sigma(double p, std::size_t n);

std::string records_to_csv(const std::vector<TrialRecord>& records);
json records_to_json(const std::vector<TrialRecord>& records);
// Recomputes success from the class means and the stored output arm.
bool recompute_success(const FunctionClass& cls, const TrialRecord& record);

// A learner for the lower-bound experiment: its total query budget must be
// known in advance.
struct CertifiableLearner {
  std::string name;
  std::size_t budget = 0;
  std::function<Transcript(RewardSource&, std::mt19937_64&)> run;
};

struct CertifyResult {
  ArmDistribution p_hat;
  double min_coverage = 0.0;
  std::size_t worst_function = 0;
  double bound = 0.0;  // (1 - delta) 2^-T
  double slack = 0.0;  // 3 binomial sd at the bound
  std::size_t budget = 0;
  std::size_t trials = 0;
  bool holds = false;
};

inline constexpr std::size_t kMaxCertifyBudget = 20;

// Runs the learner `trials` times against fair coin flips and measures how
// well the induced output distribution covers every function's alpha-optimal
// arms.
CertifyResult certify_lower_bound(const FunctionClass& cls, const CertifiableLearner& learner,
                                  double alpha, double delta, std::size_t trials,
                                  std::uint64_t seed, std::size_t threads = 0);

// Builds a certifiable learner from a config-style name.
CertifiableLearner make_certifiable(const std::string& name, const Instance& inst,
                                    const LearnerParams& params, const json& extra = json::object());

struct AdaptivityResult {
  std::size_t depth = 0;
  double gamma = 0.0;
  std::size_t trials = 0;
  double adaptive_success_rate = 0.0;
  double adaptive_mean_queries = 0.0;
  std::size_t non_adaptive_budget = 0;
  double non_adaptive_failure_rate = 0.0;
  double slack = 0.0;
  bool separation_holds = false;
};

// Tree class (depth, N = 1), deterministic rewards, true leaf uniform per
// trial. Compares tree descent with the non-adaptive baseline at
// n = floor(1 / (10 gamma)).
AdaptivityResult adaptivity_experiment(std::size_t depth, std::size_t trials, std::uint64_t seed,
                                       const LearnerParams& params, std::size_t threads = 0);

struct SweepRow {
  std::size_t cell = 0;
  json settings;
  MonteCarloStats stats;
  std::string error;
};

// "grid": {"dotted.path": [values...]} (cartesian) or "cells": [{...}, ...].
std::vector<SweepRow> sweep(const ExperimentConfig& config, std::size_t threads = 0);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

json certify_to_json(const CertifyResult& r);
json adaptivity_to_json(const AdaptivityResult& r);

}  // namespace maximin
