#include "maximin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "maximin/games.hpp"

namespace maximin {

namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

LearnerParams params_from_json(const json& j) {
  LearnerParams p;
  if (!j.is_object()) return p;
  p.alpha = j.value("alpha", p.alpha);
  p.delta = j.value("delta", p.delta);
  if (j.contains("sigma")) p.sigma = j.at("sigma").get<double>();
  if (j.contains("c_m")) p.c_m = j.at("c_m").get<double>();
  if (j.contains("horizon")) p.horizon = j.at("horizon").get<std::size_t>();
  if (j.contains("T")) p.horizon = j.at("T").get<std::size_t>();
  if (j.contains("budget")) p.budget = j.at("budget").get<std::size_t>();
  p.reps_per_arm = j.value("reps_per_arm", p.reps_per_arm);
  if (j.contains("reps_per_stage")) p.reps_per_stage = j.at("reps_per_stage").get<std::size_t>();
  p.resolution = j.value("resolution", p.resolution);
  return p;
}

// Sets a dotted path ("learner.alpha") inside a JSON document.
void set_path(json& doc, const std::string& path, const json& value) {
  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ParameterError("empty sweep parameter path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
      (*node)[parts[i]] = json::object();
    }
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

}  // namespace

Instance build_instance(const json& spec) {
  if (spec.is_null()) throw ParameterError("config has no class");
  if (spec.contains("path")) return build_instance(read_json_file(spec.at("path").get<std::string>()));
  if (!spec.contains("constructor")) return Instance{class_from_json(spec), std::nullopt};

  const std::string ctor = spec.at("constructor").get<std::string>();
  if (ctor == "k_armed") return {make_k_armed_surrogate(spec.at("k").get<std::size_t>()), {}};
  if (ctor == "singletons") return {make_singletons(spec.at("n").get<std::size_t>()), {}};
  if (ctor == "tree") {
    auto [cls, meta] = make_tree_class(spec.at("depth").get<std::size_t>(),
                                       spec.value("bucket_size", std::size_t{1}));
    return {std::move(cls), meta};
  }
  if (ctor == "linear") {
    return {make_linear_net_class(spec.at("dimension").get<std::size_t>(),
                                  spec.at("alpha").get<double>()),
            {}};
  }
  throw ParameterError("unknown class constructor: " + ctor);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  ExperimentConfig c;
  c.raw = j;
  c.kind = j.value("kind", std::string{});
  c.class_spec = j.contains("class") ? j.at("class") : json();
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    if (l.is_string()) {
      c.learner = l.get<std::string>();
    } else {
      c.learner = l.value("name", c.learner);
      c.params = params_from_json(l);
    }
  }
  if (j.contains("true_function") && j.at("true_function").is_number_integer()) {
    c.true_function = j.at("true_function").get<std::size_t>();
  }
  c.trials = j.value("trials", std::size_t{1});
  if (c.trials == 0) throw ParameterError("trials must be >= 1");
  c.seed = j.value("seed", std::uint64_t{0});
  c.out_path = j.value("out", std::string{});
  const std::string fmt = j.value("format", std::string("csv"));
  if (fmt == "csv") {
    c.format = OutputFormat::kCsv;
  } else if (fmt == "json") {
    c.format = OutputFormat::kJson;
  } else {
    throw ParameterError("format must be csv or json");
  }
  c.record_timing = j.value("record_timing", false);
  if (j.contains("id")) {
    c.id = j.at("id").get<std::string>();
  } else {
    // Where and how results are written does not change the experiment.
    json identity = j;
    identity.erase("out");
    identity.erase("format");
    char buf[32];
    std::snprintf(buf, sizeof buf, "exp-%016llx",
                  static_cast<unsigned long long>(fnv1a(identity.dump())));
    c.id = buf;
  }
  return c;
}

Transcript run_learner(const std::string& name, const Instance& inst, const LearnerParams& params,
                       const Model& model, std::mt19937_64& rng) {
  if (name == "algorithm1") return run_algorithm1(inst.cls, params, model, rng);
  if (name == "algorithm2") return run_algorithm2(inst.cls, params, model, rng);
  if (name == "tree_descent") {
    if (!inst.tree) throw ContractError("tree descent needs a tree-constructed class");
    return run_tree_descent(*inst.tree, inst.cls, params, model, rng);
  }
  if (name == "non_adaptive_uniform") {
    if (!params.budget) throw ParameterError("non-adaptive learner needs a budget");
    return run_non_adaptive_uniform(inst.cls, *params.budget, params.reps_per_arm, model, rng);
  }
  if (name == "e2d") return run_e2d(inst.cls, params, model, rng);
  throw ParameterError("unknown learner: " + name);
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double binomial_half_width(double p, std::size_t n) {
  return 2.5758293035489 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double three_sigma(double p, std::size_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

MonteCarloStats monte_carlo(const ExperimentConfig& config, std::size_t threads) {
  const Instance inst = build_instance(config.class_spec);
  const auto class_name = inst.cls.name().empty() ? std::string("inline") : inst.cls.name();
  if (config.true_function && *config.true_function >= inst.cls.functions()) {
    throw IndexError("true_function out of range");
  }
  // gamma column fallback for learners that do not compute one.
  double class_gamma = 0.0;
  try {
    class_gamma = gamma(inst.cls, std::min(1.0, config.params.alpha)).value;
  } catch (const std::exception&) {
  }

  MonteCarloStats stats;
  stats.records.resize(config.trials);
  parallel_for(config.trials, threads ? threads : worker_count(), [&](std::size_t i) {
    TrialRecord rec;
    rec.experiment_id = config.id;
    rec.seed = derive_seed(config.seed, i);
    rec.trial = i;
    rec.learner = config.learner;
    rec.class_name = class_name;
    rec.alpha = config.params.alpha;
    rec.delta = config.params.delta;
    rec.gamma = class_gamma;

    std::mt19937_64 rng(rec.seed);
    const std::size_t f = config.true_function
                              ? *config.true_function
                              : std::uniform_int_distribution<std::size_t>(
                                    0, inst.cls.functions() - 1)(rng);
    rec.true_function = f;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Model model(inst.cls, f, config.noise);
      Transcript t = run_learner(config.learner, inst, config.params, model, rng);
      rec.queries = t.total_queries;
      rec.output_arm = t.output_arm;
      if (t.gamma) rec.gamma = *t.gamma;
      if (t.error) {
        rec.error = *t.error;
      } else {
        rec.success = model.is_alpha_optimal(t.output_arm, config.params.alpha);
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    if (config.record_timing) {
      rec.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
    stats.records[i] = std::move(rec);
  });

  std::size_t successes = 0;
  double queries = 0.0;
  for (const auto& r : stats.records) {
    successes += r.success ? 1 : 0;
    queries += static_cast<double>(r.queries);
    stats.errors += r.error.empty() ? 0 : 1;
  }
  const auto n = static_cast<double>(config.trials);
  stats.success_rate = static_cast<double>(successes) / n;
  stats.mean_queries = queries / n;
  stats.half_width = binomial_half_width(stats.success_rate, config.trials);
  return stats;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += csv_field(r.experiment_id) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.trial) + ',' + csv_field(r.learner) + ',' + csv_field(r.class_name) +
           ',' + format_number(r.alpha) + ',' + format_number(r.delta) + ',' +
           std::to_string(r.queries) + ',' + (r.success ? "1" : "0") + ',' +
           std::to_string(r.output_arm) + ',' + format_number(r.gamma) + ',' +
           format_number(r.runtime_ms) + '\n';
  }
  return out;
}

json records_to_json(const std::vector<TrialRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json j = {{"experiment_id", r.experiment_id},
              {"seed", r.seed},
              {"trial", r.trial},
              {"learner", r.learner},
              {"class", r.class_name},
              {"alpha", r.alpha},
              {"delta", r.delta},
              {"queries", r.queries},
              {"success", r.success},
              {"output_arm", r.output_arm},
              {"gamma", r.gamma},
              {"runtime_ms", r.runtime_ms},
              {"true_function", r.true_function}};
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

bool recompute_success(const FunctionClass& cls, const TrialRecord& record) {
  if (!record.error.empty()) return false;
  return cls.gap(record.true_function, record.output_arm) <= record.alpha;
}

CertifiableLearner make_certifiable(const std::string& name, const Instance& inst,
                                    const LearnerParams& params, const json& extra) {
  CertifiableLearner l;
  l.name = name;
  if (name == "fixed_arm") {
    const std::size_t arm = extra.value("arm", std::size_t{0});
    if (arm >= inst.cls.arms()) throw IndexError("fixed arm out of range");
    l.budget = 0;
    l.run = [arm, &inst](RewardSource& src, std::mt19937_64&) {
      return QueryLog(src, inst.cls.arms()).finish(arm, "fixed_arm");
    };
  } else if (name == "witness") {
    // Ignores rewards entirely: one draw from the gamma witness.
    const ArmDistribution p = gamma(inst.cls, params.alpha).p_star;
    l.budget = 0;
    l.run = [p, &inst](RewardSource& src, std::mt19937_64& rng) {
      return QueryLog(src, inst.cls.arms()).finish(p.sample(rng), "witness");
    };
  } else if (name == "tree_descent") {
    if (!inst.tree) throw ContractError("tree descent needs a tree-constructed class");
    const TreeMeta meta = *inst.tree;
    l.budget = tree_descent_schedule(meta, params).total(meta);
    l.run = [meta, params, &inst](RewardSource& src, std::mt19937_64& rng) {
      return run_tree_descent(meta, inst.cls, params, src, rng);
    };
  } else if (name == "algorithm1") {
    l.budget = algorithm1_schedule(inst.cls, params).total();
    l.run = [params, &inst](RewardSource& src, std::mt19937_64& rng) {
      return run_algorithm1(inst.cls, params, src, rng);
    };
  } else if (name == "non_adaptive_uniform") {
    const std::size_t n = params.budget.value_or(1);
    l.budget = n * params.reps_per_arm;
    l.run = [n, params, &inst](RewardSource& src, std::mt19937_64& rng) {
      return run_non_adaptive_uniform(inst.cls, n, params.reps_per_arm, src, rng);
    };
  } else {
    throw ParameterError("learner cannot be certified: " + name);
  }
  return l;
}

CertifyResult certify_lower_bound(const FunctionClass& cls, const CertifiableLearner& learner,
                                  double alpha, double delta, std::size_t trials,
                                  std::uint64_t seed, std::size_t threads) {
  if (learner.budget > kMaxCertifyBudget) {
    throw ParameterError("certification needs a total budget T <= 20");
  }
  if (!(delta >= 0.0 && delta < 1.0)) throw ParameterError("delta must lie in [0,1)");
  if (trials == 0) throw ParameterError("trials must be >= 1");

  std::vector<std::size_t> outputs(trials);
  parallel_for(trials, threads ? threads : worker_count(), [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    std::mt19937_64 rng(s);
    CoinFlipSource coins(derive_seed(s, 0xc01du));
    const Transcript t = learner.run(coins, rng);
    if (t.total_queries > learner.budget) {
      throw ContractError("learner exceeded its declared budget");
    }
    outputs[i] = t.output_arm;
  });

  std::vector<double> counts(cls.arms(), 0.0);
  for (std::size_t a : outputs) counts[a] += 1.0;
  for (double& c : counts) c /= static_cast<double>(trials);

  CertifyResult r;
  r.p_hat = ArmDistribution::unchecked(counts);
  r.budget = learner.budget;
  r.trials = trials;
  const BinaryMatrix b = gap_matrix(cls, alpha);
  r.min_coverage = 2.0;
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    double cov = 0.0;
    for (std::size_t a = 0; a < cls.arms(); ++a) cov += counts[a] * b(f, a);
    if (cov < r.min_coverage) {
      r.min_coverage = cov;
      r.worst_function = f;
    }
  }
  r.bound = (1.0 - delta) * std::ldexp(1.0, -static_cast<int>(learner.budget));
  r.slack = three_sigma(r.bound, trials);
  r.holds = r.min_coverage >= r.bound - r.slack;
  return r;
}

AdaptivityResult adaptivity_experiment(std::size_t depth, std::size_t trials, std::uint64_t seed,
                                       const LearnerParams& params, std::size_t threads) {
  if (depth < 3) throw ParameterError("adaptivity experiment needs depth >= 3");
  if (trials == 0) throw ParameterError("trials must be >= 1");
  const auto [cls, meta] = make_tree_class(depth, 1);
  AdaptivityResult r;
  r.depth = depth;
  r.trials = trials;
  r.gamma = 1.0 / static_cast<double>(meta.leaf_count());
  r.non_adaptive_budget = static_cast<std::size_t>(std::floor(1.0 / (10.0 * r.gamma)));

  std::vector<std::uint8_t> adaptive_ok(trials), fixed_ok(trials);
  std::vector<std::size_t> adaptive_queries(trials);
  parallel_for(trials, threads ? threads : worker_count(), [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    const std::size_t f =
        std::uniform_int_distribution<std::size_t>(0, cls.functions() - 1)(rng);
    const Model model(cls, f, NoiseSpec(Deterministic{}));
    const Transcript adaptive = run_tree_descent(meta, cls, params, model, rng);
    adaptive_ok[i] = model.is_alpha_optimal(adaptive.output_arm, params.alpha);
    adaptive_queries[i] = adaptive.total_queries;
    const Transcript fixed = run_non_adaptive_uniform(cls, r.non_adaptive_budget, 1, model, rng);
    fixed_ok[i] = model.is_alpha_optimal(fixed.output_arm, params.alpha);
  });

  double a_ok = 0.0, q = 0.0, n_ok = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    a_ok += adaptive_ok[i];
    q += static_cast<double>(adaptive_queries[i]);
    n_ok += fixed_ok[i];
  }
  const auto n = static_cast<double>(trials);
  r.adaptive_success_rate = a_ok / n;
  r.adaptive_mean_queries = q / n;
  r.non_adaptive_failure_rate = 1.0 - n_ok / n;
  r.slack = three_sigma(0.5, trials);
  r.separation_holds = r.non_adaptive_failure_rate >= 0.5 - r.slack &&
                       r.adaptive_success_rate >= 1.0 - params.delta - r.slack;
  return r;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, std::size_t threads) {
  const json& raw = config.raw;
  std::vector<json> cells;
  if (raw.contains("cells")) {
    for (const auto& c : raw.at("cells")) cells.push_back(c);
  } else if (raw.contains("grid")) {
    cells.push_back(json::object());
    for (const auto& [path, values] : raw.at("grid").items()) {
      if (!values.is_array() || values.empty()) throw ParameterError("grid axis must be non-empty");
      std::vector<json> next;
      for (const auto& partial : cells) {
        for (const auto& v : values) {
          json c = partial;
          c[path] = v;
          next.push_back(std::move(c));
        }
      }
      cells = std::move(next);
    }
  }
  if (cells.empty()) throw ParameterError("sweep grid is empty");

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    SweepRow row;
    row.cell = i;
    row.settings = cells[i];
    try {
      json doc = raw;
      doc.erase("grid");
      doc.erase("cells");
      doc["kind"] = "run";
      for (const auto& [path, v] : cells[i].items()) set_path(doc, path, v);
      ExperimentConfig cell = ExperimentConfig::from_json(doc);
      cell.id = config.id + "/cell" + std::to_string(i);
      cell.seed = derive_seed(config.seed, 0x5eedull + i);
      row.stats = monte_carlo(cell, threads);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.settings.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::string out = "cell";
  for (const auto& k : keys) out += ',' + csv_field(k);
  out += ",trials,success_rate,mean_queries,half_width,errors,error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.cell);
    for (const auto& k : keys) {
      out += ',';
      if (r.settings.contains(k)) {
        const auto& v = r.settings.at(k);
        out += csv_field(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    out += ',' + std::to_string(r.stats.records.size()) + ',' +
           format_number(r.stats.success_rate) + ',' + format_number(r.stats.mean_queries) + ',' +
           format_number(r.stats.half_width) + ',' + std::to_string(r.stats.errors) + ',' +
           csv_field(r.error) + '\n';
  }
  return out;
}

json certify_to_json(const CertifyResult& r) {
  return {{"p_hat", r.p_hat.probs()}, {"min_coverage", r.min_coverage},
          {"worst_function", r.worst_function}, {"bound", r.bound},
          {"slack", r.slack},         {"budget", r.budget},
          {"trials", r.trials},       {"holds", r.holds}};
}

json adaptivity_to_json(const AdaptivityResult& r) {
  return {{"depth", r.depth},
          {"gamma", r.gamma},
          {"trials", r.trials},
          {"adaptive_success_rate", r.adaptive_success_rate},
          {"adaptive_mean_queries", r.adaptive_mean_queries},
          {"non_adaptive_budget", r.non_adaptive_budget},
          {"non_adaptive_failure_rate", r.non_adaptive_failure_rate},
          {"slack", r.slack},
          {"separation_holds", r.separation_holds}};
}

}  // namespace maximin
