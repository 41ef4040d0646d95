#include "maximin/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maximin/dec.hpp"
#include "maximin/estimators.hpp"
#include "maximin/games.hpp"

namespace maximin {

namespace {

void require_same_class(const FunctionClass& cls, const Model& model) {
  if (&model.function_class() != &cls && !(model.function_class() == cls)) {
    throw ContractError("model is not drawn from the given function class");
  }
}

// Index of the largest estimate; least arm index among ties.
std::size_t best_arm(const std::vector<std::size_t>& arms, const std::vector<double>& estimates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms.size(); ++i) {
    if (estimates[i] > estimates[best] ||
        (estimates[i] == estimates[best] && arms[i] < arms[best])) {
      best = i;
    }
  }
  return arms[best];
}

double positive_gamma(const FunctionClass& cls, double alpha) {
  const double g = gamma(cls, alpha).value;
  if (!(g > 0.0)) throw UnlearnableError("gamma is zero at this accuracy; no finite budget");
  return g;
}

std::uint64_t arms_to_sample(double gamma_value, double delta) {
  return static_cast<std::uint64_t>(std::ceil(std::log(2.0 / delta) / gamma_value));
}

}  // namespace

double QueryLog::pull(std::size_t arm) {
  if (arm >= arms_) throw IndexError("queried arm out of range");
  const double r = source_->pull(arm);
  records_.push_back({records_.size() + 1, arm, r});
  return r;
}

Transcript QueryLog::finish(std::size_t output_arm, std::string learner_name) && {
  Transcript t;
  t.total_queries = records_.size();
  t.records = std::move(records_);
  t.output_arm = output_arm;
  t.learner_name = std::move(learner_name);
  return t;
}

void LearnerParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (sigma && !(*sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (c_m && !(*c_m > 0.0)) throw ParameterError("c_M must be positive");
  if (!(resolution > 0.0 && resolution < 1.0)) throw ParameterError("resolution must lie in (0,1)");
}

SamplingSchedule algorithm1_schedule(const FunctionClass& cls, const LearnerParams& params) {
  params.validate();
  SamplingSchedule s;
  s.gamma = positive_gamma(cls, params.alpha / 2.0);
  s.arms_sampled = arms_to_sample(s.gamma, params.delta);
  s.per_arm = chernoff_sample_count(params.alpha, params.delta, s.arms_sampled);
  return s;
}

SamplingSchedule algorithm2_schedule(const FunctionClass& cls, const LearnerParams& params) {
  params.validate();
  if (!params.sigma) throw ParameterError("median-of-means learner needs sigma");
  SamplingSchedule s;
  s.gamma = positive_gamma(cls, params.alpha / 2.0);
  s.arms_sampled = arms_to_sample(s.gamma, params.delta);
  s.per_arm = mom_sample_count(params.alpha, params.delta, *params.sigma,
                               params.c_m.value_or(4.0), s.arms_sampled);
  return s;
}

Transcript run_algorithm1(const FunctionClass& cls, const LearnerParams& params,
                          RewardSource& source, std::mt19937_64& rng) {
  const SamplingSchedule sched = algorithm1_schedule(cls, params);
  const ArmDistribution p = gamma(cls, params.alpha / 2.0).p_star;

  std::vector<std::size_t> sampled(sched.arms_sampled);
  for (auto& a : sampled) a = p.sample(rng);

  QueryLog log(source, cls.arms());
  std::vector<double> estimates(sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < sched.per_arm; ++k) sum += log.pull(sampled[i]);
    estimates[i] = sum / static_cast<double>(sched.per_arm);
  }
  Transcript t = std::move(log).finish(best_arm(sampled, estimates), "algorithm1");
  t.gamma = sched.gamma;
  return t;
}

Transcript run_algorithm1(const FunctionClass& cls, const LearnerParams& params,
                          const Model& model, std::mt19937_64& rng) {
  require_same_class(cls, model);
  if (!model.noise().bounded()) {
    throw ParameterError("algorithm1 requires rewards bounded in [0,1]");
  }
  ModelSource source(model, rng());
  return run_algorithm1(cls, params, source, rng);
}

Transcript run_algorithm2(const FunctionClass& cls, const LearnerParams& params,
                          RewardSource& source, std::mt19937_64& rng) {
  const SamplingSchedule sched = algorithm2_schedule(cls, params);
  const ArmDistribution p = gamma(cls, params.alpha / 2.0).p_star;
  const MoMConfig mom = MoMConfig::for_confidence(params.delta, params.c_m.value_or(4.0));

  std::vector<std::size_t> sampled(sched.arms_sampled);
  for (auto& a : sampled) a = p.sample(rng);

  QueryLog log(source, cls.arms());
  std::vector<double> estimates(sampled.size());
  std::vector<double> rewards(sched.per_arm);
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    for (auto& r : rewards) r = log.pull(sampled[i]);
    estimates[i] = median_of_means(rewards, mom);
  }
  Transcript t = std::move(log).finish(best_arm(sampled, estimates), "algorithm2");
  t.gamma = sched.gamma;
  return t;
}

Transcript run_algorithm2(const FunctionClass& cls, const LearnerParams& params,
                          const Model& model, std::mt19937_64& rng) {
  require_same_class(cls, model);
  if (!params.sigma) throw ParameterError("median-of-means learner needs sigma");
  if (model.noise().variance_bound() > *params.sigma * *params.sigma) {
    throw ParameterError("noise variance exceeds sigma^2");
  }
  ModelSource source(model, rng());
  return run_algorithm2(cls, params, source, rng);
}

TreeSchedule tree_descent_schedule(const TreeMeta& meta, const LearnerParams& params) {
  params.validate();
  TreeSchedule s;
  s.stages = meta.depth + meta.bucket_size;
  if (params.reps_per_stage) {
    s.per_internal = *params.reps_per_stage;
    s.per_bucket_arm = *params.reps_per_stage;
    return s;
  }
  const double log_term = std::log(4.0 * static_cast<double>(s.stages) / params.delta);
  // Hoeffding at deviation 1/6 (distance from 1/3 or 2/3 to the 1/2 cut).
  s.per_internal = static_cast<std::uint64_t>(std::ceil(18.0 * log_term));
  s.per_bucket_arm =
      static_cast<std::uint64_t>(std::ceil(8.0 / (params.alpha * params.alpha) * log_term));
  return s;
}

Transcript run_tree_descent(const TreeMeta& meta, const FunctionClass& cls,
                            const LearnerParams& params, RewardSource& source,
                            std::mt19937_64& /*rng*/) {
  if (cls.arms() != meta.arm_count() || cls.functions() != meta.function_count()) {
    throw ContractError("class does not match the tree layout");
  }
  const TreeSchedule sched = tree_descent_schedule(meta, params);
  QueryLog log(source, cls.arms());

  std::size_t path = 0;
  for (std::size_t level = 0; level < meta.depth; ++level) {
    const std::size_t arm = meta.internal_arm_of(path, level);
    double sum = 0.0;
    for (std::uint64_t k = 0; k < sched.per_internal; ++k) sum += log.pull(arm);
    const double mean = sched.per_internal ? sum / static_cast<double>(sched.per_internal) : 0.0;
    path = (path << 1) | (mean >= 0.5 ? 1u : 0u);
  }

  const auto bucket = meta.bucket_arms_of(path);
  std::vector<double> estimates(bucket.size(), 0.0);
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < sched.per_bucket_arm; ++k) sum += log.pull(bucket[i]);
    if (sched.per_bucket_arm) estimates[i] = sum / static_cast<double>(sched.per_bucket_arm);
  }
  return std::move(log).finish(best_arm(bucket, estimates), "tree_descent");
}

Transcript run_tree_descent(const TreeMeta& meta, const FunctionClass& cls,
                            const LearnerParams& params, const Model& model,
                            std::mt19937_64& rng) {
  require_same_class(cls, model);
  const auto [reference, ref_meta] = make_tree_class(meta.depth, meta.bucket_size);
  if (!(reference.means() == model.function_class().means())) {
    throw ContractError("model is not from this tree class");
  }
  ModelSource source(model, rng());
  return run_tree_descent(meta, cls, params, source, rng);
}

Transcript run_non_adaptive_uniform(const FunctionClass& cls, std::size_t budget,
                                    std::size_t reps_per_arm, RewardSource& source,
                                    std::mt19937_64& rng) {
  std::vector<std::size_t> positions(budget);
  std::uniform_int_distribution<std::size_t> pick(0, cls.arms() - 1);
  for (auto& a : positions) a = pick(rng);

  QueryLog log(source, cls.arms());
  std::vector<double> sums(cls.arms(), 0.0);
  std::vector<std::size_t> counts(cls.arms(), 0);
  for (std::size_t a : positions) {
    for (std::size_t k = 0; k < reps_per_arm; ++k) {
      sums[a] += log.pull(a);
      ++counts[a];
    }
  }
  std::size_t output = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cls.arms(); ++a) {
    if (counts[a] == 0) continue;
    const double mean = sums[a] / static_cast<double>(counts[a]);
    if (mean > best) {
      best = mean;
      output = a;
    }
  }
  return std::move(log).finish(output, "non_adaptive_uniform");
}

Transcript run_non_adaptive_uniform(const FunctionClass& cls, std::size_t budget,
                                    std::size_t reps_per_arm, const Model& model,
                                    std::mt19937_64& rng) {
  require_same_class(cls, model);
  ModelSource source(model, rng());
  return run_non_adaptive_uniform(cls, budget, reps_per_arm, source, rng);
}

ExponentialWeights::ExponentialWeights(const FunctionClass& cls)
    : cls_(&cls), log_weights_(cls.functions(), 0.0) {}

void ExponentialWeights::update(std::size_t arm, double reward) {
  if (arm >= cls_->arms()) throw IndexError("oracle update arm out of range");
  for (std::size_t f = 0; f < cls_->functions(); ++f) {
    const double d = reward - cls_->mean(f, arm);
    log_weights_[f] -= kLearningRate * d * d;
  }
}

std::vector<double> ExponentialWeights::weights() const {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> w(log_weights_.size());
  double sum = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) {
    w[f] = std::exp(log_weights_[f] - top);
    sum += w[f];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<double> ExponentialWeights::predict() const {
  return mixture_means(*cls_, weights());
}

std::vector<double> online_regression_predict(
    const FunctionClass& cls, const std::vector<std::pair<std::size_t, double>>& history) {
  ExponentialWeights oracle(cls);
  for (const auto& [arm, reward] : history) oracle.update(arm, reward);
  return oracle.weights();
}

Transcript run_e2d(const FunctionClass& cls, const LearnerParams& params, RewardSource& source,
                   std::mt19937_64& rng, E2DDiagnostics* diagnostics) {
  params.validate();
  if (!params.horizon) throw ParameterError("E2D learner needs a horizon T");
  const std::size_t horizon = *params.horizon;
  const std::size_t l_rounds = confidence_rounds(params.delta);
  if (horizon < l_rounds + 1) throw ParameterError("horizon T must be at least L + 1");
  const std::size_t block = horizon / (l_rounds + 1);
  const double eps = eps_bar(horizon, params.delta, cls.functions());
  const double half_alpha = params.alpha / 2.0;

  E2DDiagnostics local;
  E2DDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = E2DDiagnostics{};
  diag.eps_bar = eps;
  diag.rounds_l = l_rounds;
  diag.block_length = block;

  const DecSolver solver(cls, half_alpha, params.resolution);
  QueryLog log(source, cls.arms());

  // Exploration.
  ExponentialWeights oracle(cls);
  for (std::size_t t = 0; t < block; ++t) {
    std::vector<double> f_hat = oracle.predict();
    DecResult r = solver.solve_means(f_hat, eps);
    const std::size_t arm = r.q_witness.sample(rng);
    oracle.update(arm, log.pull(arm));
    diag.p.push_back(std::move(r.p_witness));
    diag.q.push_back(std::move(r.q_witness));
    diag.f_hat.push_back(std::move(f_hat));
    diag.dec_values.push_back(r.value);
  }

  // Exploitation: pick the block whose estimate a fresh oracle agrees with.
  std::uniform_int_distribution<std::size_t> pick(0, block - 1);
  diag.chosen_indices.resize(l_rounds);
  for (auto& idx : diag.chosen_indices) idx = pick(rng);
  diag.selection_scores.resize(l_rounds);
  for (std::size_t l = 0; l < l_rounds; ++l) {
    const std::size_t t = diag.chosen_indices[l];
    ExponentialWeights fresh(cls);
    std::vector<double> f_tilde(cls.arms(), 0.0);
    for (std::size_t j = 0; j < block; ++j) {
      const auto pred = fresh.predict();
      for (std::size_t a = 0; a < cls.arms(); ++a) f_tilde[a] += pred[a];
      const std::size_t arm = diag.q[t].sample(rng);
      fresh.update(arm, log.pull(arm));
    }
    for (double& v : f_tilde) v /= static_cast<double>(block);
    diag.selection_scores[l] = weighted_sq_distance(diag.q[t].probs(), diag.f_hat[t], f_tilde);
  }
  diag.selected = static_cast<std::size_t>(
      std::min_element(diag.selection_scores.begin(), diag.selection_scores.end()) -
      diag.selection_scores.begin());

  const std::size_t t_hat = diag.chosen_indices[diag.selected];
  const ArmDistribution& p_hat = diag.p[t_hat];
  const ArmDistribution& q_hat = diag.q[t_hat];
  const BinaryMatrix gaps = gap_matrix(cls, half_alpha);
  double worst_miss = 0.0;
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    if (weighted_sq_distance(q_hat.probs(), cls.row(f), diag.f_hat[t_hat]) > eps * eps + 1e-12) {
      continue;
    }
    double miss = 0.0;
    for (std::size_t a = 0; a < cls.arms(); ++a) miss += p_hat[a] * (1 - gaps(f, a));
    worst_miss = std::max(worst_miss, miss);
  }
  const double g = 1.0 - worst_miss;
  diag.gamma = g;
  if (!(g > 1e-12)) {
    Transcript t = std::move(log).finish(0, "e2d");
    t.gamma = g;
    t.error = "dec too large: computed gamma <= 0";
    return t;
  }

  // Final sampling from p_hat, as in algorithm1.
  const std::uint64_t m = arms_to_sample(g, params.delta);
  const std::uint64_t per_arm = chernoff_sample_count(params.alpha, params.delta, m);
  std::vector<std::size_t> sampled(m);
  for (auto& a : sampled) a = p_hat.sample(rng);
  std::vector<double> estimates(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < per_arm; ++k) sum += log.pull(sampled[i]);
    estimates[i] = sum / static_cast<double>(per_arm);
  }
  Transcript t = std::move(log).finish(best_arm(sampled, estimates), "e2d");
  t.gamma = g;
  return t;
}

Transcript run_e2d(const FunctionClass& cls, const LearnerParams& params, const Model& model,
                   std::mt19937_64& rng, E2DDiagnostics* diagnostics) {
  require_same_class(cls, model);
  ModelSource source(model, rng());
  return run_e2d(cls, params, source, rng, diagnostics);
}

double exploration_estimation_error(const FunctionClass& cls, std::size_t true_function,
                                    const E2DDiagnostics& diagnostics) {
  double total = 0.0;
  for (std::size_t t = 0; t < diagnostics.q.size(); ++t) {
    total += weighted_sq_distance(diagnostics.q[t].probs(), cls.row(true_function),
                                  diagnostics.f_hat[t]);
  }
  return total;
}

}  // namespace maximin
