#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "maximin/core.hpp"
#include "maximin/environments.hpp"

namespace maximin {

// Where a learner's queries are answered. Learners never see anything but
// the reward of the arm they pull.
class RewardSource {
 public:
  virtual ~RewardSource() = default;
  virtual double pull(std::size_t arm) = 0;
};

// Answers from a model, with its own noise stream so that the learner's
// internal randomness is not perturbed by the noise kind.
class ModelSource : public RewardSource {
 public:
  ModelSource(const Model& model, std::uint64_t seed) : model_(&model), rng_(seed) {}
  double pull(std::size_t arm) override { return sample_reward(*model_, arm, rng_); }
  const Model& model() const { return *model_; }

 private:
  const Model* model_;
  std::mt19937_64 rng_;
};

// Independent Bernoulli(1/2) answers, whatever the arm.
class CoinFlipSource : public RewardSource {
 public:
  explicit CoinFlipSource(std::uint64_t seed) : rng_(seed) {}
  double pull(std::size_t) override { return uniform01(rng_) < 0.5 ? 1.0 : 0.0; }

 private:
  std::mt19937_64 rng_;
};

// Routes pulls to a source and logs them as transcript records.
class QueryLog {
 public:
  QueryLog(RewardSource& source, std::size_t arms) : source_(&source), arms_(arms) {}

  double pull(std::size_t arm);
  Transcript finish(std::size_t output_arm, std::string learner_name) &&;
  std::size_t count() const { return records_.size(); }

 private:
  RewardSource* source_;
  std::size_t arms_;
  std::vector<QueryRecord> records_;
};

struct LearnerParams {
  double alpha = 0.1;
  double delta = 0.1;
  std::optional<double> sigma;
  std::optional<double> c_m;
  std::optional<std::size_t> horizon;  // T for the DEC learner
  std::optional<std::size_t> budget;   // non-adaptive position count
  std::size_t reps_per_arm = 1;        // non-adaptive repetitions per position
  // Tree descent: fixed repetitions for every stage instead of the
  // confidence-driven counts.
  std::optional<std::size_t> reps_per_stage;
  double resolution = 0.25;            // q-grid step for the DEC learner

  void validate() const;
};

// Closed-form query schedule of the arm-sampling learners.
struct SamplingSchedule {
  double gamma = 0.0;       // gamma at alpha/2
  std::uint64_t arms_sampled = 0;  // m
  std::uint64_t per_arm = 0;
  std::uint64_t total() const { return arms_sampled * per_arm; }
};

SamplingSchedule algorithm1_schedule(const FunctionClass& cls, const LearnerParams& params);
SamplingSchedule algorithm2_schedule(const FunctionClass& cls, const LearnerParams& params);

// Samples m arms from the gamma witness at alpha/2 and returns the one with
// the largest empirical mean. Requires bounded rewards.
Transcript run_algorithm1(const FunctionClass& cls, const LearnerParams& params,
                          RewardSource& source, std::mt19937_64& rng);
Transcript run_algorithm1(const FunctionClass& cls, const LearnerParams& params,
                          const Model& model, std::mt19937_64& rng);

// Median-of-means variant for rewards with variance <= sigma^2.
Transcript run_algorithm2(const FunctionClass& cls, const LearnerParams& params,
                          RewardSource& source, std::mt19937_64& rng);
Transcript run_algorithm2(const FunctionClass& cls, const LearnerParams& params,
                          const Model& model, std::mt19937_64& rng);

struct TreeSchedule {
  std::uint64_t stages = 0;        // S = d + N
  std::uint64_t per_internal = 0;  // ceil(18 ln(4S/delta))
  std::uint64_t per_bucket_arm = 0;
  std::uint64_t total(const TreeMeta& meta) const {
    return meta.depth * per_internal + meta.bucket_size * per_bucket_arm;
  }
};

TreeSchedule tree_descent_schedule(const TreeMeta& meta, const LearnerParams& params);

// Walks root to leaf, going right iff the node's empirical mean >= 1/2, then
// picks the best arm of the reached bucket.
Transcript run_tree_descent(const TreeMeta& meta, const FunctionClass& cls,
                            const LearnerParams& params, RewardSource& source,
                            std::mt19937_64& rng);
Transcript run_tree_descent(const TreeMeta& meta, const FunctionClass& cls,
                            const LearnerParams& params, const Model& model,
                            std::mt19937_64& rng);

// Fixes `budget` i.i.d. uniform positions up front, queries each
// `reps_per_arm` times, outputs the queried arm with the best pooled mean.
Transcript run_non_adaptive_uniform(const FunctionClass& cls, std::size_t budget,
                                    std::size_t reps_per_arm, RewardSource& source,
                                    std::mt19937_64& rng);
Transcript run_non_adaptive_uniform(const FunctionClass& cls, std::size_t budget,
                                    std::size_t reps_per_arm, const Model& model,
                                    std::mt19937_64& rng);

// Exponential weights over the finite class with squared loss.
class ExponentialWeights {
 public:
  static constexpr double kLearningRate = 0.5;

  explicit ExponentialWeights(const FunctionClass& cls);

  void update(std::size_t arm, double reward);
  std::vector<double> weights() const;
  // Pointwise means of the current mixture (an element of co(F)).
  std::vector<double> predict() const;

 private:
  const FunctionClass* cls_;
  std::vector<double> log_weights_;
};

std::vector<double> online_regression_predict(
    const FunctionClass& cls, const std::vector<std::pair<std::size_t, double>>& history);

struct E2DDiagnostics {
  double eps_bar = 0.0;
  std::size_t rounds_l = 0;       // L
  std::size_t block_length = 0;   // J
  std::vector<ArmDistribution> p;  // p^t, t = 1..J
  std::vector<ArmDistribution> q;  // q^t
  std::vector<std::vector<double>> f_hat;     // oracle means at step t
  std::vector<double> dec_values;             // inner value at step t
  std::vector<std::size_t> chosen_indices;    // t_l (0-based)
  std::vector<double> selection_scores;       // E_{q^{t_l}}[(f_hat - f_tilde)^2]
  std::size_t selected = 0;                   // l_hat
  double gamma = 0.0;
};

// Estimation-to-decisions learner driven by the dec search.
Transcript run_e2d(const FunctionClass& cls, const LearnerParams& params, RewardSource& source,
                   std::mt19937_64& rng, E2DDiagnostics* diagnostics = nullptr);
Transcript run_e2d(const FunctionClass& cls, const LearnerParams& params, const Model& model,
                   std::mt19937_64& rng, E2DDiagnostics* diagnostics = nullptr);

// Cumulative sum_t E_{a~q^t}[(f*(a) - f_hat^t(a))^2] of an E2D exploration run.
double exploration_estimation_error(const FunctionClass& cls, std::size_t true_function,
                                    const E2DDiagnostics& diagnostics);

}  // namespace maximin
