#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "maximin/errors.hpp"

namespace maximin {

// Dense row-major matrix. Only what the library needs: sized construction,
// element access and row views.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BinaryMatrix = Matrix<std::uint8_t>;

// Finite function class: means[f][a] is the mean reward of arm a under
// function f. Every entry lies in [0,1].
class FunctionClass {
 public:
  FunctionClass() = default;
  explicit FunctionClass(Matrix<double> means, std::string name = {},
                         std::vector<std::string> function_labels = {},
                         std::vector<std::string> arm_labels = {});

  std::size_t arms() const { return means_.cols(); }
  std::size_t functions() const { return means_.rows(); }
  const Matrix<double>& means() const { return means_; }
  double mean(std::size_t f, std::size_t a) const { return means_(f, a); }
  std::span<const double> row(std::size_t f) const { return means_.row(f); }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& function_labels() const { return function_labels_; }
  const std::vector<std::string>& arm_labels() const { return arm_labels_; }

  // Largest mean of function f.
  double best_value(std::size_t f) const;
  // max_a' f(a') - f(a).
  double gap(std::size_t f, std::size_t a) const;

  bool operator==(const FunctionClass&) const = default;

 private:
  Matrix<double> means_;
  std::string name_;
  std::vector<std::string> function_labels_;
  std::vector<std::string> arm_labels_;
};

// Probability vector over arms.
class ArmDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  ArmDistribution() = default;
  // Validates the simplex invariant; throws ParameterError.
  explicit ArmDistribution(std::vector<double> probs);

  static ArmDistribution uniform(std::size_t arms);
  static ArmDistribution point_mass(std::size_t arms, std::size_t arm);
  // Skips validation. Used for deliberately broken certificates in tests and
  // for reading untrusted JSON that is checked later.
  static ArmDistribution unchecked(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  const std::vector<double>& probs() const { return probs_; }
  bool is_valid() const;

  // Inverse-CDF draw; zero-mass arms are never returned.
  std::size_t sample(std::mt19937_64& rng) const;

 private:
  std::vector<double> probs_;
};

struct Deterministic {};
struct BernoulliAtMean {};
struct GaussianAdditive {
  double sigma;
};
struct TwoPointBounded {
  double c;
};
struct HeavyTailThreePoint {
  double sigma;
};

// Every kind has conditional mean exactly f(arm).
class NoiseSpec {
 public:
  using Kind = std::variant<Deterministic, BernoulliAtMean, GaussianAdditive, TwoPointBounded,
                            HeavyTailThreePoint>;

  // Probability of the outer support points of HeavyTailThreePoint; the
  // offset s is then sigma / sqrt(kHeavyTailMass) so the variance is sigma^2.
  static constexpr double kHeavyTailMass = 0.02;

  NoiseSpec() = default;
  NoiseSpec(Kind kind);  // NOLINT(google-explicit-constructor)

  const Kind& kind() const { return kind_; }
  std::string name() const;
  // Rewards stay inside [0,1].
  bool bounded() const;
  // Upper bound on the reward variance at any mean in [0,1].
  double variance_bound() const;

  double sample(double mean, std::mt19937_64& rng) const;

 private:
  Kind kind_ = Deterministic{};
};

// A concrete environment: one function of the class plus a noise model.
class Model {
 public:
  Model(const FunctionClass& cls, std::size_t true_function, NoiseSpec noise);

  const FunctionClass& function_class() const { return *class_; }
  std::size_t true_function() const { return true_function_; }
  const NoiseSpec& noise() const { return noise_; }

  double mean_of(std::size_t arm) const;
  // Least-index arm among optimal_arms(0).
  std::size_t optimal_arm() const;
  std::vector<std::size_t> optimal_arms(double alpha) const;
  bool is_alpha_optimal(std::size_t arm, double alpha) const;

 private:
  const FunctionClass* class_;
  std::size_t true_function_;
  NoiseSpec noise_;
};

struct QueryRecord {
  std::size_t round;
  std::size_t arm;
  double reward;

  bool operator==(const QueryRecord&) const = default;
};

// Full query log of a single learner run.
struct Transcript {
  std::vector<QueryRecord> records;
  std::size_t output_arm = 0;
  std::size_t total_queries = 0;
  std::uint64_t seed = 0;
  std::string learner_name;
  // gamma the learner computed or relied on, when it has one.
  std::optional<double> gamma;
  // Set when the learner aborted (e.g. dec too large); output_arm is then 0.
  std::optional<std::string> error;

  // Checks totalQueries == records.size(), rounds 1..n, output_arm < arms.
  bool well_formed(std::size_t arms) const;
};

// entry[f][a] = 1 iff max_a' means[f][a'] - means[f][a] <= alpha.
BinaryMatrix gap_matrix(const FunctionClass& cls, double alpha);

double sample_reward(const Model& model, std::size_t arm, std::mt19937_64& rng);

// Least index a maximizing means[f][a].
std::size_t argmax_arm(const FunctionClass& cls, std::size_t f);

// SplitMix64 mix of (master, index); used to give each trial its own stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uniform double in [0,1) from 53 random bits.
double uniform01(std::mt19937_64& rng);

}  // namespace maximin
