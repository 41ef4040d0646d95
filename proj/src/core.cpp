#include "maximin/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace maximin {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FunctionClass::FunctionClass(Matrix<double> means, std::string name,
                             std::vector<std::string> function_labels,
                             std::vector<std::string> arm_labels)
    : means_(std::move(means)),
      name_(std::move(name)),
      function_labels_(std::move(function_labels)),
      arm_labels_(std::move(arm_labels)) {
  if (means_.rows() == 0 || means_.cols() == 0) {
    throw ParameterError("function class needs at least one function and one arm");
  }
  for (std::size_t f = 0; f < means_.rows(); ++f) {
    for (std::size_t a = 0; a < means_.cols(); ++a) {
      const double v = means_(f, a);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "mean[" << f << "][" << a << "] = " << v << " outside [0,1]";
        throw ParameterError(msg.str());
      }
    }
  }
  if (!function_labels_.empty() && function_labels_.size() != means_.rows()) {
    throw ParameterError("function label count does not match function count");
  }
  if (!arm_labels_.empty() && arm_labels_.size() != means_.cols()) {
    throw ParameterError("arm label count does not match arm count");
  }
}

double FunctionClass::best_value(std::size_t f) const {
  auto r = row(f);
  return *std::max_element(r.begin(), r.end());
}

double FunctionClass::gap(std::size_t f, std::size_t a) const {
  return best_value(f) - mean(f, a);
}

ArmDistribution::ArmDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (!is_valid()) {
    throw ParameterError("arm distribution is not a probability vector");
  }
}

ArmDistribution ArmDistribution::uniform(std::size_t arms) {
  if (arms == 0) throw ParameterError("uniform distribution over zero arms");
  return ArmDistribution(std::vector<double>(arms, 1.0 / static_cast<double>(arms)));
}

ArmDistribution ArmDistribution::point_mass(std::size_t arms, std::size_t arm) {
  if (arm >= arms) throw IndexError("point mass arm out of range");
  std::vector<double> p(arms, 0.0);
  p[arm] = 1.0;
  return ArmDistribution(std::move(p));
}

ArmDistribution ArmDistribution::unchecked(std::vector<double> probs) {
  ArmDistribution d;
  d.probs_ = std::move(probs);
  return d;
}

bool ArmDistribution::is_valid() const {
  if (probs_.empty()) return false;
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= kSumTolerance;
}

std::size_t ArmDistribution::sample(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < probs_.size(); ++a) {
    if (probs_[a] <= 0.0) continue;
    last_positive = a;
    acc += probs_[a];
    if (u < acc) return a;
  }
  // u landed in the rounding sliver above the accumulated mass.
  return last_positive;
}

NoiseSpec::NoiseSpec(Kind kind) : kind_(kind) {
  std::visit(Overloaded{
                 [](const GaussianAdditive& g) {
                   if (!(g.sigma > 0.0)) throw ParameterError("Gaussian sigma must be positive");
                 },
                 [](const HeavyTailThreePoint& h) {
                   if (!(h.sigma > 0.0)) throw ParameterError("heavy-tail sigma must be positive");
                 },
                 [](const TwoPointBounded& t) {
                   if (!(t.c >= 0.0 && t.c <= 0.5)) {
                     throw ParameterError("two-point offset c must lie in [0, 1/2]");
                   }
                 },
                 [](const auto&) {},
             },
             kind_);
}

std::string NoiseSpec::name() const {
  return std::visit(Overloaded{
                        [](const Deterministic&) { return std::string("deterministic"); },
                        [](const BernoulliAtMean&) { return std::string("bernoulli"); },
                        [](const GaussianAdditive&) { return std::string("gaussian"); },
                        [](const TwoPointBounded&) { return std::string("two_point"); },
                        [](const HeavyTailThreePoint&) { return std::string("heavy_tail"); },
                    },
                    kind_);
}

bool NoiseSpec::bounded() const {
  return std::holds_alternative<Deterministic>(kind_) ||
         std::holds_alternative<BernoulliAtMean>(kind_) ||
         std::holds_alternative<TwoPointBounded>(kind_);
}

double NoiseSpec::variance_bound() const {
  return std::visit(Overloaded{
                        [](const Deterministic&) { return 0.0; },
                        [](const BernoulliAtMean&) { return 0.25; },
                        [](const GaussianAdditive& g) { return g.sigma * g.sigma; },
                        [](const TwoPointBounded& t) { return t.c * t.c; },
                        [](const HeavyTailThreePoint& h) { return h.sigma * h.sigma; },
                    },
                    kind_);
}

double NoiseSpec::sample(double mean, std::mt19937_64& rng) const {
  return std::visit(
      Overloaded{
          [&](const Deterministic&) { return mean; },
          [&](const BernoulliAtMean&) { return uniform01(rng) < mean ? 1.0 : 0.0; },
          [&](const GaussianAdditive& g) {
            std::normal_distribution<double> normal(mean, g.sigma);
            return normal(rng);
          },
          [&](const TwoPointBounded& t) {
            double lo = mean - t.c;
            double hi = mean + t.c;
            if (lo >= 0.0 && hi <= 1.0) return uniform01(rng) < 0.5 ? lo : hi;
            // One point sits on the nearer boundary; the mass on the other
            // point is solved from p*hi + (1-p)*lo = mean.
            if (lo < 0.0) lo = 0.0;
            if (hi > 1.0) hi = 1.0;
            if (hi <= lo) return mean;
            const double p_hi = (mean - lo) / (hi - lo);
            return uniform01(rng) < p_hi ? hi : lo;
          },
          [&](const HeavyTailThreePoint& h) {
            const double s = h.sigma / std::sqrt(kHeavyTailMass);
            const double u = uniform01(rng);
            if (u < 0.5 * kHeavyTailMass) return mean - s;
            if (u < kHeavyTailMass) return mean + s;
            return mean;
          },
      },
      kind_);
}

Model::Model(const FunctionClass& cls, std::size_t true_function, NoiseSpec noise)
    : class_(&cls), true_function_(true_function), noise_(noise) {
  if (true_function >= cls.functions()) {
    throw IndexError("true function index out of range");
  }
}

double Model::mean_of(std::size_t arm) const {
  if (arm >= class_->arms()) throw IndexError("arm index out of range");
  return class_->mean(true_function_, arm);
}

std::size_t Model::optimal_arm() const { return argmax_arm(*class_, true_function_); }

std::vector<std::size_t> Model::optimal_arms(double alpha) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < class_->arms(); ++a) {
    if (is_alpha_optimal(a, alpha)) out.push_back(a);
  }
  return out;
}

bool Model::is_alpha_optimal(std::size_t arm, double alpha) const {
  return class_->gap(true_function_, arm) <= alpha;
}

bool Transcript::well_formed(std::size_t arms) const {
  if (total_queries != records.size()) return false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].round != i + 1) return false;
    if (records[i].arm >= arms) return false;
  }
  return output_arm < arms;
}

BinaryMatrix gap_matrix(const FunctionClass& cls, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  BinaryMatrix b(cls.functions(), cls.arms(), 0);
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    const double best = cls.best_value(f);
    for (std::size_t a = 0; a < cls.arms(); ++a) {
      b(f, a) = (best - cls.mean(f, a) <= alpha) ? 1 : 0;
    }
  }
  return b;
}

double sample_reward(const Model& model, std::size_t arm, std::mt19937_64& rng) {
  return model.noise().sample(model.mean_of(arm), rng);
}

std::size_t argmax_arm(const FunctionClass& cls, std::size_t f) {
  if (f >= cls.functions()) throw IndexError("function index out of range");
  auto r = cls.row(f);
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace maximin
