#include "maximin/dec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "maximin/games.hpp"

namespace maximin {

namespace {

// Absorbs rounding in the squared-distance sum so that exact ties with eps^2
// (e.g. eps = 0 against an identical function) stay members.
constexpr double kMembershipSlack = 1e-12;

bool is_member(double dist, double eps) { return dist <= eps * eps + kMembershipSlack; }

void check_mixture(std::span<const double> weights, std::size_t functions) {
  if (weights.size() != functions) throw ParameterError("anchor size differs from function count");
  if (!ArmDistribution::unchecked({weights.begin(), weights.end()}).is_valid()) {
    throw ParameterError("anchor is not a probability mixture");
  }
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1ull << 40)) return r;
  }
  return r;
}

}  // namespace

std::vector<double> mixture_means(const FunctionClass& cls, std::span<const double> weights) {
  std::vector<double> out(cls.arms(), 0.0);
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    if (weights[f] == 0.0) continue;
    for (std::size_t a = 0; a < cls.arms(); ++a) out[a] += weights[f] * cls.mean(f, a);
  }
  return out;
}

double weighted_sq_distance(std::span<const double> q, std::span<const double> x,
                            std::span<const double> y) {
  double s = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] == 0.0) continue;
    const double d = x[a] - y[a];
    s += q[a] * d * d;
  }
  return s;
}

VersionSet version_set(const FunctionClass& cls, std::span<const double> anchor,
                       const ArmDistribution& q, double eps) {
  check_mixture(anchor, cls.functions());
  if (q.size() != cls.arms()) throw ParameterError("q size differs from arm count");
  if (!(eps >= 0.0)) throw ParameterError("eps must be non-negative");
  VersionSet vs;
  vs.anchor.assign(anchor.begin(), anchor.end());
  vs.q = q;
  vs.eps = eps;
  const auto center = mixture_means(cls, anchor);
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    if (is_member(weighted_sq_distance(q.probs(), cls.row(f), center), eps)) {
      vs.members.push_back(f);
    }
  }
  return vs;
}

QCandidates::QCandidates(std::size_t arms, double resolution) : resolution_(resolution) {
  if (!(resolution > 0.0 && resolution < 1.0)) {
    throw ParameterError("search resolution must lie in (0,1)");
  }
  if (arms == 0) throw ParameterError("no arms");
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / resolution));
  const std::uint64_t grid = binomial(steps + arms - 1, arms - 1);
  if (grid + arms + 1 > kMaxCandidates) throw CapacityError("q-candidate grid too large");

  candidates_.reserve(static_cast<std::size_t>(grid) + arms + 1);
  candidates_.push_back(ArmDistribution::uniform(arms));
  for (std::size_t a = 0; a < arms; ++a) candidates_.push_back(ArmDistribution::point_mass(arms, a));

  // Lexicographic enumeration of compositions of `steps` into `arms` parts.
  std::vector<std::size_t> parts(arms, 0);
  parts[arms - 1] = steps;
  const double unit = 1.0 / static_cast<double>(steps);
  while (true) {
    std::vector<double> p(arms);
    for (std::size_t a = 0; a < arms; ++a) p[a] = static_cast<double>(parts[a]) * unit;
    candidates_.push_back(ArmDistribution::unchecked(std::move(p)));
    // Next composition: find the rightmost non-last position that can take a
    // unit from the tail.
    if (arms == 1) break;
    std::size_t i = arms - 1;
    while (i > 0 && parts[i] == 0) --i;
    if (i == 0) break;
    const std::size_t tail = parts[i];
    parts[i] = 0;
    parts[i - 1] += 1;
    parts[arms - 1] = tail - 1;
  }
}

DecSolver::DecSolver(const FunctionClass& cls, double alpha, double resolution)
    : cls_(&cls), alpha_(alpha), gaps_(gap_matrix(cls, alpha)), candidates_(cls.arms(), resolution) {}

std::pair<double, ArmDistribution> DecSolver::inner_value(
    const std::vector<std::size_t>& members) const {
  if (members.empty()) return {0.0, ArmDistribution::uniform(cls_->arms())};
  BinaryMatrix sub(members.size(), cls_->arms());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t a = 0; a < cls_->arms(); ++a) sub(i, a) = gaps_(members[i], a);
  }
  MaximinSolution sol = solve_maximin(sub);
  return {std::clamp(1.0 - sol.value, 0.0, 1.0), std::move(sol.p_star)};
}

DecResult DecSolver::solve(std::span<const double> anchor_weights, double eps) const {
  check_mixture(anchor_weights, cls_->functions());
  DecResult r = solve_means(mixture_means(*cls_, anchor_weights), eps);
  r.anchor.assign(anchor_weights.begin(), anchor_weights.end());
  return r;
}

DecResult DecSolver::solve_means(std::span<const double> anchor_means, double eps) const {
  if (!(eps >= 0.0)) throw ParameterError("eps must be non-negative");
  if (anchor_means.size() != cls_->arms()) throw ParameterError("anchor means size mismatch");

  std::map<std::vector<std::size_t>, std::pair<double, ArmDistribution>> cache;
  DecResult best;
  best.value = 2.0;
  std::vector<std::size_t> members;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    const ArmDistribution& q = candidates_[c];
    members.clear();
    for (std::size_t f = 0; f < cls_->functions(); ++f) {
      if (is_member(weighted_sq_distance(q.probs(), cls_->row(f), anchor_means), eps)) {
        members.push_back(f);
      }
    }
    auto it = cache.find(members);
    if (it == cache.end()) it = cache.emplace(members, inner_value(members)).first;
    if (it->second.first < best.value) {
      best.value = it->second.first;
      best.p_witness = it->second.second;
      best.q_witness = q;
      best.witness_members = members;
      if (best.value <= 0.0) break;
    }
  }
  best.eps = eps;
  best.alpha = alpha_;
  best.search_resolution = candidates_.resolution();
  best.bound = DecResult::Bound::kUpper;
  return best;
}

DecResult dec_at(const FunctionClass& cls, std::span<const double> anchor, double eps,
                 double alpha, double resolution) {
  return DecSolver(cls, alpha, resolution).solve(anchor, eps);
}

std::vector<std::vector<double>> default_anchors(std::size_t functions, AnchorFamily family) {
  std::vector<std::vector<double>> out;
  for (std::size_t f = 0; f < functions; ++f) {
    std::vector<double> w(functions, 0.0);
    w[f] = 1.0;
    out.push_back(std::move(w));
  }
  if (family == AnchorFamily::kVerticesAndMidpoints) {
    for (std::size_t f = 0; f < functions; ++f) {
      for (std::size_t g = f + 1; g < functions; ++g) {
        std::vector<double> w(functions, 0.0);
        w[f] = 0.5;
        w[g] = 0.5;
        out.push_back(std::move(w));
      }
    }
  }
  if (functions > 1) out.emplace_back(functions, 1.0 / static_cast<double>(functions));
  return out;
}

DecResult dec_sup(const FunctionClass& cls, double eps, double alpha,
                  const std::vector<std::vector<double>>& anchors, double resolution) {
  if (anchors.empty()) throw ParameterError("no anchor candidates");
  const DecSolver solver(cls, alpha, resolution);
  DecResult best;
  best.value = -1.0;
  for (const auto& anchor : anchors) {
    DecResult r = solver.solve(anchor, eps);
    if (r.value > best.value) best = std::move(r);
  }
  best.bound = DecResult::Bound::kLower;
  return best;
}

double est_bound(std::size_t functions, double delta) {
  if (functions == 0) throw ParameterError("empty class");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  return 4.0 * std::log(static_cast<double>(functions)) + 16.0 * std::log(2.0 / delta);
}

std::size_t confidence_rounds(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  return static_cast<std::size_t>(std::ceil(std::log2(4.0 / delta)));
}

double eps_bar(std::size_t horizon, double delta, std::size_t functions) {
  if (horizon == 0) throw ParameterError("horizon must be positive");
  const auto l = static_cast<double>(confidence_rounds(delta));
  const double est = est_bound(functions, delta / (4.0 * l));
  return 8.0 * std::sqrt(l / static_cast<double>(horizon) * est);
}

}  // namespace maximin
