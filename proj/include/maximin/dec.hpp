#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "maximin/core.hpp"

namespace maximin {

// Functions within squared distance eps^2 of an anchor f_bar in co(F),
// measured under arm distribution q. Membership is the non-strict inequality.
struct VersionSet {
  std::vector<std::size_t> members;
  std::vector<double> anchor;  // mixture weights over functions
  ArmDistribution q;
  double eps = 0.0;

  bool empty() const { return members.empty(); }
};

// Pointwise mean of the mixture: f_bar(a) = sum_f w[f] means[f][a].
std::vector<double> mixture_means(const FunctionClass& cls, std::span<const double> weights);

// sum_a q(a) (x(a) - y(a))^2
double weighted_sq_distance(std::span<const double> q, std::span<const double> x,
                            std::span<const double> y);

VersionSet version_set(const FunctionClass& cls, std::span<const double> anchor,
                       const ArmDistribution& q, double eps);

struct DecResult {
  double value = 0.0;
  ArmDistribution p_witness;
  ArmDistribution q_witness;
  std::vector<double> anchor;
  double eps = 0.0;
  double alpha = 0.0;
  double search_resolution = 0.0;
  // decAt values are upper bounds of the true inf over (p, q); decSup values
  // are lower bounds of the true sup over anchors.
  enum class Bound { kUpper, kLower } bound = Bound::kUpper;
  std::vector<std::size_t> witness_members;
};

// The q-candidates searched by dec_at: uniform, every point mass, then the
// simplex grid with step `resolution` (compositions of round(1/resolution)).
class QCandidates {
 public:
  static constexpr std::size_t kMaxCandidates = 2'000'000;

  QCandidates(std::size_t arms, double resolution);

  std::size_t size() const { return candidates_.size(); }
  const ArmDistribution& operator[](std::size_t i) const { return candidates_[i]; }
  double resolution() const { return resolution_; }

 private:
  std::vector<ArmDistribution> candidates_;
  double resolution_;
};

// Solves inf_{p,q} sup_{f in H_{q,eps}(anchor)} P_{a~p}(gap_f(a) > alpha)
// over a fixed candidate family for q; the inner inf over p is exact (games
// LP on the gap indicators of the members). Empty version sets score 0.
// Ties go to the earliest candidate.
class DecSolver {
 public:
  DecSolver(const FunctionClass& cls, double alpha, double resolution);

  DecResult solve(std::span<const double> anchor_weights, double eps) const;
  // Same search with the anchor given directly as its pointwise means.
  DecResult solve_means(std::span<const double> anchor_means, double eps) const;

  // 1 - max_p min_{f in members} P_p(gap_f <= alpha), with its optimal p.
  std::pair<double, ArmDistribution> inner_value(const std::vector<std::size_t>& members) const;

  const QCandidates& candidates() const { return candidates_; }

 private:
  const FunctionClass* cls_;
  double alpha_;
  BinaryMatrix gaps_;
  QCandidates candidates_;
};

DecResult dec_at(const FunctionClass& cls, std::span<const double> anchor, double eps,
                 double alpha, double resolution);

enum class AnchorFamily { kVertices, kVerticesAndMidpoints };

// Vertices, optionally all pairwise midpoints, and the centroid.
std::vector<std::vector<double>> default_anchors(std::size_t functions, AnchorFamily family);

DecResult dec_sup(const FunctionClass& cls, double eps, double alpha,
                  const std::vector<std::vector<double>>& anchors, double resolution);

// Declared bound of the exponential-weights regression oracle:
// EST(T, delta) = 4 ln|F| + 16 ln(2/delta), independent of T.
double est_bound(std::size_t functions, double delta);

// L = ceil(log2(4/delta)).
std::size_t confidence_rounds(double delta);

// eps_bar(T) = 8 sqrt((L/T) * EST(2T/L, delta/(4L))).
double eps_bar(std::size_t horizon, double delta, std::size_t functions);

}  // namespace maximin
