#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "maximin/core.hpp"

namespace maximin {

// Hard limits on constructed instances.
inline constexpr std::size_t kMaxArms = 1u << 16;
inline constexpr std::size_t kMaxFunctions = 1u << 16;

// Edge values of the tree class: left child 1/3, right child 2/3.
inline constexpr double kLeftEdgeValue = 1.0 / 3.0;
inline constexpr double kRightEdgeValue = 2.0 / 3.0;

// Layout of the binary tree class. Internal nodes are numbered breadth-first
// (root 0, children of node i at 2i+1 and 2i+2) and take arm index = node
// index. Bucket arms follow, leaf by leaf, left to right.
struct TreeMeta {
  std::size_t depth = 1;
  std::size_t bucket_size = 1;

  std::size_t leaf_count() const { return std::size_t{1} << depth; }
  std::size_t internal_count() const { return leaf_count() - 1; }
  std::size_t arm_count() const { return internal_count() + leaf_count() * bucket_size; }
  std::size_t function_count() const { return leaf_count() * bucket_size; }

  // Internal arm reached by following `path` from the root; bit k (from the
  // most significant of `length` bits) set means "went right" at level k.
  std::size_t internal_arm_of(std::size_t path, std::size_t length) const;
  std::size_t bucket_arm(std::size_t leaf, std::size_t slot) const;
  std::vector<std::size_t> bucket_arms_of(std::size_t leaf) const;

  // Function index = leaf * bucket_size + slot.
  std::size_t leaf_of_function(std::size_t f) const { return f / bucket_size; }
  std::size_t slot_of_function(std::size_t f) const { return f % bucket_size; }
  std::size_t optimal_arm_of_function(std::size_t f) const;
  // The internal arms on the root-to-leaf branch of function f, in order.
  std::vector<std::size_t> branch_arms(std::size_t f) const;
};

FunctionClass make_k_armed_surrogate(std::size_t k);
// Same matrix as the K-armed surrogate; the finite truncation of the
// singleton-indicator family over the naturals.
FunctionClass make_singletons(std::size_t n);
std::pair<FunctionClass, TreeMeta> make_tree_class(std::size_t depth, std::size_t bucket_size);
// Arms are an (alpha/2)-net of the unit sphere S^{d-1}; functions use the same
// net as weights. Means are (w.x + 1)/2, so gaps are half the raw inner
// product gaps.
FunctionClass make_linear_net_class(std::size_t dimension, double alpha);
// Deterministic net of S^{d-1} with covering radius <= radius.
std::vector<std::vector<double>> sphere_net(std::size_t dimension, double radius);

// Histogram density on m = w + 2 buckets [c_0, c_1), ..., [c_{m-1}, c_m].
// The end buckets carry no mass.
struct PiecewiseUniform {
  std::vector<double> breakpoints;  // size m + 1, strictly increasing
  std::vector<double> masses;       // size m, sum 1
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t middle_buckets = 0;   // w
  double lipschitz = 0.0;           // L

  std::size_t bucket_count() const { return masses.size(); }
  double pdf(double x) const;
};

PiecewiseUniform make_gaussian_histogram(double mu, double sigma, double eps);

// A density with a finite interval that holds all but ~1e-6 of its mass.
struct Density {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 0.0;
};

Density normal_density(double mu, double sigma);
Density histogram_density(const PiecewiseUniform& h);

// 0.5 * integral |pA - pB| by midpoint rule over the union of both ranges.
double tv_distance(const Density& a, const Density& b, double step);

double normal_cdf(double x, double mu = 0.0, double sigma = 1.0);
double normal_quantile(double p, double mu = 0.0, double sigma = 1.0);

}  // namespace maximin
