#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace maximin {

struct MoMConfig {
  std::size_t groups = 1;  // K
  double c_m = 4.0;

  // K = ceil(ln(2/delta)).
  static MoMConfig for_confidence(double delta, double c_m = 4.0);
};

// ceil((8/alpha^2) ln(4m/delta)): Hoeffding at deviation alpha/4 with
// failure delta/(2m) per arm.
std::uint64_t chernoff_sample_count(double alpha, double delta, std::uint64_t m);

// ceil(16 c_M sigma^2 ln(2m/delta) / alpha^2) samples per arm for the
// median-of-means learner.
std::uint64_t mom_sample_count(double alpha, double delta, double sigma, double c_m,
                               std::uint64_t m);

double empirical_mean(std::span<const double> samples);

// Median of K consecutive group means of floor(n/K) samples each; the tail
// remainder is dropped. Lower median for even K.
double median_of_means(std::span<const double> samples, const MoMConfig& config);

}  // namespace maximin
