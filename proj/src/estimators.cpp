#include "maximin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "maximin/errors.hpp"

namespace maximin {

namespace {

std::uint64_t checked_ceil(double x) {
  if (!(x < 1e18)) throw CapacityError("sample count overflows");
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace

MoMConfig MoMConfig::for_confidence(double delta, double c_m) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(c_m > 0.0)) throw ParameterError("c_M must be positive");
  const auto k = static_cast<std::size_t>(std::ceil(std::log(2.0 / delta)));
  return MoMConfig{std::max<std::size_t>(k, 1), c_m};
}

std::uint64_t chernoff_sample_count(double alpha, double delta, std::uint64_t m) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (m == 0) throw ParameterError("m must be >= 1");
  return checked_ceil(8.0 / (alpha * alpha) * std::log(4.0 * static_cast<double>(m) / delta));
}

std::uint64_t mom_sample_count(double alpha, double delta, double sigma, double c_m,
                               std::uint64_t m) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(c_m > 0.0)) throw ParameterError("c_M must be positive");
  if (m == 0) throw ParameterError("m must be >= 1");
  return checked_ceil(16.0 * c_m * sigma * sigma *
                      std::log(2.0 * static_cast<double>(m) / delta) / (alpha * alpha));
}

double empirical_mean(std::span<const double> samples) {
  if (samples.empty()) throw ParameterError("empirical mean of no samples");
  double sum = 0.0;
  for (double x : samples) sum += x;
  return sum / static_cast<double>(samples.size());
}

double median_of_means(std::span<const double> samples, const MoMConfig& config) {
  if (config.groups == 0) throw ParameterError("median of means needs K >= 1");
  if (samples.size() < config.groups) throw ParameterError("fewer samples than groups");
  const std::size_t k = config.groups;
  const std::size_t b = samples.size() / k;
  std::vector<double> means(k);
  for (std::size_t g = 0; g < k; ++g) means[g] = empirical_mean(samples.subspan(g * b, b));
  const std::size_t mid = (k - 1) / 2;
  std::nth_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid), means.end());
  return means[mid];
}

}  // namespace maximin
