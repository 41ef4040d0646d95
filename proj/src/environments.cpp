#include "maximin/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace maximin {

std::size_t TreeMeta::internal_arm_of(std::size_t path, std::size_t length) const {
  if (length >= depth) throw IndexError("internal node level beyond tree depth");
  if (path >= (std::size_t{1} << length)) throw IndexError("path does not fit its length");
  return (std::size_t{1} << length) - 1 + path;
}

std::size_t TreeMeta::bucket_arm(std::size_t leaf, std::size_t slot) const {
  if (leaf >= leaf_count() || slot >= bucket_size) throw IndexError("bucket arm out of range");
  return internal_count() + leaf * bucket_size + slot;
}

std::vector<std::size_t> TreeMeta::bucket_arms_of(std::size_t leaf) const {
  std::vector<std::size_t> out;
  out.reserve(bucket_size);
  for (std::size_t s = 0; s < bucket_size; ++s) out.push_back(bucket_arm(leaf, s));
  return out;
}

std::size_t TreeMeta::optimal_arm_of_function(std::size_t f) const {
  return bucket_arm(leaf_of_function(f), slot_of_function(f));
}

std::vector<std::size_t> TreeMeta::branch_arms(std::size_t f) const {
  const std::size_t leaf = leaf_of_function(f);
  std::vector<std::size_t> arms;
  arms.reserve(depth);
  for (std::size_t level = 0; level < depth; ++level) {
    arms.push_back(internal_arm_of(leaf >> (depth - level), level));
  }
  return arms;
}

namespace {

FunctionClass indicator_class(std::size_t k, const std::string& name, const char* prefix) {
  if (k == 0) throw ParameterError("indicator class needs at least one arm");
  if (k > kMaxArms) throw CapacityError("indicator class too large");
  Matrix<double> means(k, k, 0.0);
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    means(i, i) = 1.0;
    labels.push_back(prefix + std::to_string(i));
  }
  return FunctionClass(std::move(means), name, labels, {});
}

}  // namespace

FunctionClass make_k_armed_surrogate(std::size_t k) {
  return indicator_class(k, "k_armed_" + std::to_string(k), "e");
}

FunctionClass make_singletons(std::size_t n) {
  return indicator_class(n, "singletons_" + std::to_string(n), "1_");
}

std::pair<FunctionClass, TreeMeta> make_tree_class(std::size_t depth, std::size_t bucket_size) {
  if (depth == 0 || bucket_size == 0) throw ParameterError("tree depth and bucket size must be >= 1");
  if (depth >= 31) throw CapacityError("tree depth too large");
  TreeMeta meta{depth, bucket_size};
  if (meta.leaf_count() > kMaxFunctions / bucket_size || meta.arm_count() > kMaxArms) {
    throw CapacityError("tree class exceeds capacity");
  }

  Matrix<double> means(meta.function_count(), meta.arm_count(), 0.0);
  for (std::size_t f = 0; f < meta.function_count(); ++f) {
    const std::size_t leaf = meta.leaf_of_function(f);
    const auto branch = meta.branch_arms(f);
    for (std::size_t level = 0; level < depth; ++level) {
      const bool right = (leaf >> (depth - 1 - level)) & 1u;
      means(f, branch[level]) = right ? kRightEdgeValue : kLeftEdgeValue;
    }
    means(f, meta.optimal_arm_of_function(f)) = 1.0;
  }
  std::string name = "tree_d" + std::to_string(depth) + "_n" + std::to_string(bucket_size);
  return {FunctionClass(std::move(means), std::move(name)), meta};
}

std::vector<std::vector<double>> sphere_net(std::size_t dimension, double radius) {
  if (!(radius > 0.0)) throw ParameterError("net radius must be positive");
  std::vector<std::vector<double>> net;
  switch (dimension) {
    case 1:
      net = {{-1.0}, {1.0}};
      break;
    case 2: {
      // Midpoint between neighbours sits at chord 2 sin(theta/4) from both.
      const double theta = radius >= 2.0 ? 2.0 * std::numbers::pi
                                         : 4.0 * std::asin(std::min(1.0, radius / 2.0));
      const auto count = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / theta));
      if (count > kMaxArms) throw CapacityError("circle net too large");
      const std::size_t k = std::max<std::size_t>(count, 2);
      for (std::size_t i = 0; i < k; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
        net.push_back({std::cos(t), std::sin(t)});
      }
      break;
    }
    case 3: {
      auto fibonacci = [](std::size_t n) {
        std::vector<std::vector<double>> pts;
        pts.reserve(n);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < n; ++i) {
          const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double t = golden * static_cast<double>(i);
          pts.push_back({rho * std::cos(t), rho * std::sin(t), z});
        }
        return pts;
      };
      // Covering radius of a Fibonacci grid has no closed form; grow the
      // point count until a much denser probe grid is covered.
      auto n = static_cast<std::size_t>(std::ceil(4.0 / (radius * radius)));
      n = std::max<std::size_t>(n, 4);
      while (true) {
        if (n > kMaxArms) throw CapacityError("sphere net too large");
        auto candidate = fibonacci(n);
        const auto probe = fibonacci(std::max<std::size_t>(16 * n, 4096));
        double worst = 0.0;
        for (const auto& q : probe) {
          double best = 4.0;
          for (const auto& p : candidate) {
            const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
            best = std::min(best, dx * dx + dy * dy + dz * dz);
          }
          worst = std::max(worst, best);
        }
        if (std::sqrt(worst) <= 0.9 * radius) {
          net = std::move(candidate);
          break;
        }
        n = n + n / 4 + 1;
      }
      break;
    }
    default:
      throw ParameterError("sphere net dimension must be 1, 2 or 3");
  }
  return net;
}

FunctionClass make_linear_net_class(std::size_t dimension, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
  const auto net = sphere_net(dimension, alpha / 2.0);
  const std::size_t k = net.size();
  Matrix<double> means(k, k, 0.0);
  for (std::size_t w = 0; w < k; ++w) {
    for (std::size_t x = 0; x < k; ++x) {
      double dot = 0.0;
      for (std::size_t i = 0; i < dimension; ++i) dot += net[w][i] * net[x][i];
      means(w, x) = std::clamp((dot + 1.0) / 2.0, 0.0, 1.0);
    }
  }
  return FunctionClass(std::move(means), "linear_d" + std::to_string(dimension));
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

double normal_quantile(double p, double mu, double sigma) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(mu, sigma), p);
}

double PiecewiseUniform::pdf(double x) const {
  if (breakpoints.size() < 2 || x < breakpoints.front() || x > breakpoints.back()) return 0.0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t bucket = static_cast<std::size_t>(it - breakpoints.begin());
  bucket = bucket == 0 ? 0 : bucket - 1;
  if (bucket >= masses.size()) bucket = masses.size() - 1;
  const double width = breakpoints[bucket + 1] - breakpoints[bucket];
  return masses[bucket] / width;
}

PiecewiseUniform make_gaussian_histogram(double mu, double sigma, double eps) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ParameterError("mu must lie in [0,1]");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
  if (eps < 1e-9) throw PrecisionError("eps below quadrature resolution");

  PiecewiseUniform h;
  h.c1 = normal_quantile(eps / 4.0, 0.0, sigma);
  h.c2 = normal_quantile(1.0 - eps / 4.0, 1.0, sigma);
  h.lipschitz = 1.0 / (sigma * sigma * std::sqrt(2.0 * std::numbers::pi * std::numbers::e));
  const double span = h.c2 - h.c1;
  const double w_real = std::ceil(h.lipschitz * span * span / eps);
  if (!(w_real <= 1e6)) throw PrecisionError("histogram needs too many buckets");
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(w_real));
  h.middle_buckets = w;

  const double width = span / static_cast<double>(w);
  // End buckets are nominally one middle-bucket wide; they hold no mass.
  h.breakpoints.reserve(w + 3);
  h.breakpoints.push_back(h.c1 - width);
  for (std::size_t i = 0; i <= w; ++i) {
    h.breakpoints.push_back(i == w ? h.c2 : h.c1 + width * static_cast<double>(i));
  }
  h.breakpoints.push_back(h.c2 + width);

  h.masses.assign(w + 2, 0.0);
  const double lift = eps / (2.0 * static_cast<double>(w));
  double total = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double l = h.breakpoints[i + 1];
    const double r = h.breakpoints[i + 2];
    const double m = normal_cdf(r, mu, sigma) - normal_cdf(l, mu, sigma) + lift;
    h.masses[i + 1] = m;
    total += m;
  }
  for (double& m : h.masses) m /= total;
  return h;
}

Density normal_density(double mu, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  const double z = 5.0;  // two-sided tail mass 5.7e-7
  return Density{[mu, sigma](double x) {
                   const double u = (x - mu) / sigma;
                   return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
                 },
                 mu - z * sigma, mu + z * sigma};
}

Density histogram_density(const PiecewiseUniform& h) {
  if (h.breakpoints.size() < 2) throw ParameterError("empty histogram");
  return Density{[h](double x) { return h.pdf(x); }, h.breakpoints.front(), h.breakpoints.back()};
}

double tv_distance(const Density& a, const Density& b, double step) {
  if (!(step > 0.0)) throw ParameterError("quadrature step must be positive");
  const double lo = std::min(a.lo, b.lo);
  const double hi = std::max(a.hi, b.hi);
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  if (n > 500'000'000) throw PrecisionError("quadrature grid too fine");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * step;
    acc += std::abs(a.pdf(x) - b.pdf(x));
  }
  return 0.5 * acc * step;
}

}  // namespace maximin
