#pragma once

// Brute-force reference computations used only by the tests. None of these
// call into the solver code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "maximin/core.hpp"

namespace maximin::oracle {

// Calls fn on every point of the simplex grid {k/steps} in `dims` dimensions.
inline void for_each_grid_point(std::size_t dims, std::size_t steps,
                                const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<std::size_t> counts(dims, 0);
  std::vector<double> p(dims, 0.0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == dims) {
      counts[i] = left;
      for (std::size_t a = 0; a < dims; ++a) {
        p[a] = static_cast<double>(counts[a]) / static_cast<double>(steps);
      }
      fn(p);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, steps);
}

inline std::size_t steps_for(double resolution) {
  return static_cast<std::size_t>(std::llround(1.0 / resolution));
}

// max over grid p of min_f sum_a p(a) B[f][a].
inline double grid_maximin(const BinaryMatrix& b, double resolution) {
  double best = -1.0;
  for_each_grid_point(b.cols(), steps_for(resolution), [&](const std::vector<double>& p) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < b.rows(); ++f) {
      double cov = 0.0;
      for (std::size_t a = 0; a < b.cols(); ++a) cov += p[a] * b(f, a);
      worst = std::min(worst, cov);
    }
    best = std::max(best, worst);
  });
  return best;
}

// Gap indicators recomputed from scratch.
inline bool alpha_optimal(const FunctionClass& cls, std::size_t f, std::size_t a, double alpha) {
  double best = 0.0;
  for (std::size_t x = 0; x < cls.arms(); ++x) best = std::max(best, cls.mean(f, x));
  return best - cls.mean(f, a) <= alpha;
}

// dec at a vertex/mixture anchor with both p and q on the simplex grid.
inline double brute_dec(const FunctionClass& cls, const std::vector<double>& anchor, double eps,
                        double alpha, double resolution) {
  std::vector<double> center(cls.arms(), 0.0);
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    for (std::size_t a = 0; a < cls.arms(); ++a) center[a] += anchor[f] * cls.mean(f, a);
  }
  std::vector<std::vector<double>> grid;
  for_each_grid_point(cls.arms(), steps_for(resolution),
                      [&](const std::vector<double>& p) { grid.push_back(p); });
  double best = 2.0;
  for (const auto& q : grid) {
    std::vector<std::size_t> members;
    for (std::size_t f = 0; f < cls.functions(); ++f) {
      double d = 0.0;
      for (std::size_t a = 0; a < cls.arms(); ++a) {
        d += q[a] * (cls.mean(f, a) - center[a]) * (cls.mean(f, a) - center[a]);
      }
      if (d <= eps * eps + 1e-12) members.push_back(f);
    }
    if (members.empty()) return 0.0;
    for (const auto& p : grid) {
      double worst = 0.0;
      for (std::size_t f : members) {
        double miss = 0.0;
        for (std::size_t a = 0; a < cls.arms(); ++a) {
          if (!alpha_optimal(cls, f, a, alpha)) miss += p[a];
        }
        worst = std::max(worst, miss);
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

inline double std_normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

// Bisection inverse of the standard normal CDF.
inline double std_normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// TV between N(m1, s^2) and N(m2, s^2): 2 Phi(|m1 - m2| / (2 s)) - 1.
inline double gaussian_shift_tv(double m1, double m2, double s) {
  return 2.0 * std_normal_cdf(std::abs(m1 - m2) / (2.0 * s)) - 1.0;
}

// Random class with entries drawn from a small value set so ties and
// near-ties occur often.
inline FunctionClass random_class(std::size_t funcs, std::size_t arms, std::mt19937_64& rng) {
  static const double values[] = {0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0};
  std::uniform_int_distribution<int> pick(0, 8);
  Matrix<double> m(funcs, arms);
  for (std::size_t f = 0; f < funcs; ++f) {
    for (std::size_t a = 0; a < arms; ++a) m(f, a) = values[pick(rng)];
  }
  return FunctionClass(std::move(m));
}

inline BinaryMatrix random_binary(std::size_t rows, std::size_t cols, double density,
                                  std::mt19937_64& rng) {
  std::bernoulli_distribution bit(density);
  BinaryMatrix b(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) b(r, c) = bit(rng) ? 1 : 0;
  }
  return b;
}

}  // namespace maximin::oracle
