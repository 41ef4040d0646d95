#include <doctest.h>

#include <cmath>
#include <random>

#include "maximin/environments.hpp"
#include "maximin/games.hpp"
#include "oracles.hpp"

using namespace maximin;

TEST_CASE("k-armed surrogate") {
  CHECK(gamma(make_k_armed_surrogate(1), 0.5).value == doctest::Approx(1.0));
  CHECK(gamma(make_k_armed_surrogate(4), 0.5).value == doctest::Approx(0.25));
  CHECK(gamma(make_k_armed_surrogate(10), 0.99).value == doctest::Approx(0.1));
  CHECK_THROWS_AS(make_k_armed_surrogate(0), ParameterError);
  const auto cls = make_k_armed_surrogate(5);
  for (std::size_t f = 0; f < 5; ++f) {
    for (std::size_t a = 0; a < 5; ++a) CHECK(cls.mean(f, a) == (f == a ? 1.0 : 0.0));
  }
}

TEST_CASE("singletons") {
  CHECK(gamma(make_singletons(1), 0.5).value == doctest::Approx(1.0));
  CHECK(gamma(make_singletons(2), 0.5).value == doctest::Approx(0.5));
  CHECK(gamma(make_singletons(64), 0.5).value == doctest::Approx(1.0 / 64.0));
  CHECK_THROWS_AS(make_singletons(0), ParameterError);
}

TEST_CASE("tree layout for d=1, N=2") {
  const auto [cls, meta] = make_tree_class(1, 2);
  CHECK(cls.arms() == 5);
  CHECK(cls.functions() == 4);
  CHECK(meta.internal_count() == 1);
  for (std::size_t f = 0; f < 4; ++f) {
    const double root = cls.mean(f, 0);
    CHECK((root == doctest::Approx(1.0 / 3.0) || root == doctest::Approx(2.0 / 3.0)));
    CHECK(root == doctest::Approx(meta.leaf_of_function(f) == 0 ? 1.0 / 3.0 : 2.0 / 3.0));
  }
  CHECK(meta.bucket_arms_of(0) == std::vector<std::size_t>{1, 2});
  CHECK(meta.bucket_arms_of(1) == std::vector<std::size_t>{3, 4});
}

TEST_CASE("tree invariants and closed-form gamma") {
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto [cls, meta] = make_tree_class(d, n);
      CHECK(cls.arms() == (std::size_t{1} << d) - 1 + (std::size_t{1} << d) * n);
      CHECK(cls.functions() == (std::size_t{1} << d) * n);
      for (std::size_t f = 0; f < cls.functions(); ++f) {
        const auto branch = meta.branch_arms(f);
        REQUIRE(branch.size() == d);
        std::size_t ones = 0, thirds = 0;
        for (std::size_t a = 0; a < cls.arms(); ++a) {
          const double v = cls.mean(f, a);
          const bool on_branch = std::find(branch.begin(), branch.end(), a) != branch.end();
          if (on_branch) {
            CHECK((std::abs(v - 1.0 / 3.0) < 1e-12 || std::abs(v - 2.0 / 3.0) < 1e-12));
            ++thirds;
          } else if (v == 1.0) {
            ++ones;
            CHECK(a == meta.optimal_arm_of_function(f));
          } else {
            CHECK(v == 0.0);
          }
        }
        CHECK(ones == 1);
        CHECK(thirds == d);
      }
      const double expected = 1.0 / static_cast<double>(cls.functions());
      CHECK(gamma(cls, 0.1).value == doctest::Approx(expected));
      CHECK(gamma(cls, 0.3).value == doctest::Approx(expected));
    }
  }
  CHECK(gamma(make_tree_class(3, 1).first, 0.1).value == doctest::Approx(0.125));
}

TEST_CASE("tree internal arm numbering follows the path bits") {
  const TreeMeta meta{3, 1};
  CHECK(meta.internal_arm_of(0, 0) == 0);
  CHECK(meta.internal_arm_of(0, 1) == 1);
  CHECK(meta.internal_arm_of(1, 1) == 2);
  CHECK(meta.internal_arm_of(3, 2) == 6);
  CHECK(meta.bucket_arm(0, 0) == 7);
  CHECK(meta.bucket_arm(7, 0) == 14);
}

TEST_CASE("tree capacity errors") {
  CHECK_THROWS_AS(make_tree_class(16, 1), CapacityError);
  CHECK_THROWS_AS(make_tree_class(10, 100), CapacityError);
  CHECK_THROWS_AS(make_tree_class(0, 1), ParameterError);
  CHECK_THROWS_AS(make_tree_class(2, 0), ParameterError);
}

TEST_CASE("linear net class d=1") {
  const auto cls = make_linear_net_class(1, 0.5);
  CHECK(cls.arms() == 2);
  CHECK(cls.functions() == 2);
  CHECK(gamma(cls, 0.5).value == doctest::Approx(0.5));
  // Gaps are 1 after rescaling, so alpha = 1 covers every arm.
  CHECK(gamma(cls, 1.0).value == doctest::Approx(1.0));
}

TEST_CASE("sphere nets cover the sphere") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t dim : {2, 3}) {
    for (double radius : {0.5, 0.2, 0.1}) {
      const auto net = sphere_net(dim, radius);
      for (const auto& x : net) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        CHECK(n2 == doctest::Approx(1.0));
      }
      for (int probe = 0; probe < 2000; ++probe) {
        std::vector<double> y(dim);
        double n2 = 0.0;
        for (auto& v : y) {
          v = g(rng);
          n2 += v * v;
        }
        for (auto& v : y) v /= std::sqrt(n2);
        double best = 1e9;
        for (const auto& x : net) {
          double d2 = 0.0;
          for (std::size_t i = 0; i < dim; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
          best = std::min(best, std::sqrt(d2));
        }
        CHECK(best <= radius);
      }
    }
  }
}

TEST_CASE("linear net gamma is at least one over the net size") {
  for (std::size_t dim : {2, 3}) {
    const auto cls = make_linear_net_class(dim, 0.4);
    const double g = gamma(cls, 0.4).value;
    CHECK(g >= 1.0 / static_cast<double>(cls.arms()) - 1e-9);
    CHECK(g <= 1.0);
  }
  const auto cls = make_linear_net_class(2, 0.2);
  CHECK(gamma(cls, 0.2).value >= 1.0 / static_cast<double>(cls.arms()) - 1e-9);
}

TEST_CASE("gaussian histogram construction") {
  const auto h = make_gaussian_histogram(0.0, 1.0, 0.1);
  CHECK(h.c1 == doctest::Approx(oracle::std_normal_quantile(0.025)).epsilon(1e-9));
  CHECK(h.c1 == doctest::Approx(-1.959964).epsilon(1e-6));
  CHECK(h.c2 == doctest::Approx(1.0 + oracle::std_normal_quantile(0.975)).epsilon(1e-9));
  const double lip = 1.0 / std::sqrt(2.0 * M_PI * std::exp(1.0));
  CHECK(h.lipschitz == doctest::Approx(lip));
  const auto w = static_cast<std::size_t>(std::ceil(lip * (h.c2 - h.c1) * (h.c2 - h.c1) / 0.1));
  CHECK(h.middle_buckets == w);
  CHECK(h.bucket_count() == w + 2);
  CHECK(h.breakpoints.size() == w + 3);
  CHECK(h.masses.front() == 0.0);
  CHECK(h.masses.back() == 0.0);
  double total = 0.0;
  for (double m : h.masses) {
    CHECK(m >= 0.0);
    total += m;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < h.breakpoints.size(); ++i) CHECK(h.breakpoints[i] > h.breakpoints[i - 1]);
  // Density is flat inside a bucket.
  const double lo = h.breakpoints[3], hi = h.breakpoints[4];
  CHECK(h.pdf(lo + 0.1 * (hi - lo)) == doctest::Approx(h.pdf(lo + 0.9 * (hi - lo))));
}

TEST_CASE("gaussian histogram parameter checks") {
  CHECK_THROWS_AS(make_gaussian_histogram(1.5, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(make_gaussian_histogram(0.5, 0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(make_gaussian_histogram(0.5, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(make_gaussian_histogram(0.5, 1.0, 1e-12), PrecisionError);
}

TEST_CASE("gaussian histogram stays within eps in TV") {
  for (double mu : {0.0, 0.5, 1.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double eps : {0.05, 0.1, 0.5, 0.9}) {
        const auto h = make_gaussian_histogram(mu, sigma, eps);
        const double tv = tv_distance(normal_density(mu, sigma), histogram_density(h), 1e-3);
        INFO("mu=" << mu << " sigma=" << sigma << " eps=" << eps);
        CHECK(tv <= eps);
      }
    }
  }
}

TEST_CASE("tv distance") {
  const auto a = normal_density(0.0, 1.0);
  const auto b = normal_density(1.0, 1.0);
  CHECK(tv_distance(a, a, 1e-3) == doctest::Approx(0.0));
  const double shift = tv_distance(a, b, 1e-4);
  CHECK(shift == doctest::Approx(oracle::gaussian_shift_tv(0.0, 1.0, 1.0)).epsilon(1e-5));
  CHECK(shift == doctest::Approx(0.3829).epsilon(1e-3));
  CHECK(tv_distance(b, a, 1e-4) == doctest::Approx(shift));
  const auto h = histogram_density(make_gaussian_histogram(0.3, 0.7, 0.2));
  CHECK(tv_distance(a, h, 1e-3) == doctest::Approx(tv_distance(h, a, 1e-3)));
  CHECK_THROWS_AS(tv_distance(a, b, 0.0), ParameterError);
}

TEST_CASE("normal quantile agrees with the bisection inverse") {
  for (double p : {1e-6, 0.01, 0.025, 0.3, 0.5, 0.9, 0.999}) {
    CHECK(normal_quantile(p) == doctest::Approx(oracle::std_normal_quantile(p)).epsilon(1e-9));
    CHECK(normal_cdf(normal_quantile(p, 1.0, 2.0), 1.0, 2.0) == doctest::Approx(p).epsilon(1e-9));
  }
}
