#include <doctest.h>

#include <cmath>
#include <map>

#include "maximin/games.hpp"
#include "maximin/harness.hpp"

using namespace maximin;

namespace {

json tree_run(std::size_t depth, const std::string& noise, const std::string& learner,
              std::size_t trials, std::uint64_t seed) {
  return json{{"kind", "run"},
              {"class", {{"constructor", "tree"}, {"depth", depth}, {"bucket_size", 1}}},
              {"noise", noise},
              {"learner", {{"name", learner}, {"alpha", 0.2}, {"delta", 0.1}}},
              {"trials", trials},
              {"seed", seed}};
}

// Replays a fixed answer string.
class ScriptedSource : public RewardSource {
 public:
  explicit ScriptedSource(std::vector<double> answers) : answers_(std::move(answers)) {}
  double pull(std::size_t) override { return answers_.at(next_++); }

 private:
  std::vector<double> answers_;
  std::size_t next_ = 0;
};

}  // namespace

TEST_CASE("deterministic noise gives certain success for every learner") {
  for (const std::string learner : {"algorithm1", "tree_descent"}) {
    const auto cfg = ExperimentConfig::from_json(tree_run(2, "deterministic", learner, 40, 5));
    const auto stats = monte_carlo(cfg, 1);
    CHECK(stats.success_rate == 1.0);
    CHECK(stats.errors == 0);
  }
  json e2d = tree_run(2, "deterministic", "e2d", 10, 5);
  e2d["learner"]["horizon"] = 100;
  CHECK(monte_carlo(ExperimentConfig::from_json(e2d), 1).success_rate == 1.0);
}

TEST_CASE("monte carlo: algorithm1 on the depth-2 tree") {
  const auto cfg = ExperimentConfig::from_json(tree_run(2, "bernoulli", "algorithm1", 500, 17));
  const auto stats = monte_carlo(cfg);
  CHECK(stats.records.size() == 500);
  CHECK(stats.success_rate >= 0.9 - stats.half_width);
  for (std::size_t i = 0; i < stats.records.size(); ++i) CHECK(stats.records[i].trial == i);
}

TEST_CASE("monte carlo: looser delta costs fewer queries") {
  auto loose = tree_run(2, "bernoulli", "algorithm1", 200, 3);
  loose["learner"]["delta"] = 0.5;
  auto tight = tree_run(2, "bernoulli", "algorithm1", 200, 3);
  tight["learner"]["delta"] = 0.05;
  const auto a = monte_carlo(ExperimentConfig::from_json(loose));
  const auto b = monte_carlo(ExperimentConfig::from_json(tight));
  CHECK(a.success_rate >= 0.5 - a.half_width);
  CHECK(a.mean_queries < b.mean_queries);
}

TEST_CASE("records are reproducible, order-independent and round-trip") {
  const auto cfg = ExperimentConfig::from_json(tree_run(2, "bernoulli", "algorithm1", 60, 99));
  const auto serial = records_to_csv(monte_carlo(cfg, 1).records);
  const auto again = records_to_csv(monte_carlo(cfg, 1).records);
  const auto parallel = records_to_csv(monte_carlo(cfg, 4).records);
  CHECK(serial == again);
  CHECK(serial == parallel);
  CHECK(serial.rfind(std::string(kCsvHeader) + "\n", 0) == 0);

  const auto inst = build_instance(cfg.class_spec);
  for (const auto& r : monte_carlo(cfg, 2).records) CHECK(recompute_success(inst.cls, r) == r.success);
  const auto j = records_to_json(monte_carlo(cfg, 1).records);
  CHECK(j.size() == 60);
  CHECK(j[0].contains("runtime_ms"));
}

TEST_CASE("per-trial failures become error tags") {
  json cfg = tree_run(2, "gaussian", "algorithm1", 3, 1);
  cfg["noise"] = {{"kind", "gaussian"}, {"sigma", 0.5}};
  const auto stats = monte_carlo(ExperimentConfig::from_json(cfg), 1);
  CHECK(stats.errors == 3);
  CHECK(stats.success_rate == 0.0);
  for (const auto& r : stats.records) CHECK_FALSE(r.error.empty());
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), ParameterError);
  json bad = tree_run(2, "bernoulli", "algorithm1", 1, 0);
  bad["trials"] = 0;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ParameterError);
  bad["trials"] = 1;
  bad["format"] = "xml";
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ParameterError);
  CHECK_THROWS_AS(build_instance(json{{"constructor", "cube"}}), ParameterError);
}

TEST_CASE("certify: reward-blind witness covers gamma") {
  const auto inst = build_instance(json{{"constructor", "k_armed"}, {"k", 4}});
  LearnerParams p;
  p.alpha = 0.5;
  p.delta = 0.1;
  const auto learner = make_certifiable("witness", inst, p);
  const auto r = certify_lower_bound(inst.cls, learner, 0.5, 0.1, 20000, 7);
  CHECK(r.budget == 0);
  CHECK(r.bound == doctest::Approx(0.9));
  // T = 0 so the bound is (1 - delta); coverage of the witness is gamma = 1/4.
  CHECK(r.min_coverage == doctest::Approx(0.25).epsilon(0.1));
  CHECK_FALSE(r.holds);
}

TEST_CASE("certify: fixed arm that is optimal for every function") {
  Matrix<double> m(3, 2, 0.0);
  m(0, 0) = 1.0;
  m(1, 0) = 0.8;
  m(1, 1) = 0.8;
  m(2, 0) = 0.5;
  m(2, 1) = 0.2;
  const Instance inst{FunctionClass(std::move(m)), std::nullopt};
  LearnerParams p;
  p.alpha = 0.1;
  const auto learner = make_certifiable("fixed_arm", inst, p, json{{"arm", 0}});
  const auto r = certify_lower_bound(inst.cls, learner, 0.1, 0.1, 1000, 1);
  CHECK(r.min_coverage == 1.0);
  CHECK(r.holds);
}

TEST_CASE("certify: tree descent at T = 2 matches exhaustive enumeration") {
  const auto inst = build_instance(json{{"constructor", "tree"}, {"depth", 1}, {"bucket_size", 1}});
  LearnerParams p;
  p.alpha = 0.1;
  p.delta = 0.1;
  p.reps_per_stage = 1;
  const auto learner = make_certifiable("tree_descent", inst, p);
  REQUIRE(learner.budget == 2);

  // Exact output distribution over the four equally likely answer strings.
  std::map<std::size_t, double> exact;
  for (int bits = 0; bits < 4; ++bits) {
    ScriptedSource src({static_cast<double>(bits & 1), static_cast<double>((bits >> 1) & 1)});
    std::mt19937_64 rng(0);
    exact[learner.run(src, rng).output_arm] += 0.25;
  }
  const auto b = gap_matrix(inst.cls, 0.1);
  double exact_min = 1.0;
  for (std::size_t f = 0; f < inst.cls.functions(); ++f) {
    double cov = 0.0;
    for (const auto& [arm, prob] : exact) cov += prob * b(f, arm);
    exact_min = std::min(exact_min, cov);
  }
  CHECK(exact_min == doctest::Approx(0.5));

  const auto r = certify_lower_bound(inst.cls, learner, 0.1, 0.1, 100000, 11);
  CHECK(r.bound == doctest::Approx(0.9 * 0.25));
  CHECK(std::abs(r.min_coverage - exact_min) <= 3.0 * std::sqrt(0.25 / 100000.0) * 2.0);
  CHECK(r.holds);
}

TEST_CASE("certify: budget cap") {
  const auto inst = build_instance(json{{"constructor", "tree"}, {"depth", 2}, {"bucket_size", 1}});
  LearnerParams p;
  p.alpha = 0.1;
  p.delta = 0.1;
  const auto learner = make_certifiable("tree_descent", inst, p);
  CHECK(learner.budget > kMaxCertifyBudget);
  CHECK_THROWS_AS(certify_lower_bound(inst.cls, learner, 0.1, 0.1, 10, 0), ParameterError);
  CHECK_THROWS_AS(make_certifiable("e2d", inst, p), ParameterError);
}

TEST_CASE("adaptivity experiment") {
  LearnerParams p;
  p.alpha = 0.1;
  p.delta = 0.1;
  const auto r5 = adaptivity_experiment(5, 2000, 13, p);
  CHECK(r5.non_adaptive_budget == 3);
  CHECK(r5.non_adaptive_failure_rate >= 0.45);
  CHECK(r5.adaptive_success_rate == 1.0);
  CHECK(r5.separation_holds);

  const auto r3 = adaptivity_experiment(3, 200, 13, p);
  CHECK(r3.adaptive_success_rate == 1.0);
  // At alpha = 0.5 the per-node term dominates, so doubling d about doubles
  // the adaptive count while 1/gamma grows 16-fold.
  LearnerParams coarse = p;
  coarse.alpha = 0.5;
  const auto r4 = adaptivity_experiment(4, 100, 1, coarse);
  const auto r8 = adaptivity_experiment(8, 100, 1, coarse);
  const double ratio = r8.adaptive_mean_queries / r4.adaptive_mean_queries;
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.5);
  CHECK(r4.gamma / r8.gamma == doctest::Approx(16.0));
  CHECK(r4.non_adaptive_budget == 1);
  CHECK(r8.non_adaptive_budget == 25);
  CHECK_THROWS_AS(adaptivity_experiment(2, 10, 0, p), ParameterError);
}

TEST_CASE("sweep over bucket size and alpha") {
  json base = {{"kind", "sweep"},
               {"noise", "deterministic"},
               {"learner", {{"name", "tree_descent"}, {"alpha", 0.2}, {"delta", 0.1}}},
               {"trials", 5},
               {"seed", 2},
               {"cells",
                {{{"class", {{"constructor", "tree"}, {"depth", 4}, {"bucket_size", 1}}}},
                 {{"class", {{"constructor", "tree"}, {"depth", 3}, {"bucket_size", 2}}}},
                 {{"class", {{"constructor", "tree"}, {"depth", 2}, {"bucket_size", 4}}}},
                 {{"class", {{"constructor", "tree"}, {"depth", 1}, {"bucket_size", 8}}}}}}};
  const auto rows = sweep(ExperimentConfig::from_json(base));
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].stats.mean_queries > rows[i - 1].stats.mean_queries);
  }

  json grid = {{"kind", "sweep"},
               {"class", {{"constructor", "k_armed"}, {"k", 2}}},
               {"noise", "bernoulli"},
               {"learner", {{"name", "algorithm1"}, {"alpha", 0.1}, {"delta", 0.1}}},
               {"trials", 2},
               {"seed", 2},
               {"grid", {{"learner.alpha", {0.1, 0.2, 0.4}}}}};
  const auto arows = sweep(ExperimentConfig::from_json(grid));
  REQUIRE(arows.size() == 3);
  CHECK(arows[0].stats.mean_queries / arows[2].stats.mean_queries > 10.0);
  const auto csv = sweep_to_csv(arows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  // A single-cell sweep matches the plain Monte Carlo of that cell.
  json one = tree_run(2, "bernoulli", "algorithm1", 10, 4);
  one["id"] = "x";
  one["cells"] = json::array({json::object()});
  const auto cfg = ExperimentConfig::from_json(one);
  const auto single = sweep(cfg);
  auto cell_cfg = one;
  cell_cfg.erase("cells");
  cell_cfg["seed"] = derive_seed(4, 0x5eed);
  cell_cfg["id"] = "x/cell0";
  CHECK(records_to_csv(single[0].stats.records) ==
        records_to_csv(monte_carlo(ExperimentConfig::from_json(cell_cfg)).records));
}

TEST_CASE("half width helpers") {
  CHECK(binomial_half_width(0.5, 100) == doctest::Approx(2.5758 * 0.05));
  CHECK(three_sigma(0.9, 500) == doctest::Approx(3.0 * std::sqrt(0.09 / 500)));
}

TEST_CASE("experiment id ignores output destination") {
  json a = tree_run(2, "bernoulli", "algorithm1", 1, 0);
  json b = a;
  b["out"] = "/tmp/elsewhere.csv";
  b["format"] = "json";
  CHECK(ExperimentConfig::from_json(a).id == ExperimentConfig::from_json(b).id);
  b["seed"] = 1;
  CHECK(ExperimentConfig::from_json(a).id != ExperimentConfig::from_json(b).id);
}
