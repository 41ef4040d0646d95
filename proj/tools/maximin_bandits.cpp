// maximin-bandits: command-line front end for the experiment harness.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "maximin/dec.hpp"
#include "maximin/environments.hpp"
#include "maximin/games.hpp"
#include "maximin/harness.hpp"
#include "maximin/io.hpp"

namespace {

using maximin::json;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<std::size_t> trials;
};

void add_common(CLI::App* sub, CommonOptions& opts, bool config_required) {
  auto* cfg = sub->add_option("--config", opts.config_path, "JSON config (or class) file");
  if (config_required) cfg->required();
  sub->add_option("--seed", opts.seed, "master seed");
  sub->add_option("--out", opts.out, "output path (default stdout)");
  sub->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--trials", opts.trials, "number of trials");
}

// Relative file references inside a config are taken from the config's directory.
void rebase_path(json& node, const char* key, const std::filesystem::path& base) {
  if (!node.is_object() || !node.contains(key) || !node.at(key).is_string()) return;
  const std::filesystem::path p = node.at(key).get<std::string>();
  if (p.is_relative()) node[key] = (base / p).lexically_normal().string();
}

json load_config(const CommonOptions& opts) {
  json j = opts.config_path.empty() ? json::object() : maximin::read_json_file(opts.config_path);
  if (!opts.config_path.empty()) {
    const auto base = std::filesystem::path(opts.config_path).parent_path();
    if (j.contains("class")) rebase_path(j["class"], "path", base);
    rebase_path(j, "anchors_file", base);
  }
  if (opts.seed) j["seed"] = *opts.seed;
  if (!opts.out.empty()) j["out"] = opts.out;
  if (!opts.format.empty()) j["format"] = opts.format;
  if (opts.trials) j["trials"] = *opts.trials;
  return j;
}

// The class may be the whole file (a bare FunctionClass) or its "class" entry.
json class_spec_of(const json& j) {
  if (j.contains("class")) return j.at("class");
  if (j.contains("means")) return j;
  throw maximin::ParameterError("config has no class");
}

void emit(const json& cfg, const std::string& text) {
  const std::string out = cfg.value("out", std::string{});
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    maximin::write_text_file(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximin-volume bandit engine"};
  app.require_subcommand(1);

  CommonOptions gamma_opts, dec_opts, run_opts, sweep_opts, certify_opts, adapt_opts, disc_opts;

  auto* gamma_cmd = app.add_subcommand("gamma", "generalized maximin volume of a class");
  add_common(gamma_cmd, gamma_opts, true);
  std::optional<double> gamma_alpha, gamma_tol;
  gamma_cmd->add_option("--alpha", gamma_alpha, "accuracy alpha in (0,1]");
  gamma_cmd->add_option("--tolerance", gamma_tol, "LP tolerance");

  auto* dec_cmd = app.add_subcommand("dec", "DEC variant of a class");
  add_common(dec_cmd, dec_opts, true);
  std::optional<double> dec_eps, dec_alpha, dec_res;
  std::string dec_anchors = "vertices+midpoints";
  std::string dec_anchor_file;
  dec_cmd->add_option("--eps", dec_eps, "version-set radius");
  dec_cmd->add_option("--alpha", dec_alpha, "accuracy alpha");
  dec_cmd->add_option("--resolution", dec_res, "q-grid step");
  dec_cmd->add_option("--anchors", dec_anchors, "vertices | vertices+midpoints | file")
      ->check(CLI::IsMember({"vertices", "vertices+midpoints", "file"}));
  dec_cmd->add_option("--anchors-file", dec_anchor_file, "JSON array of mixtures for --anchors file");

  auto* run_cmd = app.add_subcommand("run", "Monte Carlo runs of one learner");
  add_common(run_cmd, run_opts, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo over a parameter grid");
  add_common(sweep_cmd, sweep_opts, true);
  auto* certify_cmd = app.add_subcommand("certify", "lower-bound coverage experiment");
  add_common(certify_cmd, certify_opts, true);
  auto* adapt_cmd = app.add_subcommand("adaptivity", "adaptive vs non-adaptive separation");
  add_common(adapt_cmd, adapt_opts, false);
  std::optional<std::size_t> adapt_depth;
  adapt_cmd->add_option("--depth", adapt_depth, "tree depth (>= 3)");

  auto* disc_cmd = app.add_subcommand("discretize", "Gaussian histogram with TV check");
  add_common(disc_cmd, disc_opts, false);
  std::optional<double> mu, sigma, eps, step;
  disc_cmd->add_option("--mu", mu, "Gaussian mean in [0,1]");
  disc_cmd->add_option("--sigma", sigma, "Gaussian standard deviation");
  disc_cmd->add_option("--eps", eps, "TV budget in (0,1)");
  disc_cmd->add_option("--step", step, "quadrature step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gamma_cmd->parsed()) {
      json cfg = load_config(gamma_opts);
      const auto inst = maximin::build_instance(class_spec_of(cfg));
      const double alpha = gamma_alpha.value_or(cfg.value("alpha", 0.1));
      const double tol = gamma_tol.value_or(cfg.value("tolerance", maximin::kDefaultTolerance));
      const auto cert = maximin::gamma(inst.cls, alpha, tol);
      json out = maximin::certificate_to_json(cert);
      out["verified"] = maximin::verify_certificate(inst.cls, alpha, cert);
      emit(cfg, out.dump(2));
    } else if (dec_cmd->parsed()) {
      json cfg = load_config(dec_opts);
      const auto inst = maximin::build_instance(class_spec_of(cfg));
      const double e = dec_eps.value_or(cfg.value("eps", 0.1));
      const double a = dec_alpha.value_or(cfg.value("alpha", 0.1));
      const double res = dec_res.value_or(cfg.value("resolution", 0.25));
      maximin::DecResult r;
      if (cfg.contains("anchor") && dec_anchors != "file") {
        r = maximin::dec_at(inst.cls, cfg.at("anchor").get<std::vector<double>>(), e, a, res);
      } else {
        std::vector<std::vector<double>> anchors;
        if (dec_anchors == "file") {
          const std::string path = dec_anchor_file.empty()
                                       ? cfg.value("anchors_file", std::string{})
                                       : dec_anchor_file;
          anchors = maximin::read_json_file(path).get<std::vector<std::vector<double>>>();
        } else {
          anchors = maximin::default_anchors(inst.cls.functions(),
                                             dec_anchors == "vertices"
                                                 ? maximin::AnchorFamily::kVertices
                                                 : maximin::AnchorFamily::kVerticesAndMidpoints);
        }
        r = maximin::dec_sup(inst.cls, e, a, anchors, res);
      }
      emit(cfg, maximin::dec_to_json(r).dump(2));
    } else if (run_cmd->parsed()) {
      json cfg = load_config(run_opts);
      cfg["kind"] = "run";
      const auto config = maximin::ExperimentConfig::from_json(cfg);
      const auto stats = maximin::monte_carlo(config);
      emit(cfg, config.format == maximin::OutputFormat::kCsv
                    ? maximin::records_to_csv(stats.records)
                    : maximin::records_to_json(stats.records).dump(2));
      std::fprintf(stderr, "success_rate=%.6f half_width=%.6f mean_queries=%.3f errors=%zu\n",
                   stats.success_rate, stats.half_width, stats.mean_queries, stats.errors);
    } else if (sweep_cmd->parsed()) {
      json cfg = load_config(sweep_opts);
      const auto config = maximin::ExperimentConfig::from_json(cfg);
      emit(cfg, maximin::sweep_to_csv(maximin::sweep(config)));
    } else if (certify_cmd->parsed()) {
      json cfg = load_config(certify_opts);
      const auto config = maximin::ExperimentConfig::from_json(cfg);
      const auto inst = maximin::build_instance(config.class_spec);
      const json extra = cfg.contains("learner") && cfg.at("learner").is_object()
                             ? cfg.at("learner")
                             : json::object();
      const auto learner = maximin::make_certifiable(config.learner, inst, config.params, extra);
      const auto r = maximin::certify_lower_bound(inst.cls, learner, config.params.alpha,
                                                  config.params.delta, config.trials, config.seed);
      emit(cfg, maximin::certify_to_json(r).dump(2));
      return r.holds ? 0 : 2;
    } else if (adapt_cmd->parsed()) {
      json cfg = load_config(adapt_opts);
      const auto config = maximin::ExperimentConfig::from_json(cfg);
      const std::size_t depth = adapt_depth.value_or(cfg.value("depth", std::size_t{5}));
      const auto r = maximin::adaptivity_experiment(depth, config.trials, config.seed,
                                                    config.params);
      emit(cfg, maximin::adaptivity_to_json(r).dump(2));
      return r.separation_holds ? 0 : 2;
    } else if (disc_cmd->parsed()) {
      json cfg = load_config(disc_opts);
      const double m = mu.value_or(cfg.value("mu", 0.5));
      const double s = sigma.value_or(cfg.value("sigma", 1.0));
      const double e = eps.value_or(cfg.value("eps", 0.1));
      const double h = step.value_or(cfg.value("step", 1e-4));
      const auto hist = maximin::make_gaussian_histogram(m, s, e);
      const double tv = maximin::tv_distance(maximin::normal_density(m, s),
                                             maximin::histogram_density(hist), h);
      json out = maximin::histogram_to_json(hist);
      out["tv_distance"] = tv;
      out["tv_within_eps"] = tv <= e;
      emit(cfg, out.dump(2));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
