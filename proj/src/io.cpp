#include "maximin/io.hpp"

#include <fstream>
#include <sstream>

namespace maximin {

json class_to_json(const FunctionClass& cls) {
  json means = json::array();
  for (std::size_t f = 0; f < cls.functions(); ++f) {
    auto r = cls.row(f);
    means.push_back(std::vector<double>(r.begin(), r.end()));
  }
  json j = {{"arms", cls.arms()}, {"functions", cls.functions()}, {"means", means}};
  json labels = json::object();
  if (!cls.function_labels().empty()) labels["functions"] = cls.function_labels();
  if (!cls.arm_labels().empty()) labels["arms"] = cls.arm_labels();
  j["labels"] = labels;
  if (!cls.name().empty()) j["name"] = cls.name();
  return j;
}

FunctionClass class_from_json(const json& j) {
  if (!j.is_object() || !j.contains("means")) throw ParameterError("function class JSON needs means");
  const auto& rows = j.at("means");
  if (!rows.is_array() || rows.empty()) throw ParameterError("means must be a non-empty array");
  const std::size_t funcs = rows.size();
  const std::size_t arms = rows[0].size();
  if (j.contains("functions") && j.at("functions").get<std::size_t>() != funcs) {
    throw ParameterError("declared function count does not match means");
  }
  if (j.contains("arms") && j.at("arms").get<std::size_t>() != arms) {
    throw ParameterError("declared arm count does not match means");
  }
  Matrix<double> means(funcs, arms);
  for (std::size_t f = 0; f < funcs; ++f) {
    if (!rows[f].is_array() || rows[f].size() != arms) throw ParameterError("ragged means matrix");
    for (std::size_t a = 0; a < arms; ++a) means(f, a) = rows[f][a].get<double>();
  }
  std::vector<std::string> flabels, alabels;
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (l.contains("functions")) flabels = l.at("functions").get<std::vector<std::string>>();
    if (l.contains("arms")) alabels = l.at("arms").get<std::vector<std::string>>();
  }
  return FunctionClass(std::move(means), j.value("name", std::string{}), std::move(flabels),
                       std::move(alabels));
}

json noise_to_json(const NoiseSpec& noise) {
  json j = {{"kind", noise.name()}};
  if (auto g = std::get_if<GaussianAdditive>(&noise.kind())) j["sigma"] = g->sigma;
  if (auto h = std::get_if<HeavyTailThreePoint>(&noise.kind())) j["sigma"] = h->sigma;
  if (auto t = std::get_if<TwoPointBounded>(&noise.kind())) j["c"] = t->c;
  return j;
}

NoiseSpec noise_from_json(const json& j) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "deterministic") return NoiseSpec(Deterministic{});
  if (kind == "bernoulli") return NoiseSpec(BernoulliAtMean{});
  if (kind == "gaussian") return NoiseSpec(GaussianAdditive{j.at("sigma").get<double>()});
  if (kind == "two_point") return NoiseSpec(TwoPointBounded{j.at("c").get<double>()});
  if (kind == "heavy_tail") return NoiseSpec(HeavyTailThreePoint{j.at("sigma").get<double>()});
  throw ParameterError("unknown noise kind: " + kind);
}

json certificate_to_json(const GammaCertificate& cert) {
  return {{"value", cert.value},
          {"p_star", cert.p_star.probs()},
          {"worst_function", cert.worst_function},
          {"dual_weights", cert.dual_weights},
          {"alpha", cert.alpha},
          {"tolerance", cert.tolerance}};
}

GammaCertificate certificate_from_json(const json& j) {
  GammaCertificate c;
  c.value = j.at("value").get<double>();
  c.p_star = ArmDistribution::unchecked(j.at("p_star").get<std::vector<double>>());
  c.worst_function = j.at("worst_function").get<std::size_t>();
  c.dual_weights = j.at("dual_weights").get<std::vector<double>>();
  c.alpha = j.at("alpha").get<double>();
  c.tolerance = j.at("tolerance").get<double>();
  return c;
}

json dec_to_json(const DecResult& r) {
  return {{"value", r.value},
          {"p_witness", r.p_witness.probs()},
          {"q_witness", r.q_witness.probs()},
          {"anchor", r.anchor},
          {"eps", r.eps},
          {"alpha", r.alpha},
          {"search_resolution", r.search_resolution},
          {"bound", r.bound == DecResult::Bound::kUpper ? "upper" : "lower"},
          {"witness_members", r.witness_members}};
}

json histogram_to_json(const PiecewiseUniform& h) {
  return {{"breakpoints", h.breakpoints}, {"masses", h.masses},
          {"c1", h.c1},                   {"c2", h.c2},
          {"buckets", h.bucket_count()},  {"middle_buckets", h.middle_buckets},
          {"lipschitz", h.lipschitz}};
}

json transcript_to_json(const Transcript& t) {
  json recs = json::array();
  for (const auto& r : t.records) recs.push_back({r.round, r.arm, r.reward});
  json j = {{"learner", t.learner_name},
            {"seed", t.seed},
            {"output_arm", t.output_arm},
            {"total_queries", t.total_queries},
            {"records", recs}};
  if (t.gamma) j["gamma"] = *t.gamma;
  if (t.error) j["error"] = *t.error;
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  out << text;
}

}  // namespace maximin
