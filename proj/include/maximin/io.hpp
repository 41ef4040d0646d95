#pragma once

#include <string>

#include <json.hpp>

#include "maximin/core.hpp"
#include "maximin/dec.hpp"
#include "maximin/environments.hpp"
#include "maximin/games.hpp"

namespace maximin {

using json = nlohmann::json;

// {"arms": A, "functions": F, "means": [[...]...], "labels": {...}, "name": ...}
json class_to_json(const FunctionClass& cls);
FunctionClass class_from_json(const json& j);

json noise_to_json(const NoiseSpec& noise);
// {"kind": "deterministic" | "bernoulli" | "gaussian" (sigma) | "two_point" (c)
//  | "heavy_tail" (sigma)}
NoiseSpec noise_from_json(const json& j);

json certificate_to_json(const GammaCertificate& cert);
GammaCertificate certificate_from_json(const json& j);

json dec_to_json(const DecResult& r);
json histogram_to_json(const PiecewiseUniform& h);
json transcript_to_json(const Transcript& t);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace maximin
