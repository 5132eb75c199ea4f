// Copyright 2026 The opophase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "opophase/angles.hpp"
#include "opophase/configurations.hpp"

namespace opophase::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

double json_angle(const nlohmann::json& v, AngleUnit unit, std::string_view key) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return unit == AngleUnit::Degrees ? deg_to_rad(x) : x;
  }
  if (v.is_string()) return parse_angle(v.get<std::string>(), unit);
  throw UsageError("config key '" + std::string(key) + "' must be a number or angle string");
}

double json_number(const nlohmann::json& v, std::string_view key) {
  if (!v.is_number()) throw UsageError("config key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::uint64_t json_count(const nlohmann::json& v, std::string_view key) {
  if (!v.is_number_unsigned()) {
    throw UsageError("config key '" + std::string(key) + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw UsageError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

double parse_angle(std::string_view text, AngleUnit default_unit) {
  text = trim(text);
  if (ends_with(text, "deg")) {
    return deg_to_rad(parse_number(text.substr(0, text.size() - 3), "angle"));
  }
  if (ends_with(text, "rad")) return parse_number(text.substr(0, text.size() - 3), "angle");
  const double v = parse_number(text, "angle");
  return default_unit == AngleUnit::Degrees ? deg_to_rad(v) : v;
}

AngleUnit parse_angle_unit(std::string_view text) {
  if (text == "deg" || text == "degrees") return AngleUnit::Degrees;
  if (text == "rad" || text == "radians") return AngleUnit::Radians;
  throw UsageError("angle unit must be 'deg' or 'rad', got '" + std::string(text) + "'");
}

OutputFormat parse_format(std::string_view text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw UsageError("format must be 'json' or 'csv', got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma), "list entry"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

GainRange parse_gain_range(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) {
    const double g = parse_number(text, "gain");
    return {.min = g, .max = g, .step = 1.0};
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos) {
    throw UsageError("gain range must be MIN:MAX:STEP, got '" + std::string(text) + "'");
  }
  return {
      .min = parse_number(text.substr(0, first), "gain range minimum"),
      .max = parse_number(text.substr(first + 1, second - first - 1), "gain range maximum"),
      .step = parse_number(text.substr(second + 1), "gain range step"),
  };
}

void RunConfig::set_gain(double g) {
  gain = g;
  d.reset();
}

void RunConfig::set_d(double value) {
  d = value;
  gain.reset();
}

void RunConfig::set_etas(double in, double esc) {
  eta_in = in;
  eta_esc = esc;
  mirrors.reset();
}

void RunConfig::set_mirrors(const OpoMirrorSpec& spec) {
  mirrors = spec;
  eta_in.reset();
  eta_esc.reset();
}

bool RunConfig::has_opo() const {
  return gain || d || eta_in || eta_esc || mirrors;
}

OpoDrive RunConfig::drive() const {
  if (gain) return drive_from_gain(*gain);
  if (d) return OpoDrive(*d);
  return OpoDrive(0.0);
}

OpoCoupling RunConfig::coupling() const {
  if (mirrors) return coupling_from_mirrors(*mirrors);
  if (eta_in.has_value() != eta_esc.has_value()) {
    throw UsageError("eta-in and eta-esc must be given together");
  }
  if (eta_in) return OpoCoupling(*eta_in, *eta_esc);
  return OpoCoupling(0.5, 0.5);
}

double RunConfig::require_beta() const {
  if (!beta) throw UsageError("an amplitude is required (--beta or --preset)");
  return *beta;
}

std::vector<double> RunConfig::sweep_betas() const {
  if (!betas.empty()) return betas;
  if (beta) return {*beta};
  throw UsageError("sweep needs --beta (comma-separated list) or --preset");
}

void apply_preset(RunConfig& config, std::string_view name) {
  const auto preset = find_configuration(name);
  if (!preset) throw UsageError("unknown preset '" + std::string(name) + "'");
  config.beta = preset->beta;
  config.betas.clear();
  config.set_gain(preset->gain);
  config.set_etas(preset->eta_in, preset->eta_esc);
}

void apply_opo_shorthand(RunConfig& config, std::string_view text) {
  std::optional<double> gain, d, eta_in, eta_esc, r_ic, r_oc, delta;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("OPO spec entries must be key=value, got '" + std::string(item) + "'");
    }
    const std::string_view key = trim(item.substr(0, eq));
    const double value = parse_number(item.substr(eq + 1), std::string(key));
    if (key == "gain" || key == "G") {
      gain = value;
    } else if (key == "d") {
      d = value;
    } else if (key == "eta-in" || key == "eta_in") {
      eta_in = value;
    } else if (key == "eta-esc" || key == "eta_esc") {
      eta_esc = value;
    } else if (key == "r-ic" || key == "r_ic") {
      r_ic = value;
    } else if (key == "r-oc" || key == "r_oc") {
      r_oc = value;
    } else if (key == "delta" || key == "delta_cr") {
      delta = value;
    } else {
      throw UsageError("unknown OPO spec key '" + std::string(key) + "'");
    }
  }
  if (gain && d) throw UsageError("OPO spec takes gain or d, not both");
  const bool any_mirror = r_ic || r_oc || delta;
  const bool any_eta = eta_in || eta_esc;
  if (any_mirror && any_eta) throw UsageError("OPO spec takes mirrors or efficiencies, not both");
  if (gain) config.set_gain(*gain);
  if (d) config.set_d(*d);
  if (any_eta) {
    if (!eta_in || !eta_esc) throw UsageError("OPO spec needs both eta-in and eta-esc");
    config.set_etas(*eta_in, *eta_esc);
  }
  if (any_mirror) {
    if (!r_ic || !r_oc || !delta) throw UsageError("OPO spec needs r-ic, r-oc and delta");
    config.set_mirrors(OpoMirrorSpec(*r_ic, *r_oc, *delta));
  }
}

void apply_json(RunConfig& config, const nlohmann::json& doc) {
  static const std::set<std::string> kKeys = {
      "preset", "angle_unit", "beta", "betas", "phi", "sigma", "gain", "d", "eta_in",
      "eta_esc", "mirrors", "gain_range", "seed", "samples", "batches", "estimator_samples",
      "format"};
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }
  if (doc.contains("gain") && doc.contains("d")) {
    throw UsageError("config file takes gain or d, not both");
  }
  if (doc.contains("mirrors") && (doc.contains("eta_in") || doc.contains("eta_esc"))) {
    throw UsageError("config file takes mirrors or eta_in/eta_esc, not both");
  }

  if (doc.contains("preset")) apply_preset(config, doc.at("preset").get<std::string>());
  if (doc.contains("angle_unit")) {
    config.angle_unit = parse_angle_unit(doc.at("angle_unit").get<std::string>());
  }
  const AngleUnit unit = config.angle_unit;
  if (doc.contains("beta")) config.beta = json_number(doc.at("beta"), "beta");
  if (doc.contains("betas")) {
    config.betas.clear();
    for (const auto& b : doc.at("betas")) config.betas.push_back(json_number(b, "betas"));
  }
  if (doc.contains("phi")) config.phi = json_angle(doc.at("phi"), unit, "phi");
  if (doc.contains("sigma")) config.sigma = json_angle(doc.at("sigma"), unit, "sigma");
  if (doc.contains("gain")) config.set_gain(json_number(doc.at("gain"), "gain"));
  if (doc.contains("d")) config.set_d(json_number(doc.at("d"), "d"));
  if (doc.contains("eta_in") || doc.contains("eta_esc")) {
    if (!doc.contains("eta_in") || !doc.contains("eta_esc")) {
      throw UsageError("config file needs both eta_in and eta_esc");
    }
    config.set_etas(json_number(doc.at("eta_in"), "eta_in"),
                    json_number(doc.at("eta_esc"), "eta_esc"));
  }
  if (doc.contains("mirrors")) {
    const auto& m = doc.at("mirrors");
    if (!m.is_object() || !m.contains("r_ic") || !m.contains("r_oc") || !m.contains("delta_cr")) {
      throw UsageError("config 'mirrors' needs r_ic, r_oc and delta_cr");
    }
    config.set_mirrors(OpoMirrorSpec(json_number(m.at("r_ic"), "r_ic"),
                                     json_number(m.at("r_oc"), "r_oc"),
                                     json_number(m.at("delta_cr"), "delta_cr")));
  }
  if (doc.contains("gain_range")) {
    const auto& g = doc.at("gain_range");
    if (g.is_string()) {
      config.gain_range = parse_gain_range(g.get<std::string>());
    } else if (g.is_object() && g.contains("min") && g.contains("max") && g.contains("step")) {
      config.gain_range = GainRange{.min = json_number(g.at("min"), "gain_range.min"),
                                    .max = json_number(g.at("max"), "gain_range.max"),
                                    .step = json_number(g.at("step"), "gain_range.step")};
    } else {
      throw UsageError("config 'gain_range' must be \"MIN:MAX:STEP\" or {min, max, step}");
    }
  }
  if (doc.contains("seed")) config.seed = json_count(doc.at("seed"), "seed");
  if (doc.contains("samples")) config.samples = json_count(doc.at("samples"), "samples");
  if (doc.contains("batches")) config.batches = json_count(doc.at("batches"), "batches");
  if (doc.contains("estimator_samples")) {
    config.estimator_samples = json_count(doc.at("estimator_samples"), "estimator_samples");
  }
  if (doc.contains("format")) config.format = parse_format(doc.at("format").get<std::string>());
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace opophase::cli
