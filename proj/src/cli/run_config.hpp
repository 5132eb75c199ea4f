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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "opophase/opo_model.hpp"
#include "opophase/threshold.hpp"

namespace opophase::cli {

/// Malformed command line or config file (exit status 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Csv };
enum class AngleUnit { Degrees, Radians };

/// Parses "45", "45deg", "0.78rad". Unsuffixed values use `default_unit`.
/// Returns radians.
double parse_angle(std::string_view text, AngleUnit default_unit);
AngleUnit parse_angle_unit(std::string_view text);
OutputFormat parse_format(std::string_view text);
double parse_number(std::string_view text, std::string_view what);
/// "1,2,5" -> {1, 2, 5}.
std::vector<double> parse_list(std::string_view text);
/// "1.1:6:0.05" or a single value "3.12".
GainRange parse_gain_range(std::string_view text);

/// Fully resolved parameters of one invocation. Angles are radians.
///
/// At most one of {gain, d} and one of {mirrors, (eta_in, eta_esc)} is set;
/// later layers (preset < config file < flags) replace earlier ones.
struct RunConfig {
  std::optional<double> beta;
  std::vector<double> betas;  ///< sweep axis; falls back to beta
  double phi = 0.0;
  std::optional<double> sigma;

  std::optional<double> gain;
  std::optional<double> d;
  std::optional<double> eta_in;
  std::optional<double> eta_esc;
  std::optional<OpoMirrorSpec> mirrors;
  std::optional<GainRange> gain_range;

  std::uint64_t seed = 0;
  std::size_t samples = 100'000;
  std::size_t batches = 0;
  std::size_t estimator_samples = 10'000;
  unsigned threads = 0;

  OutputFormat format = OutputFormat::Json;
  AngleUnit angle_unit = AngleUnit::Degrees;

  void set_gain(double g);
  void set_d(double value);
  void set_etas(double in, double esc);
  void set_mirrors(const OpoMirrorSpec& spec);

  /// True when any OPO parameter was given.
  bool has_opo() const;
  /// Defaults to pump off (d = 0) when no drive was given.
  OpoDrive drive() const;
  /// Defaults to the lossless symmetric cavity (eta_in = eta_esc = 1/2).
  OpoCoupling coupling() const;

  double require_beta() const;
  std::vector<double> sweep_betas() const;
};

/// Starts a config from the named preset ("configA" or "configB").
void apply_preset(RunConfig& config, std::string_view name);

/// Applies "d=0.4,eta-in=0.08,eta-esc=0.87" style OPO shorthand.
void apply_opo_shorthand(RunConfig& config, std::string_view text);

/// Applies a JSON config document; see README for the schema.
void apply_json(RunConfig& config, const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);

}  // namespace opophase::cli
