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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cli/run_config.hpp"
#include "opophase/threshold.hpp"

namespace opophase::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitModel = 3,
  kExitSelfCheck = 4,
};

/// Largest |z| accepted by the mc self-check.
inline constexpr double kMaxAbsZ = 5.0;

int cmd_moments(const RunConfig& config, std::ostream& out);
int cmd_threshold(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_mc(const RunConfig& config, std::ostream& out);
/// Writes <out_dir>/<figure>.csv, or to `out` when out_dir is "-".
int cmd_reproduce(std::string_view figure, const std::string& out_dir, std::ostream& out);

/// Figure datasets understood by `reproduce`.
std::span<const std::string_view> figure_ids();
void write_figure_csv(std::string_view figure, std::ostream& out);

inline constexpr std::string_view kSweepHeader =
    "gain,beta,eta_in,eta_esc,classification,sigma_th_deg";
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// printf("%.*g") formatting; "inf"/"-inf"/"nan" for non-finite values.
std::string format_sig(double value, int digits = 6);
/// Rounds to `digits` significant digits.
double round_sig(double value, int digits);

}  // namespace opophase::cli
