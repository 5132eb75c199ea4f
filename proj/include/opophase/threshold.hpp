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

// Comparison of the phase-estimator variance with and without the OPO, and
// the phase-noise threshold sigma_th above which the OPO lowers it.

#include <string_view>
#include <vector>

#include "opophase/opo_model.hpp"

namespace opophase {

enum class Classification {
  Threshold,         ///< OPO helps for sigma > sigma_th only.
  AlwaysBeneficial,  ///< OPO helps for every sigma on the scanned range.
  NeverBeneficial,   ///< OPO never helps on the scanned range.
  Neutral,           ///< No difference at all (identity channel).
};

enum class ThresholdMethod { ClosedForm, Bisection };

std::string_view to_string(Classification c);
std::string_view to_string(ThresholdMethod m);

struct ThresholdResult {
  Classification classification = Classification::Neutral;
  double sigma_th = 0.0;  ///< radians; meaningful only for Classification::Threshold
  ThresholdMethod method = ThresholdMethod::ClosedForm;
};

/// Inclusive grid of sigma values (radians) scanned by the bisection oracle.
struct SigmaGrid {
  double min = 1e-4;
  double max = 2.0;
  double step = 1e-3;

  void validate() const;
  std::vector<double> points() const;
};

/// Inclusive gain axis of a sweep.
struct GainRange {
  double min = 1.0;
  double max = 1.0;
  double step = 1.0;

  void validate() const;
  std::vector<double> points() const;
};

struct SweepSpec {
  GainRange gains;
  std::vector<double> betas;
  OpoCoupling coupling;
  SigmaGrid sigma_grid{};
};

struct SweepRow {
  double gain = 1.0;
  double beta = 0.0;
  double eta_in = 0.0;
  double eta_esc = 0.0;
  ThresholdResult closed_form;
  ThresholdResult bisection;
  bool methods_agree = false;

  /// Threshold in degrees; 0 sentinel for AlwaysBeneficial and Neutral,
  /// +infinity for NeverBeneficial.
  double sigma_th_deg() const;
};

struct VariancePoint {
  double sigma_deg;
  double var_no_opo;
  double var_with_opo;
};

/// sigma used to classify the degenerate branches of the closed form.
inline constexpr double kSigmaProbe = 0.5;

/// [Sy + alpha_y^2 e^{-s} sinh s] / (alpha_x^2 e^{-s}), s = sigma^2.
double phase_variance_with_opo(double beta, double sigma, const OpoCoupling& coupling,
                               const OpoDrive& drive);

/// phase_variance_no_opo - phase_variance_with_opo; positive when the OPO helps.
double variance_advantage(double beta, double sigma, const OpoCoupling& coupling,
                          const OpoDrive& drive);

/// Closed-form threshold. The crossing satisfies
///   e^{2 sigma^2} = 2 beta^2 (ax^2 - ay^2) / [ax^2 + 2 beta^2 (ax^2 - ay^2 - 2 Sy)].
ThresholdResult threshold_closed_form(double beta, const OpoCoupling& coupling,
                                      const OpoDrive& drive);

/// Grid scan of variance_advantage followed by bisection of the single sign
/// change. Throws MultipleCrossings if the sign changes more than once.
ThresholdResult threshold_bisection(double beta, const OpoCoupling& coupling,
                                    const OpoDrive& drive, const SigmaGrid& grid = {});

/// True when both results describe the same behaviour over `grid`. A
/// closed-form threshold that falls outside the grid is matched against the
/// classification the scan must then report.
bool methods_agree(const ThresholdResult& closed_form, const ThresholdResult& bisection,
                   const SigmaGrid& grid, double tolerance = 1e-8);

/// One row per (gain, beta), ordered by gain then beta. Rows are evaluated
/// on up to `threads` workers (0 = hardware concurrency); the output does not
/// depend on the worker count.
std::vector<SweepRow> threshold_sweep(const SweepSpec& spec, unsigned threads = 0);

std::vector<VariancePoint> variance_curves(double beta, const OpoCoupling& coupling,
                                           const OpoDrive& drive,
                                           const std::vector<double>& sigmas);

}  // namespace opophase
