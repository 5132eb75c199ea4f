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

// Seeded homodyne sampler used as a stochastic oracle for the analytic
// moment formulas.
//
// Every sample is addressed by (seed, batch, stream, index): the Philox key
// is derived from (seed, batch) and the counter holds (index, stream). One
// Philox block yields the two uniforms a sample needs (input phase jitter and
// homodyne noise), so sample streams are bit-identical for any thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opophase/noise_model.hpp"
#include "opophase/opo_model.hpp"

namespace opophase {

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::size_t n_samples = 1'000'000;
  std::size_t n_batches = 1;
  unsigned threads = 0;  ///< 0 = hardware concurrency; never changes results

  void validate() const;
};

enum class StateKind { Coherent, Diffused, OpoOutput, OpoDiffused };

std::string_view to_string(StateKind kind);

/// A state whose homodyne statistics can be sampled.
class StateSpec {
 public:
  static StateSpec coherent(const CoherentSignal& signal);
  static StateSpec diffused(const CoherentSignal& signal, const PhaseDiffusion& noise);
  static StateSpec opo_output(const CoherentSignal& signal, const OpoCoupling& coupling,
                              const OpoDrive& drive);
  static StateSpec opo_diffused(const CoherentSignal& signal, const PhaseDiffusion& noise,
                                const OpoCoupling& coupling, const OpoDrive& drive);

  StateKind kind() const noexcept { return kind_; }
  const CoherentSignal& signal() const noexcept { return signal_; }
  const PhaseDiffusion& noise() const noexcept { return noise_; }
  bool has_diffusion() const noexcept;
  bool has_opo() const noexcept { return coupling_.has_value(); }

  /// Gaussian moments conditional on a definite input phase `phi`.
  QuadratureMoments conditional_moments(double phi) const;

  /// Exact moments of the (possibly mixed) state. OpoDiffused needs phi = 0.
  QuadratureMoments analytic_moments() const;

  /// First-order single-shot phase-estimator variance of analytic_moments().
  double analytic_phase_variance() const;

 private:
  StateSpec(StateKind kind, const CoherentSignal& signal, const PhaseDiffusion& noise,
            std::optional<OpoCoupling> coupling, std::optional<OpoDrive> drive);

  StateKind kind_;
  CoherentSignal signal_;
  PhaseDiffusion noise_;
  std::optional<OpoCoupling> coupling_;
  std::optional<OpoDrive> drive_;
};

/// Homodyne samples of x_theta = x cos(theta) + y sin(theta).
std::vector<double> sample_quadrature(const StateSpec& state, double theta,
                                      const SamplerConfig& config, std::uint64_t batch = 0,
                                      std::uint32_t stream = 0);

struct MomentEstimate {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased, n - 1 denominator
  double std_error_mean = 0.0;      ///< sqrt(variance / n)
  double std_error_variance = 0.0;  ///< variance sqrt(2 / (n - 1)), exact for Gaussian data
  /// Standard error of the variance from the sample fourth moment,
  /// sqrt((m4 - variance^2 (n - 3)/(n - 1)) / n). Phase-mixture states are
  /// not Gaussian and have heavier tails than the Gaussian formula assumes.
  double std_error_variance_kurtosis = 0.0;
};

MomentEstimate estimate_moments(std::span<const double> samples);

/// One analytic-vs-empirical comparison.
struct CalibrationEntry {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

/// Samples x (stream 0) and y (stream 1) with config.n_samples each and
/// compares mean_x, mean_y, var_x, var_y with analytic_moments(). Variance
/// z-scores use the fourth-moment standard error.
std::vector<CalibrationEntry> calibrate_moments(const StateSpec& state,
                                                const SamplerConfig& config);

struct EstimatorExperiment {
  std::size_t n_samples = 0;
  std::size_t n_batches = 0;
  double scaled_variance = 0.0;  ///< n_samples * var over batches of phi_hat
  double std_error = 0.0;        ///< scaled_variance sqrt(2 / (n_batches - 1))
  double analytic = 0.0;         ///< first-order single-shot variance
  double z() const { return std_error > 0.0 ? (scaled_variance - analytic) / std_error : 0.0; }
};

/// Two-copy phase estimator: each batch draws n_samples of x and an
/// independent n_samples of y, forms atan2(mean y, mean x), and the spread of
/// that estimate over batches, times n_samples, is compared with the
/// propagated single-shot variance. Requires n_batches >= 100.
EstimatorExperiment mc_phase_estimator_experiment(const StateSpec& state,
                                                  const SamplerConfig& config);

}  // namespace opophase
