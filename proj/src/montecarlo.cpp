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

#include "opophase/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "opophase/angles.hpp"
#include "opophase/errors.hpp"
#include "opophase/philox.hpp"

namespace opophase {

namespace {

// Runs fn(i) for i in [0, n) over a pool of workers. fn must only write to
// slots owned by i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
          next = n;
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

constexpr std::size_t kChunk = 1 << 14;

// Draws sample `index` of the given stream.
class QuadratureSampler {
 public:
  QuadratureSampler(const StateSpec& state, double theta, Philox4x32::Key key,
                    std::uint32_t stream)
      : state_(state),
        key_(key),
        stream_(stream),
        cos_t_(std::cos(theta)),
        sin_t_(std::sin(theta)),
        diffused_(state.has_diffusion()) {
    if (!diffused_) fixed_ = state.conditional_moments(state.signal().phi());
  }

  double operator()(std::uint64_t index) const {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32), stream_, 0u};
    const auto w = Philox4x32::block(ctr, key_);
    QuadratureMoments m = fixed_;
    if (diffused_) {
      const double jitter = standard_normal_from_uniform(to_open_unit(w[0], w[1]));
      m = state_.conditional_moments(state_.signal().phi() + state_.noise().sigma() * jitter);
    }
    const double mean = m.mean_x * cos_t_ + m.mean_y * sin_t_;
    const double var = m.var_x * cos_t_ * cos_t_ + m.var_y * sin_t_ * sin_t_;
    return mean + std::sqrt(var) * standard_normal_from_uniform(to_open_unit(w[2], w[3]));
  }

 private:
  const StateSpec& state_;
  Philox4x32::Key key_;
  std::uint32_t stream_;
  double cos_t_;
  double sin_t_;
  bool diffused_;
  QuadratureMoments fixed_{};
};

}  // namespace

void SamplerConfig::validate() const {
  if (n_samples < 2) {
    fail(ErrorCode::InsufficientSamples, "need at least 2 samples per stream");
  }
  if (n_batches < 1) fail(ErrorCode::InsufficientSamples, "need at least 1 batch");
}

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::Coherent: return "coherent";
    case StateKind::Diffused: return "diffused";
    case StateKind::OpoOutput: return "opo-output";
    case StateKind::OpoDiffused: return "opo-diffused";
  }
  return "unknown";
}

StateSpec::StateSpec(StateKind kind, const CoherentSignal& signal, const PhaseDiffusion& noise,
                     std::optional<OpoCoupling> coupling, std::optional<OpoDrive> drive)
    : kind_(kind), signal_(signal), noise_(noise), coupling_(coupling), drive_(drive) {}

StateSpec StateSpec::coherent(const CoherentSignal& signal) {
  return StateSpec(StateKind::Coherent, signal, PhaseDiffusion(0.0), std::nullopt, std::nullopt);
}

StateSpec StateSpec::diffused(const CoherentSignal& signal, const PhaseDiffusion& noise) {
  return StateSpec(StateKind::Diffused, signal, noise, std::nullopt, std::nullopt);
}

StateSpec StateSpec::opo_output(const CoherentSignal& signal, const OpoCoupling& coupling,
                                const OpoDrive& drive) {
  return StateSpec(StateKind::OpoOutput, signal, PhaseDiffusion(0.0), coupling, drive);
}

StateSpec StateSpec::opo_diffused(const CoherentSignal& signal, const PhaseDiffusion& noise,
                                  const OpoCoupling& coupling, const OpoDrive& drive) {
  return StateSpec(StateKind::OpoDiffused, signal, noise, coupling, drive);
}

bool StateSpec::has_diffusion() const noexcept {
  return kind_ == StateKind::Diffused || kind_ == StateKind::OpoDiffused;
}

QuadratureMoments StateSpec::conditional_moments(double phi) const {
  // Same arithmetic as coherent_moments / opo_output_moments, without the
  // angle normalisation of CoherentSignal so that every jittered phase goes
  // through an identical path.
  const double beta = signal_.beta();
  if (!has_opo()) {
    return {.mean_x = 2.0 * beta * std::cos(phi),
            .mean_y = 2.0 * beta * std::sin(phi),
            .var_x = 1.0,
            .var_y = 1.0};
  }
  const auto [alpha_x, alpha_y] = opo_amplitudes(beta, *coupling_, *drive_);
  const auto out = output_noise(coupling_->eta_esc(), *drive_);
  return {.mean_x = alpha_x * std::cos(phi),
          .mean_y = alpha_y * std::sin(phi),
          .var_x = out.var_x,
          .var_y = out.var_y};
}

QuadratureMoments StateSpec::analytic_moments() const {
  switch (kind_) {
    case StateKind::Coherent: return coherent_moments(signal_);
    case StateKind::Diffused: return diffused_moments(signal_, noise_);
    case StateKind::OpoOutput: return opo_output_moments(signal_, *coupling_, *drive_);
    case StateKind::OpoDiffused:
      if (signal_.phi() != 0.0) {
        fail(ErrorCode::InvalidParameter,
             "analytic moments of a diffused seed through the OPO need phi = 0");
      }
      return opo_diffused_moments(signal_.beta(), noise_, *coupling_, *drive_);
  }
  return {};
}

double StateSpec::analytic_phase_variance() const {
  return estimate_phase(analytic_moments()).variance;
}

std::vector<double> sample_quadrature(const StateSpec& state, double theta,
                                      const SamplerConfig& config, std::uint64_t batch,
                                      std::uint32_t stream) {
  config.validate();
  const QuadratureSampler draw(state, theta, derive_key(config.seed, batch), stream);
  std::vector<double> out(config.n_samples);
  const std::size_t chunks = (out.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, config.threads, [&](std::size_t c) {
    const std::size_t end = std::min(out.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) out[i] = draw(i);
  });
  return out;
}

MomentEstimate estimate_moments(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) fail(ErrorCode::InsufficientSamples, "moment estimate needs at least 2 samples");
  const double dn = static_cast<double>(n);

  CompensatedSum sum;
  for (double v : samples) sum.add(v);
  const double mean = sum.value() / dn;

  CompensatedSum m2;
  CompensatedSum m4;
  for (double v : samples) {
    const double d = v - mean;
    const double d2 = d * d;
    m2.add(d2);
    m4.add(d2 * d2);
  }
  const double variance = m2.value() / (dn - 1.0);
  const double fourth = m4.value() / dn;
  const double var_of_var = (fourth - variance * variance * (dn - 3.0) / (dn - 1.0)) / dn;

  return {
      .n = n,
      .mean = mean,
      .variance = variance,
      .std_error_mean = std::sqrt(variance / dn),
      .std_error_variance = variance * std::sqrt(2.0 / (dn - 1.0)),
      .std_error_variance_kurtosis = std::sqrt(std::max(0.0, var_of_var)),
  };
}

std::vector<CalibrationEntry> calibrate_moments(const StateSpec& state,
                                                const SamplerConfig& config) {
  const QuadratureMoments analytic = state.analytic_moments();
  const auto xs = sample_quadrature(state, 0.0, config, 0, 0);
  const auto ys = sample_quadrature(state, kPi / 2.0, config, 0, 1);
  const MomentEstimate ex = estimate_moments(xs);
  const MomentEstimate ey = estimate_moments(ys);

  auto entry = [](std::string name, double analytic_value, double empirical, double se) {
    const double z = se > 0.0 ? (empirical - analytic_value) / se : 0.0;
    return CalibrationEntry{std::move(name), analytic_value, empirical, se, z};
  };
  return {
      entry("mean_x", analytic.mean_x, ex.mean, ex.std_error_mean),
      entry("mean_y", analytic.mean_y, ey.mean, ey.std_error_mean),
      entry("var_x", analytic.var_x, ex.variance, ex.std_error_variance_kurtosis),
      entry("var_y", analytic.var_y, ey.variance, ey.std_error_variance_kurtosis),
  };
}

EstimatorExperiment mc_phase_estimator_experiment(const StateSpec& state,
                                                  const SamplerConfig& config) {
  config.validate();
  if (config.n_batches < 100) {
    fail(ErrorCode::InsufficientSamples, "estimator experiment needs at least 100 batches");
  }
  const std::size_t n = config.n_samples;
  std::vector<double> phi_hat(config.n_batches);

  parallel_for(config.n_batches, config.threads, [&](std::size_t b) {
    const Philox4x32::Key key = derive_key(config.seed, b);
    const QuadratureSampler draw_x(state, 0.0, key, 0);
    const QuadratureSampler draw_y(state, kPi / 2.0, key, 1);
    CompensatedSum sx;
    CompensatedSum sy;
    for (std::size_t i = 0; i < n; ++i) {
      sx.add(draw_x(i));
      sy.add(draw_y(i));
    }
    phi_hat[b] = std::atan2(sy.value() / static_cast<double>(n), sx.value() / static_cast<double>(n));
  });

  const MomentEstimate spread = estimate_moments(phi_hat);
  const double dn = static_cast<double>(n);
  EstimatorExperiment out;
  out.n_samples = n;
  out.n_batches = config.n_batches;
  out.scaled_variance = dn * spread.variance;
  out.std_error = dn * spread.std_error_variance;
  out.analytic = state.analytic_phase_variance();
  return out;
}

}  // namespace opophase
