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

// Coherent signals, the Gaussian phase-diffusion channel and the
// two-quadrature phase estimator.
//
// Quadrature convention: x = a + a^dagger, y = i(a^dagger - a), so the
// vacuum (and every coherent state) has var[x] = var[y] = 1.

namespace opophase {

/// Coherent state |beta e^{i phi}>. beta >= 0, phi kept in (-pi, pi].
class CoherentSignal {
 public:
  CoherentSignal(double beta, double phi = 0.0);

  double beta() const noexcept { return beta_; }
  double phi() const noexcept { return phi_; }

 private:
  double beta_;
  double phi_;
};

/// Gaussian phase kernel g_sigma with standard deviation sigma (radians).
class PhaseDiffusion {
 public:
  explicit PhaseDiffusion(double sigma = 0.0);

  double sigma() const noexcept { return sigma_; }

  /// Kernel density at phase offset `phi`. Only defined for sigma > 0.
  double density(double phi) const;

 private:
  double sigma_;
};

/// First and second moments of the x and y quadratures. The xy covariance
/// is not tracked; every state built here has zero covariance in the frame
/// aligned with its mean.
struct QuadratureMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 1.0;
  double var_y = 1.0;

  /// Rotates the phase-space frame by `angle`: the mean vector turns by
  /// `angle` and the variances mix as cos^2 / sin^2.
  QuadratureMoments rotated(double angle) const;

  /// Mean of x_theta = x cos(theta) + y sin(theta).
  double mean_along(double theta) const;
  /// Variance of x_theta, assuming zero xy covariance.
  double var_along(double theta) const;

  friend bool operator==(const QuadratureMoments&, const QuadratureMoments&) = default;
};

struct PhaseEstimate {
  double phi_hat = 0.0;
  double variance = 0.0;
};

/// Below this value of mean_x^2 + mean_y^2 the phase is undefined.
inline constexpr double kZeroMeanFloor = 1e-24;

/// Phase noise with sigma^2 above this is outside the model (cosh/sinh of
/// sigma^2 overflow near 710).
inline constexpr double kMaxSigmaSquared = 700.0;

QuadratureMoments coherent_moments(const CoherentSignal& signal);

/// Moments of the phase-diffused mixture. Exact; computed for phi = 0 and
/// rotated back to the signal phase.
QuadratureMoments diffused_moments(const CoherentSignal& signal, const PhaseDiffusion& noise);

/// phi_hat = atan2(<y>, <x>) with first-order propagated variance
/// ([<y>^2 var x + <x>^2 var y] / (<x>^2 + <y>^2)^2).
PhaseEstimate estimate_phase(const QuadratureMoments& moments);

/// Coherent-state bound 1 / (4 beta^2).
double coherent_phase_variance(double beta);

/// [cosh(sigma^2) + (1 + 4 beta^2) sinh(sigma^2)] / (4 beta^2).
double phase_variance_no_opo(double beta, double sigma);

}  // namespace opophase
