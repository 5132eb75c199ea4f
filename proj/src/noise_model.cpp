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

#include "opophase/noise_model.hpp"

#include <cmath>
#include <sstream>

#include "opophase/angles.hpp"
#include "opophase/errors.hpp"

namespace opophase {

CoherentSignal::CoherentSignal(double beta, double phi) : beta_(beta), phi_(0.0) {
  if (!std::isfinite(beta) || beta < 0.0) {
    std::ostringstream os;
    os << "coherent amplitude must be finite and >= 0, got " << beta;
    fail(ErrorCode::InvalidParameter, os.str());
  }
  if (!std::isfinite(phi)) fail(ErrorCode::InvalidParameter, "coherent phase must be finite");
  phi_ = normalize_angle(phi);
}

PhaseDiffusion::PhaseDiffusion(double sigma) : sigma_(sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    std::ostringstream os;
    os << "phase-noise amplitude must be finite and >= 0, got " << sigma;
    fail(ErrorCode::InvalidParameter, os.str());
  }
}

double PhaseDiffusion::density(double phi) const {
  if (sigma_ <= 0.0) fail(ErrorCode::InvalidParameter, "kernel density undefined for sigma = 0");
  const double z = phi / sigma_;
  return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * kPi));
}

QuadratureMoments QuadratureMoments::rotated(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {
      .mean_x = c * mean_x - s * mean_y,
      .mean_y = s * mean_x + c * mean_y,
      .var_x = c * c * var_x + s * s * var_y,
      .var_y = s * s * var_x + c * c * var_y,
  };
}

double QuadratureMoments::mean_along(double theta) const {
  return mean_x * std::cos(theta) + mean_y * std::sin(theta);
}

double QuadratureMoments::var_along(double theta) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return var_x * c * c + var_y * s * s;
}

QuadratureMoments coherent_moments(const CoherentSignal& signal) {
  const double two_beta = 2.0 * signal.beta();
  return {
      .mean_x = two_beta * std::cos(signal.phi()),
      .mean_y = two_beta * std::sin(signal.phi()),
      .var_x = 1.0,
      .var_y = 1.0,
  };
}

QuadratureMoments diffused_moments(const CoherentSignal& signal, const PhaseDiffusion& noise) {
  const double beta = signal.beta();
  const double s2 = noise.sigma() * noise.sigma();
  // With phi = 0 the quadratures are 2 beta cos(delta) and 2 beta sin(delta)
  // plus unit vacuum noise, delta ~ N(0, sigma^2):
  //   E cos = e^{-s2/2},  Var cos = (1 - e^{-s2})^2 / 2,  E sin^2 = (1 - e^{-2 s2}) / 2.
  const double one_minus_e1 = -std::expm1(-s2);
  const double one_minus_e2 = -std::expm1(-2.0 * s2);
  const QuadratureMoments aligned{
      .mean_x = 2.0 * beta * std::exp(-0.5 * s2),
      .mean_y = 0.0,
      .var_x = 1.0 + 2.0 * beta * beta * one_minus_e1 * one_minus_e1,
      .var_y = 1.0 + 2.0 * beta * beta * one_minus_e2,
  };
  if (signal.phi() == 0.0) return aligned;
  return aligned.rotated(signal.phi());
}

PhaseEstimate estimate_phase(const QuadratureMoments& m) {
  const double norm2 = m.mean_x * m.mean_x + m.mean_y * m.mean_y;
  if (!(norm2 >= kZeroMeanFloor)) {
    fail(ErrorCode::ZeroMeanVector, "quadrature mean vector vanishes; phase is undefined");
  }
  const double variance =
      (m.mean_y * m.mean_y * m.var_x + m.mean_x * m.mean_x * m.var_y) / (norm2 * norm2);
  return {.phi_hat = normalize_angle(std::atan2(m.mean_y, m.mean_x)), .variance = variance};
}

double coherent_phase_variance(double beta) {
  if (!(beta > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "phase variance needs beta > 0");
  return 1.0 / (4.0 * beta * beta);
}

double phase_variance_no_opo(double beta, double sigma) {
  if (!(beta > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "phase variance needs beta > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidParameter, "sigma must be >= 0");
  const double s2 = sigma * sigma;
  if (s2 > kMaxSigmaSquared) fail(ErrorCode::OutOfModelRange, "sigma^2 exceeds the model range");
  const double four_b2 = 4.0 * beta * beta;
  return (std::cosh(s2) + (1.0 + four_b2) * std::sinh(s2)) / four_b2;
}

}  // namespace opophase
