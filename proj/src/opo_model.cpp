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

#include "opophase/opo_model.hpp"

#include <cmath>
#include <sstream>

#include "opophase/errors.hpp"

namespace opophase {

namespace {

// Slack for eta_in + eta_esc <= 1 when the efficiencies come from a
// floating-point division.
constexpr double kEfficiencySlack = 1e-12;

bool in_unit_interval_open_right(double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; }

}  // namespace

OpoMirrorSpec::OpoMirrorSpec(double r_ic, double r_oc, double delta_cr)
    : r_ic_(r_ic), r_oc_(r_oc), delta_cr_(delta_cr) {
  if (!in_unit_interval_open_right(r_ic) || !in_unit_interval_open_right(r_oc) ||
      !in_unit_interval_open_right(delta_cr)) {
    std::ostringstream os;
    os << "mirror reflectivities and crystal loss must lie in [0, 1), got r_ic=" << r_ic
       << " r_oc=" << r_oc << " delta_cr=" << delta_cr;
    fail(ErrorCode::InvalidParameter, os.str());
  }
}

OpoCoupling::OpoCoupling(double eta_in, double eta_esc) : eta_in_(eta_in), eta_esc_(eta_esc) {
  const bool ok = std::isfinite(eta_in) && std::isfinite(eta_esc) && eta_in > 0.0 &&
                  eta_in < 1.0 && eta_esc > 0.0 && eta_esc < 1.0 &&
                  eta_in + eta_esc <= 1.0 + kEfficiencySlack;
  if (!ok) {
    std::ostringstream os;
    os << "coupling efficiencies need 0 < eta < 1 and eta_in + eta_esc <= 1, got eta_in="
       << eta_in << " eta_esc=" << eta_esc;
    fail(ErrorCode::InvalidParameter, os.str());
  }
}

double OpoCoupling::field_transmission() const { return std::sqrt(4.0 * eta_in_ * eta_esc_); }

OpoDrive::OpoDrive(double d) : d_(d) {
  if (std::isnan(d) || d < 0.0) {
    fail(ErrorCode::InvalidParameter, "pump parameter d must be >= 0");
  }
  if (d >= 1.0) {
    std::ostringstream os;
    os << "pump parameter d=" << d << " is at or above the oscillation threshold";
    fail(ErrorCode::AtOrAboveThreshold, os.str());
  }
}

OpoCoupling coupling_from_mirrors(const OpoMirrorSpec& spec) {
  const double gamma_ic = 1.0 - spec.r_ic();
  const double gamma_oc = 1.0 - spec.r_oc();
  const double gamma = gamma_ic + gamma_oc + 2.0 * spec.delta_cr();
  if (!(gamma > 0.0)) fail(ErrorCode::ZeroLossCavity, "cavity has zero total loss rate");
  return OpoCoupling(gamma_ic / gamma, gamma_oc / gamma);
}

double gain_from_drive(const OpoDrive& drive) { return drive.gain(); }

OpoDrive drive_from_gain(double gain) {
  if (std::isnan(gain) || gain < 1.0) {
    std::ostringstream os;
    os << "gain must be >= 1, got " << gain;
    fail(ErrorCode::GainBelowUnity, os.str());
  }
  if (std::isinf(gain)) fail(ErrorCode::AtOrAboveThreshold, "infinite gain");
  return OpoDrive(1.0 - 1.0 / std::sqrt(gain));
}

double cavity_transmissivity(const OpoCoupling& coupling) {
  return 4.0 * coupling.eta_in() * coupling.eta_esc();
}

OutputNoise output_noise(double eta_esc, const OpoDrive& drive) {
  if (!(eta_esc >= 0.0 && eta_esc <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "escape efficiency must lie in [0, 1]");
  }
  const double d = drive.d();
  const double amp = 1.0 - d;
  const double deamp = 1.0 + d;
  return {
      .var_x = 1.0 + eta_esc * 4.0 * d / (amp * amp),
      .var_y = 1.0 - eta_esc * 4.0 * d / (deamp * deamp),
  };
}

OpoAmplitudes opo_amplitudes(double beta, const OpoCoupling& coupling, const OpoDrive& drive) {
  if (!(beta >= 0.0)) fail(ErrorCode::InvalidParameter, "beta must be >= 0");
  const double t = coupling.field_transmission() * 2.0 * beta;
  return {.alpha_x = t / (1.0 - drive.d()), .alpha_y = t / (1.0 + drive.d())};
}

QuadratureMoments opo_output_moments(const CoherentSignal& signal, const OpoCoupling& coupling,
                                     const OpoDrive& drive) {
  const auto [alpha_x, alpha_y] = opo_amplitudes(signal.beta(), coupling, drive);
  const auto noise = output_noise(coupling.eta_esc(), drive);
  return {
      .mean_x = alpha_x * std::cos(signal.phi()),
      .mean_y = alpha_y * std::sin(signal.phi()),
      .var_x = noise.var_x,
      .var_y = noise.var_y,
  };
}

double phase_compression(double theta0, const OpoDrive& drive) {
  if (!std::isfinite(theta0)) fail(ErrorCode::InvalidParameter, "theta0 must be finite");
  const double ratio = (1.0 - drive.d()) / (1.0 + drive.d());
  // atan2 keeps the quadrant of theta0 outside the principal branch.
  return std::atan2(ratio * std::sin(theta0), std::cos(theta0));
}

QuadratureMoments opo_diffused_moments(double beta, const PhaseDiffusion& noise,
                                       const OpoCoupling& coupling, const OpoDrive& drive) {
  const double s2 = noise.sigma() * noise.sigma();
  if (s2 > kMaxSigmaSquared) fail(ErrorCode::OutOfModelRange, "sigma^2 exceeds the model range");
  const auto [alpha_x, alpha_y] = opo_amplitudes(beta, coupling, drive);
  const auto out = output_noise(coupling.eta_esc(), drive);
  // e^{-s}(cosh s - 1) = (1 - e^{-s})^2 / 2 and e^{-s} sinh s = (1 - e^{-2s}) / 2,
  // written with expm1 to stay accurate for small sigma.
  const double one_minus_e1 = -std::expm1(-s2);
  const double one_minus_e2 = -std::expm1(-2.0 * s2);
  return {
      .mean_x = alpha_x * std::exp(-0.5 * s2),
      .mean_y = 0.0,
      .var_x = out.var_x + alpha_x * alpha_x * 0.5 * one_minus_e1 * one_minus_e1,
      .var_y = out.var_y + alpha_y * alpha_y * 0.5 * one_minus_e2,
  };
}

}  // namespace opophase
