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

// Degenerate OPO below threshold acting on quadrature moments. The pump phase
// is fixed so that the x quadrature is amplified and y is de-amplified.

#include "opophase/noise_model.hpp"

namespace opophase {

/// Cavity mirrors and crystal: power reflectivities of the input and output
/// couplers and the single-pass crystal loss.
class OpoMirrorSpec {
 public:
  OpoMirrorSpec(double r_ic, double r_oc, double delta_cr);

  double r_ic() const noexcept { return r_ic_; }
  double r_oc() const noexcept { return r_oc_; }
  double delta_cr() const noexcept { return delta_cr_; }

 private:
  double r_ic_;
  double r_oc_;
  double delta_cr_;
};

/// Input and escape efficiencies, eta_in = gamma_ic / gamma and
/// eta_esc = gamma_oc / gamma, gamma = gamma_ic + gamma_oc + 2 gamma_cr.
class OpoCoupling {
 public:
  OpoCoupling(double eta_in, double eta_esc);

  double eta_in() const noexcept { return eta_in_; }
  double eta_esc() const noexcept { return eta_esc_; }

  /// sqrt(4 eta_in eta_esc): field transmission of the cold cavity on resonance.
  double field_transmission() const;

 private:
  double eta_in_;
  double eta_esc_;
};

/// Pump amplitude relative to the oscillation threshold, d = sqrt(P / P_th).
class OpoDrive {
 public:
  explicit OpoDrive(double d = 0.0);

  double d() const noexcept { return d_; }
  /// G = (1 - d)^-2.
  double gain() const noexcept { return 1.0 / ((1.0 - d_) * (1.0 - d_)); }

 private:
  double d_;
};

/// Output quadrature noise of the OPO (same for any coherent seed).
struct OutputNoise {
  double var_x;  ///< 1 + eta_esc 4d / (1-d)^2
  double var_y;  ///< 1 - eta_esc 4d / (1+d)^2
};

/// Mean-field amplitudes for a phi = 0 seed of amplitude beta:
/// alpha_x = sqrt(4 eta_in eta_esc) 2 beta / (1 - d), alpha_y likewise with 1 + d.
struct OpoAmplitudes {
  double alpha_x;
  double alpha_y;
};

/// Loss rates are taken proportional to power loss per pass:
/// gamma_ic = 1 - r_ic, gamma_oc = 1 - r_oc, gamma_cr = delta_cr.
OpoCoupling coupling_from_mirrors(const OpoMirrorSpec& spec);

double gain_from_drive(const OpoDrive& drive);
/// d = 1 - G^{-1/2}. Throws GainBelowUnity for G < 1.
OpoDrive drive_from_gain(double gain);

/// Cold-cavity power transmission 4 eta_in eta_esc.
double cavity_transmissivity(const OpoCoupling& coupling);

/// eta_esc in [0, 1] is taken as a raw number so the ideal-escape limit
/// eta_esc = 1 can be evaluated.
OutputNoise output_noise(double eta_esc, const OpoDrive& drive);

OpoAmplitudes opo_amplitudes(double beta, const OpoCoupling& coupling, const OpoDrive& drive);

QuadratureMoments opo_output_moments(const CoherentSignal& signal, const OpoCoupling& coupling,
                                     const OpoDrive& drive);

/// Phase of the output mean for an input at theta0:
/// tan(theta_d) = (1 - d)/(1 + d) tan(theta0), in the quadrant of theta0.
double phase_compression(double theta0, const OpoDrive& drive);

/// Phase-diffused coherent seed (phi = 0) through the OPO. The result is the
/// Gaussian-kernel mixture of opo_output_moments:
///   <x> = alpha_x e^{-s/2},  var x = Sx + alpha_x^2 e^{-s} (cosh s - 1),
///   <y> = 0,                 var y = Sy + alpha_y^2 e^{-s} sinh s,   s = sigma^2.
QuadratureMoments opo_diffused_moments(double beta, const PhaseDiffusion& noise,
                                       const OpoCoupling& coupling, const OpoDrive& drive);

}  // namespace opophase
