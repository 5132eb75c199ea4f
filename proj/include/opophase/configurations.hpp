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

// The two experimental OPO configurations (A and B) with their measured
// amplitudes, gains, efficiencies, mirror data and cavity transmissivities.

#include <optional>
#include <span>
#include <string_view>

#include "opophase/opo_model.hpp"

namespace opophase {

struct ExperimentConfiguration {
  std::string_view name;
  double beta;
  double gain;
  double eta_in;
  double eta_esc;
  double r_ic;
  double r_oc;
  double delta_cr;
  double measured_transmissivity;

  OpoCoupling coupling() const { return OpoCoupling(eta_in, eta_esc); }
  OpoMirrorSpec mirrors() const { return OpoMirrorSpec(r_ic, r_oc, delta_cr); }
  OpoDrive drive() const { return drive_from_gain(gain); }
};

inline constexpr double kCrystalLoss = 2.42e-3;
inline constexpr double kOutputCouplerReflectivity = 0.917;

inline constexpr ExperimentConfiguration kConfigA{
    .name = "configA",
    .beta = 5.70,
    .gain = 2.75,
    .eta_in = 0.008,
    .eta_esc = 0.937,
    .r_ic = 0.999,
    .r_oc = kOutputCouplerReflectivity,
    .delta_cr = kCrystalLoss,
    .measured_transmissivity = 0.029,
};

inline constexpr ExperimentConfiguration kConfigB{
    .name = "configB",
    .beta = 2.05,
    .gain = 3.12,
    .eta_in = 0.079,
    .eta_esc = 0.871,
    .r_ic = 0.9925,
    .r_oc = kOutputCouplerReflectivity,
    .delta_cr = kCrystalLoss,
    .measured_transmissivity = 0.26,
};

inline constexpr ExperimentConfiguration kConfigurations[] = {kConfigA, kConfigB};

std::optional<ExperimentConfiguration> find_configuration(std::string_view name);

}  // namespace opophase
