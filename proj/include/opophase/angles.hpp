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

#include <numbers>

namespace opophase {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double degrees) { return degrees * (kPi / 180.0); }
constexpr double rad_to_deg(double radians) { return radians * (180.0 / kPi); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

}  // namespace opophase
