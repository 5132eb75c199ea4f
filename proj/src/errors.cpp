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

#include "opophase/errors.hpp"

namespace opophase {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ZeroMeanVector: return "ZeroMeanVector";
    case ErrorCode::NonPositiveAmplitude: return "NonPositiveAmplitude";
    case ErrorCode::ZeroLossCavity: return "ZeroLossCavity";
    case ErrorCode::GainBelowUnity: return "GainBelowUnity";
    case ErrorCode::AtOrAboveThreshold: return "AtOrAboveThreshold";
    case ErrorCode::OutOfModelRange: return "OutOfModelRange";
    case ErrorCode::MultipleCrossings: return "MultipleCrossings";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
  }
  return "Unknown";
}

ModelError::ModelError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw ModelError(code, what); }

}  // namespace opophase
