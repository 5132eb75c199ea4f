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

#include <stdexcept>
#include <string>
#include <string_view>

namespace opophase {

/// Failure categories raised by the model and sampler layers.
enum class ErrorCode {
  InvalidParameter,
  ZeroMeanVector,
  NonPositiveAmplitude,
  ZeroLossCavity,
  GainBelowUnity,
  AtOrAboveThreshold,
  OutOfModelRange,
  MultipleCrossings,
  InsufficientSamples,
  UnknownFigure,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying an ErrorCode. Every error thrown by the library is a
/// ModelError; the CLI maps them onto exit statuses.
class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace opophase
