// Copyright 2026 The sagald Authors.
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sagald {

/// Bad argument to a library call (dimension mismatch, index out of range).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment configuration that violates a safety or validity rule, such as
/// a step size above the cap without the unsafe flag.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A chain produced a non-finite coordinate.
class NumericOverflow : public std::runtime_error {
 public:
  NumericOverflow(std::uint64_t step, double state_norm)
      : std::runtime_error("non-finite state at step " + std::to_string(step) +
                           " (pre-step |x| = " + std::to_string(state_norm) +
                           ")"),
        step_(step),
        state_norm_(state_norm) {}

  std::uint64_t step() const noexcept { return step_; }
  double state_norm() const noexcept { return state_norm_; }

 private:
  std::uint64_t step_;
  double state_norm_;
};

}  // namespace sagald
