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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sagald/linalg.hpp"

namespace sagald {

/// F(x) = A x + b with A stored row-major (dim x dim).
struct AffineComponent {
  std::vector<double> matrix;
  Vector offset;
};

/// F(x) = x - amplitude * tanh(<x, u>) u for a unit direction u.
struct TanhWellComponent {
  Vector direction;
  double amplitude = 0.0;
};

using Component = std::variant<AffineComponent, TanhWellComponent>;

/// A sum-decomposable drift F = (1/N) sum_i F_i on R^d together with its
/// declared Lipschitz, growth and dissipativity constants. Immutable once
/// constructed.
class Problem {
 public:
  /// Throws InvalidArgument if shapes disagree or constants are out of range
  /// (M >= 1, m_hat >= 0, c1 > 0, 0 < c2 <= 1).
  Problem(std::size_t dim, std::vector<Component> components, double lipschitz,
          double m_hat, double c1, double c2);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return components_.size(); }
  double lipschitz() const { return lipschitz_; }
  double m_hat() const { return m_hat_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  const std::vector<Component>& components() const { return components_; }

  /// Writes F_i(x) into out. Unchecked; the public checked form is
  /// component_eval.
  void eval_into(std::size_t i, std::span<const double> x,
                 std::span<double> out) const;

 private:
  std::size_t dim_;
  std::vector<Component> components_;
  double lipschitz_;
  double m_hat_;
  double c1_;
  double c2_;
};

/// (1/N) sum_i F_i(x), summed left to right over i.
Vector mean_drift(const Problem& problem, std::span<const double> x);

/// F_i(x) for a zero-based component index.
Vector component_eval(const Problem& problem, std::size_t i,
                      std::span<const double> x);

struct AssumptionReport {
  bool lipschitz_ok = true;
  bool dissip_ok = true;
  bool m_hat_ok = true;
  double worst_ratio = 0.0;   // max_i |F_i(x)-F_i(y)| / |x-y| over samples
  double worst_margin = 0.0;  // min <F(x),x> - c2|x|^2 + c1 over samples
  double max_norm_at_zero = 0.0;
};

/// Sampled check of the declared constants on the ball of the given radius.
AssumptionReport verify_assumptions(const Problem& problem,
                                    std::size_t sample_count, double radius,
                                    std::uint64_t seed);

// Built-in problems with analytically verified constants.
Problem lin_1d();
Problem micro_1d();
Problem well_2d();

/// Names accepted by builtin_problem.
std::vector<std::string> builtin_names();
Problem builtin_problem(std::string_view name);

nlohmann::json to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& doc);

/// Accepts a built-in name or an inline JSON document.
Problem resolve_problem(std::string_view name_or_json);

}  // namespace sagald
