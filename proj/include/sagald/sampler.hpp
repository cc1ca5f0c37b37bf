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
#include <iosfwd>
#include <span>
#include <vector>

#include "sagald/linalg.hpp"
#include "sagald/model.hpp"

namespace sagald {

/// The SAGA-LD chain state (X_n, G_n, n). The gradient table is stored
/// row-major: row i holds the stale value of F_i.
struct ChainState {
  Vector x;
  std::vector<double> table;
  std::uint64_t step = 0;

  std::span<double> row(std::size_t i, std::size_t dim) {
    return {table.data() + i * dim, dim};
  }
  std::span<const double> row(std::size_t i, std::size_t dim) const {
    return {table.data() + i * dim, dim};
  }

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

/// Randomness for one transition: Gaussian increment and the component index
/// S_n (zero-based) used both for the drift estimate and the table refresh.
struct TransitionInput {
  Vector gauss;
  std::size_t index = 0;
};

ChainState init_chain(const Problem& problem, std::span<const double> x0);

/// (eta/N) sum_i G^i + eta (F_s(x) - G^s), evaluated with compensated sums so
/// its average over s matches eta * mean_drift to a few ulps.
Vector update_term(const Problem& problem, const ChainState& state,
                   std::size_t index, double eta);

ChainState saga_step(const Problem& problem, const ChainState& state,
                     const TransitionInput& input, double eta);

Vector sgld_step(const Problem& problem, std::span<const double> x,
                 const TransitionInput& input, double eta);

/// Largest step size c2 / (8 M^2) for which the moment bounds are in force.
double eta_max(const Problem& problem);

/// Allocation-free stepping for hot loops. Holds a reference to the problem.
class SagaKernel {
 public:
  SagaKernel(const Problem& problem, double eta);

  const Problem& problem() const { return *problem_; }
  double eta() const { return eta_; }
  double noise_scale() const { return noise_scale_; }

  /// out = update term at (state, s); component_out = F_s(state.x).
  void update_term_into(const ChainState& state, std::size_t s,
                        std::span<double> out,
                        std::span<double> component_out) const;

  /// Advances the state in place. Throws NumericOverflow on non-finite output.
  void step(ChainState& state, std::span<const double> gauss, std::size_t s);

 private:
  const Problem* problem_;
  double eta_;
  double noise_scale_;
  Vector update_;
  Vector component_;
};

/// Draws the direct-chain input for (seed, replication, step).
TransitionInput draw_transition(const Problem& problem, std::uint64_t seed,
                                std::uint64_t replication, std::uint64_t step);
void draw_transition_into(std::size_t count, std::uint64_t key,
                          std::uint64_t step, std::span<double> gauss,
                          std::size_t& index);

struct RunOptions {
  double eta = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::uint64_t stride = 0;  // 0 selects the default (1 for runs <= 1e6 steps)
  bool unsafe_eta = false;
  double noise_scale = 1.0;  // 0 gives the noiseless diagnostic mode
};

/// Thinned snapshots, each row laid out as (x, table) of width (N+1)d.
struct Trajectory {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::vector<std::uint64_t> steps;
  std::vector<double> values;

  std::size_t width() const { return (count + 1) * dim; }
  std::size_t size() const { return steps.size(); }
  std::span<const double> snapshot(std::size_t r) const {
    return {values.data() + r * width(), width()};
  }
};

inline constexpr std::uint64_t kMaxDefaultStrideSteps = 1'000'000;

/// Runs the direct chain from (x0, F(x0)). Throws ConfigError if eta exceeds
/// eta_max without unsafe_eta, or if steps == 0, or if a long run has no
/// stride set; NumericOverflow if the chain diverges.
Trajectory run_chain(const Problem& problem, std::span<const double> x0,
                     const RunOptions& options);

/// CSV with header "step,x_0..,g_1_0.." and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Little-endian float64 rows, row-major; the step column is stored as a
/// float64 too so every frame row is (N+1)d+1 doubles.
void write_trajectory_binary(std::ostream& os, const Trajectory& traj);

}  // namespace sagald
