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
#include <optional>
#include <span>
#include <vector>

#include "sagald/model.hpp"
#include "sagald/randommap.hpp"
#include "sagald/sampler.hpp"

namespace sagald {

/// Per-block record; block k starts at step k(N+1).
struct BlockRecord {
  std::uint64_t k = 0;
  bool in_h = false;     // chains equal at the block start
  bool in_d = false;     // every block of both chains inside B(K)
  bool i_event = false;  // full regeneration sweep over this block
};

struct CouplingTrace {
  std::optional<std::uint64_t> meet_step;
  std::vector<BlockRecord> blocks;
  std::uint64_t horizon = 0;
  std::uint64_t regenerations = 0;
  bool diverged_after_meet = false;  // must stay false: meetings are absorbing
};

/// Runs two map chains on the identical noise stream of `key` from steps
/// 0..horizon. Equality is bitwise on x and every table row. With
/// track_after_meet == false the simulation stops at the meeting and later
/// blocks are logged as met with in_d == false.
CouplingTrace run_coupled(const Problem& problem, const ChainState& init_a,
                          const ChainState& init_b, std::uint64_t horizon,
                          const ConstantsBundle& bundle, std::uint64_t key,
                          bool track_after_meet = true);

/// I_k: chains differ at the block start, both lie in D_k, every selector of
/// the block's N+1 records is <= beta, and records 1..N sweep indices 0..N-1.
bool block_event_indicator(const Problem& problem, const ChainState& a,
                           const ChainState& b,
                           std::span<const NoiseRecord> block_records,
                           const ConstantsBundle& bundle);

/// Same, drawing block k's records from the stream.
bool block_event_indicator(const Problem& problem, const ChainState& a,
                           const ChainState& b, std::uint64_t k,
                           std::uint64_t key, const ConstantsBundle& bundle);

/// ln of the per-block sweep probability beta (beta/N)^N.
double log_block_probability(double log_beta, std::size_t count);

/// (1 - 2 eps) [1 - (1 - beta (beta/N)^N)^k], stable for tiny beta.
double theoretical_meet_bound(std::uint64_t k, double log_beta,
                              std::size_t count, double eps);

struct NZero {
  bool finite = false;
  std::uint64_t value = 0;  // valid iff finite
  std::uint64_t k_star = 0;
  double log_value = 0.0;   // ln n0; +inf when beta == 0
};

/// n0 = (N+1) k*, k* = ceil(ln eps / ln(1 - beta (beta/N)^N)). Reported as a
/// sentinel with its log magnitude when it exceeds 64-bit range.
NZero n_zero(double log_beta, std::size_t count, double eps);

/// How the two chains of each replication are initialized.
struct CouplingInit {
  enum class Kind { kFixed, kFromRuns };
  Kind kind = Kind::kFixed;
  Vector x_a;
  Vector x_b;
  std::uint64_t warmup = 0;  // kFromRuns: steps of an independent direct chain
  double warmup_eta = 0.0;   // 0 selects the coupling step size
};

struct MeetProbReport {
  std::vector<double> p_hat;           // P(H_k)
  std::vector<double> stderr_;         // sqrt(p(1-p)/reps)
  // Agresti-Coull form; unlike the plug-in it is positive at p_hat = 0 or 1.
  std::vector<double> stderr_adjusted;
  std::vector<double> hbar_d;          // P(not H_k and D_k)
  std::vector<double> d_occupancy;     // P(D_k) over unmet pairs and met pairs alike
  std::vector<std::size_t> unmet;      // replications not yet met at block k
  std::vector<double> bound_paper;     // theoretical_meet_bound
  std::vector<double> bound_empirical; // p_hat[k-1] + hbar_d[k-1] * block prob
  std::vector<std::uint64_t> meet_steps;  // per replication; horizon+1 if none
  double log_block_prob = 0.0;
  std::uint64_t i_events = 0;
  std::uint64_t fontos_violations = 0;
  std::size_t replications = 0;
  std::uint64_t horizon = 0;
};

MeetProbReport empirical_meet_prob(const Problem& problem,
                                   const CouplingInit& init, std::uint64_t k_max,
                                   std::size_t replications,
                                   const ConstantsBundle& bundle,
                                   std::uint64_t seed, unsigned threads = 1);

struct RecursionCheck {
  bool pass = true;
  std::size_t checked_blocks = 0;
  double worst_slack = 0.0;  // min over checked k of lhs - rhs
};

/// p_{k+1} - p_k + 3 se_{k+1} >= P(not H_k and D_k) beta (beta/N)^N for every k
/// with at least min_unmet surviving pairs; se is the Agresti-Coull error.
RecursionCheck check_recursion(const MeetProbReport& report,
                               std::size_t min_unmet = 100);

struct OccupancyReport {
  double fraction = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
};

/// Fraction of (step, replication) pairs at which x and every table row of
/// the direct chain started at x0 lie in B(K).
OccupancyReport good_set_occupancy(const Problem& problem,
                                   const ConstantsBundle& bundle,
                                   std::span<const double> x0,
                                   std::uint64_t steps, std::size_t replications,
                                   std::uint64_t seed, unsigned threads = 1);

}  // namespace sagald
