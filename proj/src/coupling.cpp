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

#include "sagald/coupling.hpp"

#include <cmath>
#include <limits>

#include "sagald/error.hpp"
#include "sagald/parallel.hpp"

namespace sagald {
namespace {

bool same_state(const ChainState& a, const ChainState& b) {
  return a.x == b.x && a.table == b.table;
}

// Keys for initialization runs, disjoint from the coupling streams.
constexpr std::uint64_t kInitSalt = 0x5DEECE66D1234567ull;

ChainState warm_start(const Problem& problem, std::span<const double> x0,
                      std::uint64_t steps, double eta, std::uint64_t key) {
  ChainState s = init_chain(problem, x0);
  if (steps == 0) return s;
  SagaKernel kernel(problem, eta);
  Vector gauss(problem.dim());
  std::size_t index = 0;
  for (std::uint64_t n = 0; n < steps; ++n) {
    draw_transition_into(problem.count(), key, n, gauss, index);
    kernel.step(s, gauss, index);
  }
  s.step = 0;
  return s;
}

}  // namespace

CouplingTrace run_coupled(const Problem& problem, const ChainState& init_a,
                          const ChainState& init_b, std::uint64_t horizon,
                          const ConstantsBundle& bundle, std::uint64_t key,
                          bool track_after_meet) {
  if (horizon == 0) throw InvalidArgument("horizon must be >= 1");
  if (!all_finite(init_a.x) || !all_finite(init_b.x) ||
      !all_finite(init_a.table) || !all_finite(init_b.table))
    throw InvalidArgument("initial pairs must be finite");

  const std::size_t d = problem.dim();
  const std::uint64_t block_len = problem.count() + 1;
  const double k_radius = bundle.good_x_radius;

  CouplingTrace trace;
  trace.horizon = horizon;
  trace.blocks.reserve(horizon / block_len + 1);

  ChainState a = init_a, b = init_b;
  a.step = b.step = 0;
  MapKernel kernel_a(problem, bundle), kernel_b(problem, bundle);
  NoiseRecord rec;
  bool met = same_state(a, b);
  if (met) trace.meet_step = 0;
  bool candidate = false;  // current block can still be an I_k event

  for (std::uint64_t t = 0;; ++t) {
    const std::uint64_t offset = t % block_len;
    if (offset == 0) {
      if (!trace.blocks.empty()) trace.blocks.back().i_event = candidate;
      BlockRecord blk;
      blk.k = t / block_len;
      blk.in_h = met;
      blk.in_d = in_block_set(a, d, k_radius) && in_block_set(b, d, k_radius);
      trace.blocks.push_back(blk);
      candidate = !blk.in_h && blk.in_d && t + block_len <= horizon;
    }
    if (t == horizon) break;
    if (met && !track_after_meet && offset == 0) {
      for (std::uint64_t k = t / block_len + 1; k * block_len <= horizon; ++k)
        trace.blocks.push_back(BlockRecord{k, true, false, false});
      candidate = false;
      break;
    }

    fill_noise_record(rec, d, problem.count(), key, t);
    if (candidate) {
      const bool sweep_ok = offset == 0 || rec.index == offset - 1;
      candidate = sweep_ok && regenerates(rec, bundle.log_beta);
    }
    if (kernel_a.step(a, rec)) ++trace.regenerations;
    kernel_b.step(b, rec);
    const bool equal = same_state(a, b);
    if (met && !equal) trace.diverged_after_meet = true;
    if (!met && equal) {
      met = true;
      trace.meet_step = t + 1;
    }
  }
  // A block cut off by the horizon never completes its sweep.
  if (!trace.blocks.empty() && trace.blocks.back().k * block_len + block_len > horizon)
    trace.blocks.back().i_event = false;
  return trace;
}

bool block_event_indicator(const Problem& problem, const ChainState& a,
                           const ChainState& b,
                           std::span<const NoiseRecord> block_records,
                           const ConstantsBundle& bundle) {
  const std::size_t n = problem.count();
  if (block_records.size() != n + 1)
    throw InvalidArgument("a block has exactly N+1 noise records");
  if (same_state(a, b)) return false;
  const std::size_t d = problem.dim();
  if (!in_block_set(a, d, bundle.good_x_radius) ||
      !in_block_set(b, d, bundle.good_x_radius))
    return false;
  for (std::size_t o = 0; o <= n; ++o) {
    if (!regenerates(block_records[o], bundle.log_beta)) return false;
    if (o > 0 && block_records[o].index != o - 1) return false;
  }
  return true;
}

bool block_event_indicator(const Problem& problem, const ChainState& a,
                           const ChainState& b, std::uint64_t k,
                           std::uint64_t key, const ConstantsBundle& bundle) {
  const std::size_t n = problem.count();
  std::vector<NoiseRecord> recs(n + 1);
  for (std::size_t o = 0; o <= n; ++o)
    fill_noise_record(recs[o], problem.dim(), n, key, k * (n + 1) + o);
  return block_event_indicator(problem, a, b, recs, bundle);
}

double log_block_probability(double log_beta, std::size_t count) {
  const double n = static_cast<double>(count);
  return log_beta + n * (log_beta - std::log(n));
}

double theoretical_meet_bound(std::uint64_t k, double log_beta,
                              std::size_t count, double eps) {
  if (k == 0) return 0.0;
  const double block = std::exp(log_block_probability(log_beta, count));
  if (block >= 1.0) return 1.0 - 2.0 * eps;
  const double miss = static_cast<double>(k) * std::log1p(-block);
  return (1.0 - 2.0 * eps) * -std::expm1(miss);
}

NZero n_zero(double log_beta, std::size_t count, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 3.0))
    throw InvalidArgument("eps must lie in (0, 1/3)");
  NZero out;
  const double n1 = static_cast<double>(count + 1);
  if (log_beta == -std::numeric_limits<double>::infinity()) {
    out.log_value = std::numeric_limits<double>::infinity();
    return out;
  }
  const double log_block = log_block_probability(log_beta, count);
  const double block = std::exp(log_block);
  double log_k;
  double k_real = 0.0;
  if (block >= 1.0) {
    k_real = 1.0;
    log_k = 0.0;
  } else if (block > 0.0) {
    k_real = std::ceil(std::log(eps) / std::log1p(-block));
    log_k = std::log(k_real);
  } else {
    // log1p(-b) ~ -b once b underflows.
    log_k = std::log(-std::log(eps)) - log_block;
  }
  out.log_value = log_k + std::log(n1);
  constexpr double kLimit = 9.0e18;
  if (block > 0.0 && k_real * n1 < kLimit) {
    out.finite = true;
    out.k_star = static_cast<std::uint64_t>(k_real);
    out.value = out.k_star * (count + 1);
  }
  return out;
}

MeetProbReport empirical_meet_prob(const Problem& problem,
                                   const CouplingInit& init, std::uint64_t k_max,
                                   std::size_t replications,
                                   const ConstantsBundle& bundle,
                                   std::uint64_t seed, unsigned threads) {
  if (replications < 100) throw InvalidArgument("need at least 100 replications");
  if (init.x_a.size() != problem.dim() || init.x_b.size() != problem.dim())
    throw InvalidArgument("initial points have wrong dimension");

  const std::uint64_t block_len = problem.count() + 1;
  const std::uint64_t horizon = k_max * block_len;
  const std::size_t n_blocks = k_max + 1;
  const double warm_eta = init.warmup_eta > 0.0 ? init.warmup_eta : bundle.eta;

  // flags per (rep, block): bit0 in_h, bit1 in_d, bit2 i_event.
  std::vector<std::uint8_t> flags(replications * n_blocks, 0);
  std::vector<std::uint64_t> meets(replications, horizon + 1);
  std::vector<std::uint64_t> violations(replications, 0);

  parallel_for(replications, threads, [&](std::size_t r) {
    ChainState a, b;
    if (init.kind == CouplingInit::Kind::kFixed) {
      a = init_chain(problem, init.x_a);
      b = init_chain(problem, init.x_b);
    } else {
      a = warm_start(problem, init.x_a, init.warmup, warm_eta,
                     replication_key(seed ^ kInitSalt, 2 * r));
      b = warm_start(problem, init.x_b, init.warmup, warm_eta,
                     replication_key(seed ^ kInitSalt, 2 * r + 1));
    }
    const CouplingTrace tr = run_coupled(problem, a, b, horizon, bundle,
                                         replication_key(seed, r), false);
    if (tr.meet_step) meets[r] = *tr.meet_step;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      const auto& blk = tr.blocks[k];
      flags[r * n_blocks + k] = static_cast<std::uint8_t>(
          (blk.in_h ? 1 : 0) | (blk.in_d ? 2 : 0) | (blk.i_event ? 4 : 0));
      if (blk.i_event && k + 1 < n_blocks && !tr.blocks[k + 1].in_h)
        ++violations[r];
    }
  });

  MeetProbReport rep;
  rep.replications = replications;
  rep.horizon = horizon;
  rep.meet_steps = meets;
  rep.log_block_prob = log_block_probability(bundle.log_beta, problem.count());
  const double block_prob = std::exp(rep.log_block_prob);
  const double reps = static_cast<double>(replications);
  for (auto v : violations) rep.fontos_violations += v;

  for (std::size_t k = 0; k < n_blocks; ++k) {
    std::size_t met = 0, hbar_d = 0;
    for (std::size_t r = 0; r < replications; ++r) {
      const auto f = flags[r * n_blocks + k];
      if (f & 1) ++met;
      if (!(f & 1) && (f & 2)) ++hbar_d;
      if (f & 4) ++rep.i_events;
    }
    const double p = static_cast<double>(met) / reps;
    rep.p_hat.push_back(p);
    rep.stderr_.push_back(std::sqrt(p * (1.0 - p) / reps));
    const double p_adj = (static_cast<double>(met) + 2.0) / (reps + 4.0);
    rep.stderr_adjusted.push_back(std::sqrt(p_adj * (1.0 - p_adj) / (reps + 4.0)));
    rep.hbar_d.push_back(static_cast<double>(hbar_d) / reps);
    rep.unmet.push_back(replications - met);
    rep.d_occupancy.push_back(met == replications
                                  ? 0.0
                                  : static_cast<double>(hbar_d) /
                                        static_cast<double>(replications - met));
    rep.bound_paper.push_back(
        theoretical_meet_bound(k, bundle.log_beta, problem.count(), bundle.eps));
    rep.bound_empirical.push_back(
        k == 0 ? 0.0 : rep.p_hat[k - 1] + rep.hbar_d[k - 1] * block_prob);
  }
  return rep;
}

RecursionCheck check_recursion(const MeetProbReport& report,
                               std::size_t min_unmet) {
  RecursionCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  const double block_prob = std::exp(report.log_block_prob);
  for (std::size_t k = 0; k + 1 < report.p_hat.size(); ++k) {
    if (report.unmet[k] < min_unmet) continue;
    const double lhs =
        report.p_hat[k + 1] - report.p_hat[k] + 3.0 * report.stderr_adjusted[k + 1];
    const double rhs = report.hbar_d[k] * block_prob;
    out.worst_slack = std::min(out.worst_slack, lhs - rhs);
    if (lhs < rhs) out.pass = false;
    ++out.checked_blocks;
  }
  return out;
}

OccupancyReport good_set_occupancy(const Problem& problem,
                                   const ConstantsBundle& bundle,
                                   std::span<const double> x0,
                                   std::uint64_t steps, std::size_t replications,
                                   std::uint64_t seed, unsigned threads) {
  if (steps == 0 || replications == 0)
    throw InvalidArgument("steps and replications must be >= 1");
  const std::size_t d = problem.dim();
  std::vector<double> per_rep(replications, 0.0);
  parallel_for(replications, threads, [&](std::size_t r) {
    ChainState s = init_chain(problem, x0);
    SagaKernel kernel(problem, bundle.eta);
    const std::uint64_t key = replication_key(seed, r);
    Vector gauss(d);
    std::size_t index = 0;
    std::uint64_t inside = 0;
    for (std::uint64_t n = 0; n < steps; ++n) {
      draw_transition_into(problem.count(), key, n, gauss, index);
      kernel.step(s, gauss, index);
      if (in_block_set(s, d, bundle.good_x_radius)) ++inside;
    }
    per_rep[r] = static_cast<double>(inside) / static_cast<double>(steps);
  });
  OccupancyReport out;
  out.samples = steps * replications;
  double mean = 0.0;
  for (double v : per_rep) mean += v;
  mean /= static_cast<double>(replications);
  out.fraction = mean;
  if (replications > 1) {
    double ss = 0.0;
    for (double v : per_rep) ss += (v - mean) * (v - mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(replications - 1) /
                            static_cast<double>(replications));
  }
  return out;
}

}  // namespace sagald
