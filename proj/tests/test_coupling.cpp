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

#include <gtest/gtest.h>

#include <cmath>

#include "sagald/coupling.hpp"
#include "sagald/error.hpp"

namespace sagald {
namespace {

ConstantsBundle micro_override(double k = 0.1, double eta = 0.5) {
  BundleOptions o;
  o.k_override = k;
  o.unsafe_eta = true;
  return derive_constants(micro_1d(), eta, 0.1, 0.0, o);
}

ChainState state(double x, double g1, double g2) { return ChainState{{x}, {g1, g2}, 0}; }

// N+1 records that regenerate at every step and sweep indices 0..N-1.
std::vector<NoiseRecord> sweep_block(std::size_t n, std::uint64_t key,
                                     const ConstantsBundle& b) {
  std::vector<NoiseRecord> recs;
  for (std::size_t o = 0; o <= n; ++o) {
    auto rec = draw_noise_record(1, n, key, o);
    rec.selector = 0.5 * std::exp(b.log_beta);
    if (o > 0) rec.index = o - 1;
    recs.push_back(rec);
  }
  return recs;
}

TEST(RunCoupled, IdenticalInitsMeetAtZero) {
  const auto b = micro_override();
  const auto s = state(0.4, 0.5, -0.3);
  const auto tr = run_coupled(micro_1d(), s, s, 300, b, 9);
  ASSERT_TRUE(tr.meet_step.has_value());
  EXPECT_EQ(*tr.meet_step, 0u);
  EXPECT_FALSE(tr.diverged_after_meet);
  for (const auto& blk : tr.blocks) EXPECT_TRUE(blk.in_h);
}

TEST(RunCoupled, MeetingsAreAbsorbing) {
  const auto b = micro_override();
  int met = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto tr = run_coupled(micro_1d(), state(0.0, 0.1, -0.1), state(2.0, 2.1, 1.9),
                                1500, b, replication_key(5, r));
    EXPECT_FALSE(tr.diverged_after_meet);
    bool seen = false;
    for (const auto& blk : tr.blocks) {
      if (seen) {
        EXPECT_TRUE(blk.in_h);
      }
      seen = seen || blk.in_h;
    }
    met += tr.meet_step.has_value();
  }
  EXPECT_GT(met, 25);
}

TEST(RunCoupled, BlockLayout) {
  const auto b = micro_override();
  const auto tr = run_coupled(micro_1d(), state(0.0, 0.1, -0.1), state(5.0, 5.1, 4.9), 30, b, 1);
  ASSERT_EQ(tr.blocks.size(), 11u);  // k = 0..10, block k at step 3k
  for (std::size_t k = 0; k < tr.blocks.size(); ++k) EXPECT_EQ(tr.blocks[k].k, k);
  EXPECT_FALSE(tr.blocks[0].in_h);
  EXPECT_THROW(run_coupled(micro_1d(), state(0, 0, 0), state(1, 0, 0), 0, b, 1),
               InvalidArgument);
}

TEST(BlockEvent, CraftedSweepIsAnEvent) {
  const auto b = micro_override();
  const auto recs = sweep_block(2, 3, b);
  EXPECT_TRUE(block_event_indicator(micro_1d(), state(0.05, 0.1, -0.1),
                                    state(-0.08, 0.02, 0.09), recs, b));
}

TEST(BlockEvent, OneFailedSelectorBreaksIt) {
  const auto b = micro_override();
  for (std::size_t o = 0; o < 3; ++o) {
    auto recs = sweep_block(2, 3, b);
    recs[o].selector = 0.999;
    EXPECT_FALSE(block_event_indicator(micro_1d(), state(0.05, 0.1, -0.1),
                                       state(-0.08, 0.02, 0.09), recs, b));
  }
}

TEST(BlockEvent, WrongSweepOrderBreaksIt) {
  const auto b = micro_override();
  auto recs = sweep_block(2, 3, b);
  std::swap(recs[1].index, recs[2].index);
  EXPECT_FALSE(block_event_indicator(micro_1d(), state(0.05, 0.1, -0.1),
                                     state(-0.08, 0.02, 0.09), recs, b));
}

TEST(BlockEvent, EqualOrOutsideStatesAreNotEvents) {
  const auto b = micro_override();
  const auto recs = sweep_block(2, 3, b);
  const auto s = state(0.05, 0.1, -0.1);
  EXPECT_FALSE(block_event_indicator(micro_1d(), s, s, recs, b));
  EXPECT_FALSE(block_event_indicator(micro_1d(), s, state(0.5, 0.1, -0.1), recs, b));
  EXPECT_THROW(block_event_indicator(micro_1d(), s, s, std::span(recs).first(2), b),
               InvalidArgument);
}

// Any event block ends with both chains identical.
TEST(BlockEvent, SweepForcesEqualityFromRandomDStates) {
  const auto b = micro_override();
  const auto p = micro_1d();
  CounterStream rng(2, 0, 0, StreamTag::kAux);
  auto draw_d = [&] {
    ChainState s;
    s.x = {b.good_x_radius * (2.0 * rng.uniform() - 1.0)};
    s.table = {b.good_x_radius * (2.0 * rng.uniform() - 1.0),
               b.good_x_radius * (2.0 * rng.uniform() - 1.0)};
    return s;
  };
  MapKernel ka(p, b), kb(p, b);
  for (std::uint64_t t = 0; t < 2000; ++t) {
    auto a = draw_d(), c = draw_d();
    const auto recs = sweep_block(2, replication_key(7, t), b);
    ASSERT_TRUE(block_event_indicator(p, a, c, recs, b));
    for (const auto& rec : recs) {
      ka.step(a, rec);
      kb.step(c, rec);
    }
    ASSERT_EQ(a.x, c.x);
    ASSERT_EQ(a.table, c.table);
  }
}

TEST(TheoreticalBound, HandValues) {
  EXPECT_EQ(theoretical_meet_bound(0, std::log(0.5), 1, 0.1), 0.0);
  EXPECT_NEAR(theoretical_meet_bound(1, std::log(0.5), 1, 0.1), 0.2, 1e-15);
  EXPECT_NEAR(theoretical_meet_bound(2, std::log(0.5), 1, 0.1), 0.8 * (1 - 0.5625), 1e-15);
  EXPECT_EQ(theoretical_meet_bound(1000, -1e6, 2, 0.1), 0.0);
  const double tiny = theoretical_meet_bound(10, -40.0, 1, 0.1);
  EXPECT_NEAR(tiny, 0.8 * 10.0 * std::exp(-80.0), 1e-40);
}

TEST(NZeroTest, HandValue) {
  const auto n0 = n_zero(std::log(0.5), 1, 0.1);
  ASSERT_TRUE(n0.finite);
  EXPECT_EQ(n0.k_star, 9u);
  EXPECT_EQ(n0.value, 18u);
  EXPECT_LE(std::pow(0.75, 9), 0.1);
  EXPECT_GT(std::pow(0.75, 8), 0.1);
}

TEST(NZeroTest, NonincreasingInEps) {
  std::uint64_t prev = UINT64_MAX;
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3}) {
    const auto n0 = n_zero(std::log(0.3), 2, eps);
    ASSERT_TRUE(n0.finite);
    EXPECT_LE(n0.value, prev);
    prev = n0.value;
  }
}

TEST(NZeroTest, FaithfulConstantsGiveSentinel) {
  const auto b = derive_constants(lin_1d(), 1.0 / 32.0, 0.1, 0.0);
  const auto n0 = n_zero(b.log_beta, 2, 0.1);
  EXPECT_FALSE(n0.finite);
  EXPECT_GT(n0.log_value, 1e12);
  const auto zero = n_zero(-INFINITY, 2, 0.1);
  EXPECT_FALSE(zero.finite);
  EXPECT_EQ(zero.log_value, INFINITY);
}

TEST(EmpiricalMeetProb, DistinctInitsStartUnmetAndIncrease) {
  const auto b = micro_override();
  CouplingInit init;
  init.x_a = {0.0};
  init.x_b = {2.0};
  const auto rep = empirical_meet_prob(micro_1d(), init, 150, 400, b, 3, 2);
  EXPECT_EQ(rep.p_hat[0], 0.0);
  for (std::size_t k = 1; k < rep.p_hat.size(); ++k) EXPECT_GE(rep.p_hat[k], rep.p_hat[k - 1]);
  EXPECT_EQ(rep.fontos_violations, 0u);
  for (std::size_t k = 0; k < rep.p_hat.size(); ++k) {
    const double p = rep.p_hat[k];
    EXPECT_EQ(rep.stderr_[k], std::sqrt(p * (1 - p) / 400.0));
    EXPECT_GT(rep.stderr_adjusted[k], 0.0);
  }
  EXPECT_TRUE(check_recursion(rep).pass);
}

TEST(EmpiricalMeetProb, IdenticalInitsAlwaysMet) {
  const auto b = micro_override();
  CouplingInit init;
  init.x_a = init.x_b = {0.7};
  const auto rep = empirical_meet_prob(micro_1d(), init, 20, 100, b, 3);
  for (double p : rep.p_hat) EXPECT_EQ(p, 1.0);
}

TEST(EmpiricalMeetProb, WarmStartInitsAreReproducible) {
  const auto b = micro_override();
  CouplingInit init;
  init.kind = CouplingInit::Kind::kFromRuns;
  init.x_a = {0.0};
  init.x_b = {0.0};
  init.warmup = 200;
  init.warmup_eta = 0.125;
  const auto a = empirical_meet_prob(micro_1d(), init, 50, 100, b, 4, 1);
  const auto c = empirical_meet_prob(micro_1d(), init, 50, 100, b, 4, 3);
  EXPECT_EQ(a.p_hat, c.p_hat);
  EXPECT_EQ(a.meet_steps, c.meet_steps);
  EXPECT_EQ(a.p_hat[0], 0.0);
}

TEST(EmpiricalMeetProb, Preconditions) {
  const auto b = micro_override();
  CouplingInit init;
  init.x_a = {0.0};
  init.x_b = {1.0};
  EXPECT_THROW(empirical_meet_prob(micro_1d(), init, 5, 99, b, 1), InvalidArgument);
  init.x_b = {1.0, 2.0};
  EXPECT_THROW(empirical_meet_prob(micro_1d(), init, 5, 100, b, 1), InvalidArgument);
}

// Past n0 computed from the overridden beta, the unmet fraction is below 3 eps.
TEST(EmpiricalMeetProb, UnmetFractionPastNZero) {
  const auto b = micro_override();
  const double eps = 0.1;
  const auto n0 = n_zero(b.log_beta, 2, eps);
  ASSERT_TRUE(n0.finite);
  CouplingInit init;
  init.x_a = {-1.0};
  init.x_b = {1.5};
  const auto rep = empirical_meet_prob(micro_1d(), init, n0.k_star, 200, b, 8);
  const double unmet = 1.0 - rep.p_hat.back();
  EXPECT_LE(unmet, 3.0 * eps + 3.0 * rep.stderr_adjusted.back());
}

TEST(Occupancy, FaithfulRadiusIsAlwaysOccupied) {
  const auto b = derive_constants(lin_1d(), 1.0 / 32.0, 0.1, 0.0);
  const double zero[1] = {0.0};
  const auto occ = good_set_occupancy(lin_1d(), b, zero, 1000, 100, 1, 2);
  EXPECT_EQ(occ.fraction, 1.0);
  EXPECT_EQ(occ.samples, 100000u);
}

TEST(Occupancy, ZeroRadiusIsNeverOccupied) {
  const auto b = micro_override(0.0, 0.125);
  const double zero[1] = {0.0};
  EXPECT_EQ(good_set_occupancy(micro_1d(), b, zero, 500, 20, 1).fraction, 0.0);
}

TEST(Occupancy, ModerateRadiusIsStrictlyBetween) {
  const auto b = micro_override(3.0, 0.125);
  const double zero[1] = {0.0};
  const auto occ = good_set_occupancy(micro_1d(), b, zero, 2000, 50, 1);
  EXPECT_GT(occ.fraction, 0.0);
  EXPECT_LT(occ.fraction, 1.0);
  EXPECT_GT(occ.stderr_, 0.0);
}

}  // namespace
}  // namespace sagald
