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
#include <cstring>
#include <sstream>
#include <string>

#include "sagald/error.hpp"
#include "sagald/rng.hpp"
#include "sagald/sampler.hpp"

namespace sagald {
namespace {

ChainState lin_state(double x, double g1, double g2) {
  ChainState s;
  s.x = {x};
  s.table = {g1, g2};
  return s;
}

TEST(InitChain, TableHoldsComponentsAtX0) {
  const double zero[1] = {0.0};
  EXPECT_EQ(init_chain(lin_1d(), zero).table, (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(init_chain(micro_1d(), zero).table, (std::vector<double>{0.1, -0.1}));
  const double x0[2] = {0.5, -2.0};
  const auto s = init_chain(well_2d(), x0);
  EXPECT_EQ(s.step, 0u);
  EXPECT_EQ(s.x, (Vector{0.5, -2.0}));
  EXPECT_EQ(s.table.size(), 8u);
}

TEST(InitChain, RejectsBadInput) {
  const double bad[2] = {0.0, 0.0};
  EXPECT_THROW(init_chain(lin_1d(), bad), InvalidArgument);
  const double nan[1] = {std::nan("")};
  EXPECT_THROW(init_chain(lin_1d(), nan), InvalidArgument);
}

TEST(UpdateTerm, HandValues) {
  const double eta = 1.0 / 32.0;
  const auto p = lin_1d();
  EXPECT_EQ(update_term(p, lin_state(2.0, -1.0, 1.0), 0, eta)[0], 0.125);
  EXPECT_EQ(update_term(p, lin_state(2.0, -1.0, 1.0), 1, eta)[0], 0.0625);
  EXPECT_EQ(update_term(p, lin_state(0.0, -1.0, 1.0), 0, 0.37)[0], 0.0);
}

TEST(SagaStep, FixedPointWithoutNoise) {
  const auto next = saga_step(lin_1d(), lin_state(0.0, -1.0, 1.0), {{0.0}, 0}, 1.0 / 32.0);
  EXPECT_EQ(next.x[0], 0.0);
  EXPECT_EQ(next.table, (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(next.step, 1u);
}

TEST(SagaStep, HandValues) {
  const double eta = 1.0 / 32.0;
  const auto a = saga_step(lin_1d(), lin_state(2.0, -1.0, 1.0), {{0.0}, 1}, eta);
  EXPECT_EQ(a.x[0], 1.9375);
  EXPECT_EQ(a.table, (std::vector<double>{-1.0, 3.0}));
  const auto b = saga_step(lin_1d(), lin_state(2.0, -1.0, 1.0), {{1.0}, 1}, eta);
  EXPECT_EQ(b.x[0], 2.1875);
}

TEST(SagaStep, TableUsesPreStepState) {
  const auto next = saga_step(lin_1d(), lin_state(2.0, -1.0, 1.0), {{1.0}, 0}, 1.0 / 32.0);
  EXPECT_EQ(next.table[0], 3.0);  // F_1(2), not F_1(x')
}

TEST(SagaStep, OverflowIsReported) {
  const auto s = lin_state(1e308, 0.0, 0.0);
  try {
    saga_step(lin_1d(), s, {{0.0}, 0}, 100.0);
    FAIL() << "expected NumericOverflow";
  } catch (const NumericOverflow& e) {
    EXPECT_EQ(e.step(), 0u);
    EXPECT_EQ(e.state_norm(), 1e308);
  }
}

TEST(SagaStep, RejectsBadIndexAndShape) {
  EXPECT_THROW(saga_step(lin_1d(), lin_state(0, -1, 1), {{0.0}, 2}, 0.01), InvalidArgument);
  EXPECT_THROW(saga_step(lin_1d(), lin_state(0, -1, 1), {{0.0, 0.0}, 0}, 0.01),
               InvalidArgument);
}

TEST(SgldStep, HandValues) {
  const double eta = 1.0 / 32.0;
  const double one[1] = {1.0}, zero[1] = {0.0}, half[1] = {0.5};
  EXPECT_EQ(sgld_step(lin_1d(), one, {{0.0}, 0}, eta)[0], 0.96875);
  EXPECT_EQ(sgld_step(lin_1d(), zero, {{0.0}, 1}, eta)[0], -0.03125);
  EXPECT_EQ(sgld_step(lin_1d(), half, {{0.0}, 0}, eta)[0], 0.5);  // F_1(0.5) = 0
}

TEST(EtaMax, Builtins) {
  EXPECT_EQ(eta_max(lin_1d()), 0.03125);
  EXPECT_EQ(eta_max(micro_1d()), 0.125);
  EXPECT_EQ(eta_max(well_2d()), 0.00390625);
}

// Independent bookkeeper: remembers the step at which each index was last
// drawn and recomputes F_i(X_tau) from the stored trajectory.
TEST(GradientTable, MatchesBruteForceBookkeeper) {
  for (const auto& name : builtin_names()) {
    const auto p = builtin_problem(name);
    const double eta = eta_max(p);
    const std::size_t d = p.dim();
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      Vector x0(d, 0.3 * static_cast<double>(rep) - 0.5);
      ChainState s = init_chain(p, x0);
      std::vector<Vector> history = {s.x};
      std::vector<std::size_t> last(p.count(), 0);
      for (std::uint64_t n = 0; n < 300; ++n) {
        const auto in = draw_transition(p, 17, rep, n);
        last[in.index] = n;
        s = saga_step(p, s, in, eta);
        history.push_back(s.x);
        for (std::size_t i = 0; i < p.count(); ++i) {
          const auto expect = component_eval(p, i, history[last[i]]);
          const auto row = s.row(i, d);
          for (std::size_t k = 0; k < d; ++k) ASSERT_EQ(row[k], expect[k]) << name;
        }
      }
    }
  }
}

TEST(Unbiasedness, EnumeratedMeanMatchesDrift) {
  CounterStream rng(4, 0, 0, StreamTag::kAux);
  for (const auto& name : {"lin-1d", "well-2d"}) {
    const auto p = builtin_problem(name);
    const std::size_t d = p.dim();
    const double eta = eta_max(p);
    for (int t = 0; t < 200; ++t) {
      ChainState s;
      s.x.resize(d);
      s.table.resize(p.count() * d);
      for (double& v : s.x) v = 5.0 * rng.normal();
      for (double& v : s.table) v = 5.0 * rng.normal();
      Vector avg(d, 0.0);
      double scale = 0.0;
      for (std::size_t i = 0; i < p.count(); ++i) {
        const auto u = update_term(p, s, i, eta);
        for (std::size_t k = 0; k < d; ++k) {
          avg[k] += u[k] / static_cast<double>(p.count());
          scale = std::max(scale, std::fabs(u[k]));
        }
      }
      const auto drift = mean_drift(p, s.x);
      for (std::size_t k = 0; k < d; ++k) {
        scale = std::max(scale, std::fabs(eta * drift[k]));
        const double ulp = std::nextafter(scale, INFINITY) - scale;
        EXPECT_LE(std::fabs(avg[k] - eta * drift[k]), 2.0 * ulp) << name;
      }
    }
  }
}

TEST(RunChain, PreconditionsEnforced) {
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 0.01;
  o.steps = 0;
  EXPECT_THROW(run_chain(lin_1d(), zero, o), ConfigError);
  o.steps = 10;
  o.eta = 0.05;
  EXPECT_THROW(run_chain(lin_1d(), zero, o), ConfigError);
  o.unsafe_eta = true;
  EXPECT_NO_THROW(run_chain(lin_1d(), zero, o));
  o.eta = 0.01;
  o.steps = 2'000'000;
  EXPECT_THROW(run_chain(lin_1d(), zero, o), ConfigError);
}

TEST(RunChain, DeterministicGivenSeed) {
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 1.0 / 32.0;
  o.steps = 500;
  o.seed = 99;
  const auto a = run_chain(lin_1d(), zero, o);
  const auto b = run_chain(lin_1d(), zero, o);
  EXPECT_EQ(a.values, b.values);
  o.seed = 100;
  EXPECT_NE(run_chain(lin_1d(), zero, o).values, a.values);
}

TEST(RunChain, StrideThinsSnapshots) {
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 1.0 / 32.0;
  o.steps = 100;
  o.stride = 25;
  const auto t = run_chain(lin_1d(), zero, o);
  EXPECT_EQ(t.steps, (std::vector<std::uint64_t>{0, 25, 50, 75, 100}));
  o.stride = 1;
  const auto full = run_chain(lin_1d(), zero, o);
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto a = t.snapshot(r), b = full.snapshot(25 * r);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST(RunChain, LongRunSecondMoment) {
  // Invariant law of dX = -1.5 X dt + sqrt(2) dW is N(0, 2/3).
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 1.0 / 32.0;
  o.steps = 100000;
  o.seed = 1;
  const auto t = run_chain(lin_1d(), zero, o);
  double acc = 0.0;
  for (std::size_t r = 1; r < t.size(); ++r) acc += t.snapshot(r)[0] * t.snapshot(r)[0];
  EXPECT_NEAR(acc / static_cast<double>(t.size() - 1), 2.0 / 3.0, 0.1);
}

TEST(RunChain, NoiselessModeFromFixedPointStaysPut) {
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 1.0 / 32.0;
  o.steps = 50;
  o.noise_scale = 0.0;
  const auto t = run_chain(lin_1d(), zero, o);
  for (std::size_t r = 0; r < t.size(); ++r) EXPECT_EQ(t.snapshot(r)[0], 0.0);
}

TEST(TrajectoryCsv, HeaderAndPrecision) {
  const double x0[2] = {0.1, 0.2};
  RunOptions o;
  o.eta = 0.001;
  o.steps = 2;
  const auto t = run_chain(well_2d(), x0, o);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream in(os.str());
  std::string header, row0;
  std::getline(in, header);
  std::getline(in, row0);
  EXPECT_EQ(header,
            "step,x_0,x_1,g_1_0,g_1_1,g_2_0,g_2_1,g_3_0,g_3_1,g_4_0,g_4_1");
  EXPECT_EQ(row0.substr(0, 26), "0,0.10000000000000001,0.20");
}

TEST(TrajectoryBinary, FrameLayout) {
  const double zero[1] = {0.0};
  RunOptions o;
  o.eta = 1.0 / 32.0;
  o.steps = 3;
  const auto t = run_chain(lin_1d(), zero, o);
  std::ostringstream os;
  write_trajectory_binary(os, t);
  const std::string bytes = os.str();
  ASSERT_EQ(bytes.size(), 4u * 4u * 8u);
  double v = 0.0;
  std::memcpy(&v, bytes.data() + 8 * 4 * 2, 8);  // step column of row 2
  EXPECT_EQ(v, 2.0);
  std::memcpy(&v, bytes.data() + 8 * 2, 8);  // g_1 of row 0
  EXPECT_EQ(v, -1.0);
}

}  // namespace
}  // namespace sagald
