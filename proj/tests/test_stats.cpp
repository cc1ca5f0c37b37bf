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
#include <numbers>

#include "sagald/error.hpp"
#include "sagald/randommap.hpp"
#include "sagald/stats.hpp"

namespace sagald {
namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  std::vector<double> v(n);
  CounterStream rng(seed, 0, 0, StreamTag::kAux);
  for (double& x : v) x = shift + rng.normal();
  return v;
}

// Midpoint-rule integral of |phi(x) - phi(x - 1)| / 2.
double tv_quadrature() {
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double sum = 0.0;
  const double h = 1e-4;
  for (double x = -12.0; x < 13.0; x += h) {
    const double m = x + 0.5 * h;
    sum += std::fabs(std::exp(-0.5 * m * m) - std::exp(-0.5 * (m - 1) * (m - 1)));
  }
  return 0.5 * inv * sum * h;
}

TEST(TvEstimate, IdenticalSamplesGiveZero) {
  const auto a = normals(1, 5000);
  EXPECT_EQ(tv_estimate(a, a, 1), 0.0);
}

TEST(TvEstimate, DisjointSupportsGiveOne) {
  const std::vector<double> a = {0.0, 0.1, 0.2, 0.3}, b = {10.0, 10.1, 10.2};
  EXPECT_EQ(tv_estimate(a, b, 1, 10), 1.0);
}

TEST(TvEstimate, ShiftedGaussiansMatchQuadrature) {
  const double oracle = tv_quadrature();
  EXPECT_NEAR(oracle, 2.0 * 0.5 * std::erfc(-0.5 / std::sqrt(2.0)) - 1.0, 1e-6);
  const auto a = normals(2, 100000), b = normals(3, 100000, 1.0);
  EXPECT_NEAR(tv_estimate(a, b, 1, 100), oracle, 0.02);
}

TEST(TvEstimate, SymmetricAndBounded) {
  const auto a = normals(4, 3000), b = normals(5, 2000, 0.3);
  const double ab = tv_estimate(a, b, 1), ba = tv_estimate(b, a, 1);
  EXPECT_EQ(ab, ba);
  EXPECT_GE(ab, 0.0);
  EXPECT_LE(ab, 1.0);
}

TEST(TvEstimate, TwoDimensionalRows) {
  auto a = normals(6, 20000), b = normals(7, 20000);
  EXPECT_LT(tv_estimate(a, b, 2), 0.1);
  for (std::size_t i = 1; i < b.size(); i += 2) b[i] += 50.0;
  EXPECT_GT(tv_estimate(a, b, 2), 0.99);
}

TEST(TvEstimate, InvalidInput) {
  const std::vector<double> a = {1.0, 2.0, 3.0}, empty;
  EXPECT_THROW(tv_estimate(a, empty, 1), InvalidArgument);
  EXPECT_THROW(tv_estimate(a, a, 2), InvalidArgument);
  EXPECT_THROW(tv_estimate(a, a, 0), InvalidArgument);
}

TEST(TvScan, RepeatedCheckpointHasZeroEntry) {
  const std::uint64_t cps[] = {5, 5, 40};
  const auto rep = tv_cauchy_scan(lin_1d(), 1.0 / 32.0, cps, 2000, 1, 2);
  EXPECT_EQ(rep.at(0, 1), 0.0);
  EXPECT_EQ(rep.at(2, 2), 0.0);
  EXPECT_EQ(rep.at(0, 2), rep.at(2, 0));
  EXPECT_GT(rep.at(0, 2), 0.0);
}

TEST(TvScan, ControlIsSmallAndLateDistancesShrink) {
  const std::uint64_t cps[] = {10, 100, 1000, 2000};
  const auto rep = tv_cauchy_scan(lin_1d(), 1.0 / 32.0, cps, 4000, 3, 2);
  EXPECT_LT(rep.control_tv, 0.08);
  EXPECT_LT(rep.successive.back(), rep.successive.front());
  EXPECT_TRUE(rep.pass);
}

TEST(TvScan, UnsortedCheckpointsRejected) {
  const std::uint64_t cps[] = {100, 10};
  EXPECT_THROW(tv_cauchy_scan(lin_1d(), 1.0 / 32.0, cps, 100, 1), InvalidArgument);
}

TEST(AlphaEstimate, IndependentPairsNearZero) {
  const auto a = normals(8, 5000), b = normals(9, 5000);
  const auto est = alpha_estimate(a, b);
  EXPECT_LE(est.alpha, 3.0 * est.stderr_ + 0.01);
  EXPECT_GT(est.stderr_, 0.0);
}

TEST(AlphaEstimate, PersistentBinaryChainGivesQuarter) {
  std::vector<double> w(4000);
  CounterStream rng(10, 0, 0, StreamTag::kAux);
  for (double& v : w) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
  const double grid[] = {0.25};  // threshold lands on 0
  const auto est = alpha_estimate(w, w, grid);
  // Brute-force covariance of the indicator {W <= 0} with itself.
  double p = 0.0;
  for (double v : w) p += v <= 0.0;
  p /= static_cast<double>(w.size());
  EXPECT_NEAR(est.alpha, p * (1 - p), 1e-12);
  EXPECT_NEAR(est.alpha, 0.25, 0.01);
}

TEST(AlphaEstimate, NeverAboveQuarter) {
  const auto a = normals(11, 3000);
  auto b = a;
  for (double& v : b) v = -v;
  const auto est = alpha_estimate(a, b);
  EXPECT_LE(est.alpha, 0.25 + est.stderr_);
  EXPECT_GT(est.alpha, 0.2);
}

TEST(AlphaEstimate, SmallEnsembleRejected) {
  const auto a = normals(12, 999);
  EXPECT_THROW(alpha_estimate(a, a), InvalidArgument);
}

TEST(Mixing, LagZeroIsVacuousAndOverrideRegimePasses) {
  BundleOptions o;
  o.k_override = 0.1;
  o.unsafe_eta = true;
  const auto b = derive_constants(micro_1d(), 0.5, 0.1, 0.0, o);
  const std::uint64_t lags[] = {0, 100, 1000};
  const auto rep = mixing_vs_coupling(micro_1d(), b, lags, 1000, 4, 200, 2);
  EXPECT_EQ(rep.coupling_bound[0], 2.0);
  EXPECT_GT(rep.alpha_hat[0], 0.2);  // same variable at both ends
  EXPECT_LE(rep.alpha_hat[0], 0.25 + 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.monotone);
  EXPECT_LT(rep.coupling_bound[2], rep.coupling_bound[0]);
  EXPECT_FALSE(rep.event_family.empty());
}

TEST(Observables, Registry) {
  const double x[2] = {3.0, 4.0}, g[2] = {7.0, 8.0};
  EXPECT_EQ(lookup_observable("const:2.5").fn(x, g), 2.5);
  EXPECT_EQ(lookup_observable("coord:1").fn(x, g), 4.0);
  EXPECT_EQ(lookup_observable("coord:3").fn(x, g), 8.0);
  EXPECT_EQ(lookup_observable("norm").fn(x, g), 5.0);
  EXPECT_EQ(lookup_observable("capped_sq:10").fn(x, g), 10.0);
  EXPECT_EQ(lookup_observable("capped_sq:100").fn(x, g), 25.0);
  EXPECT_EQ(lookup_observable("smooth_step:3:1").fn(x, g), 0.5);
  EXPECT_EQ(lookup_observable("capped_sq:10").growth, 10.0);
  for (const char* bad : {"", "cube", "const", "const:x", "coord:-1", "coord:1.5",
                          "capped_sq:0", "smooth_step:1", "smooth_step:0:0"})
    EXPECT_THROW(lookup_observable(bad), InvalidArgument) << bad;
}

TEST(Lln, ConstantObservableIsExact) {
  const auto rep = lln_check(lin_1d(), 1.0 / 32.0, "const:1.75", 1000, 4, 1);
  for (const auto& cp : rep.checkpoints) {
    EXPECT_EQ(cp.mean, 1.75);
    EXPECT_EQ(cp.spread, 0.0);
  }
  EXPECT_EQ(rep.burned.mean, 1.75);
  EXPECT_EQ(rep.deviation, 0.0);
}

TEST(Lln, CheckpointsIncludeHalfAndFullHorizon) {
  const std::uint64_t extra[] = {100, 5000, 999999};
  const auto rep = lln_check(lin_1d(), 1.0 / 32.0, "norm", 1000, 3, 1, extra);
  std::vector<std::uint64_t> ns;
  for (const auto& cp : rep.checkpoints) ns.push_back(cp.n);
  EXPECT_EQ(ns, (std::vector<std::uint64_t>{100, 500, 1000}));
  EXPECT_EQ(rep.burn_in, 100u);
  EXPECT_EQ(rep.final_averages.size(), 3u);
  EXPECT_EQ(rep.ui_bound.size(), rep.ui_v.size());
  EXPECT_THROW(rep.at(7), InvalidArgument);
}

TEST(Lln, CoordinateAverageIsCentered) {
  // Ten independent long runs as the oracle for the centered invariant law.
  const auto rep = lln_check(lin_1d(), 1.0 / 32.0, "coord:0", 1000000, 10, 5, {}, 2);
  EXPECT_NEAR(rep.at(1000000).mean, 0.0, 0.05);
  for (double v : rep.final_averages) EXPECT_NEAR(v, 0.0, 0.05);
}

TEST(Lln, UnknownObservableRejected) {
  EXPECT_THROW(lln_check(lin_1d(), 1.0 / 32.0, "x^3", 100, 2, 1), InvalidArgument);
}

TEST(Moments, Lin1dStaysBelowBounds) {
  InitialLaw law{{0.0}, 0.0};
  const auto m = track_moments(lin_1d(), law, 1.0 / 32.0, 1000, 200, 1, 2);
  EXPECT_NEAR(m.bound_x, 256.64, 1e-12);
  EXPECT_TRUE(m.bounds_apply);
  EXPECT_TRUE(m.pass_x);
  EXPECT_TRUE(m.pass_g);
  EXPECT_EQ(m.mean_x_sq.size(), 1001u);
  for (std::size_t n = 1; n < m.running_max.size(); ++n)
    EXPECT_GE(m.running_max[n], m.running_max[n - 1]);
}

TEST(Moments, BoundGRecomputedBitwise) {
  InitialLaw law{{0.5}, 0.2};
  const auto p = lin_1d();
  const auto m = track_moments(p, law, 1.0 / 32.0, 200, 100, 2);
  for (std::size_t n = 0; n < m.bound_g.size(); ++n) {
    const double expect = 2.0 * (p.m_hat() * p.m_hat() +
                                 p.lipschitz() * p.lipschitz() * m.running_max[n]);
    EXPECT_EQ(m.bound_g[n], expect);
  }
}

TEST(Moments, NoiselessFixedPointStaysAtZero) {
  InitialLaw law{{0.0}, 0.0};
  const auto m = track_moments(lin_1d(), law, 1.0 / 32.0, 100, 100, 3, 1, 0.0);
  for (double v : m.mean_x_sq) EXPECT_EQ(v, 0.0);
}

TEST(Moments, UnsafeStepMarksBoundsNotApplicable) {
  InitialLaw law{{0.0}, 0.0};
  const auto m = track_moments(lin_1d(), law, 0.05, 50, 100, 4);
  EXPECT_FALSE(m.bounds_apply);
  EXPECT_FALSE(m.pass_x);
}

TEST(Moments, ThreadCountDoesNotChangeResults) {
  InitialLaw law{{1.0, -1.0}, 0.5};
  const auto a = track_moments(well_2d(), law, 0.003, 300, 150, 5, 1);
  const auto b = track_moments(well_2d(), law, 0.003, 300, 150, 5, 4);
  EXPECT_EQ(a.mean_x_sq, b.mean_x_sq);
  EXPECT_EQ(a.max_g_sq, b.max_g_sq);
}

TEST(Moments, Preconditions) {
  InitialLaw law{{0.0}, 0.0};
  EXPECT_THROW(track_moments(lin_1d(), law, 0.01, 10, 99, 1), InvalidArgument);
  InitialLaw wrong{{0.0, 0.0}, 0.0};
  EXPECT_THROW(track_moments(lin_1d(), wrong, 0.01, 10, 100, 1), InvalidArgument);
}

TEST(InitialLawTest, DrawIsDeterministicAndSpread) {
  InitialLaw law{{1.0, 2.0}, 0.0};
  EXPECT_EQ(law.draw(1, 5), (Vector{1.0, 2.0}));
  InitialLaw noisy{{0.0}, 2.0};
  EXPECT_EQ(noisy.draw(3, 4), noisy.draw(3, 4));
  EXPECT_NE(noisy.draw(3, 4), noisy.draw(3, 5));
  EXPECT_EQ(noisy.second_moment(), 4.0);
}

TEST(Ks, KnownStatistics) {
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_statistic({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
  EXPECT_NEAR(ks_critical_value(0.01, 2000, 2000), 1.6276 * std::sqrt(2.0 / 2000.0), 1e-4);
  EXPECT_THROW(ks_statistic({}, {1.0}), InvalidArgument);
}

}  // namespace
}  // namespace sagald
