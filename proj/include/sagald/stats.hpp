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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sagald/linalg.hpp"
#include "sagald/model.hpp"
#include "sagald/randommap.hpp"
#include "sagald/sampler.hpp"

namespace sagald {

/// Law of X_0: a point mass, or an isotropic Gaussian around `mean`.
struct InitialLaw {
  Vector mean;
  double stddev = 0.0;

  double second_moment() const {
    return norm_sq(mean) + static_cast<double>(mean.size()) * stddev * stddev;
  }
  Vector draw(std::uint64_t seed, std::uint64_t replication) const;
};

struct MomentSeries {
  std::vector<double> mean_x_sq;    // empirical E|X_n|^2, n = 0..steps
  std::vector<double> max_g_sq;     // max_i empirical E|G^i_n|^2
  std::vector<double> running_max;  // L_n = max_{l<=n} mean_x_sq[l]
  std::vector<double> bound_g;      // 2 [m_hat^2 + M^2 L_n]
  double bound_x = 0.0;             // 2 (2d + c1 + 2 m_hat^2 + E|X0|^2) / (c2 eta)
  std::size_t replications = 0;
  bool bounds_apply = true;  // false when eta > eta_max
  bool pass_x = false;
  bool pass_g = false;
};

/// Tracks second moments of the direct chain over replications. With
/// eta > eta_max the series is still produced but the bounds are marked as
/// not applicable.
MomentSeries track_moments(const Problem& problem, const InitialLaw& x0_law,
                           double eta, std::uint64_t steps,
                           std::size_t replications, std::uint64_t seed,
                           unsigned threads = 1, double noise_scale = 1.0);

/// Half L1 distance between histogram densities on a shared equal-width grid
/// over the pooled range. Samples are rows of `dim` values. bins == 0 picks
/// ceil(n^(1/3)) per axis, capped at 256, with n the smaller sample count.
double tv_estimate(std::span<const double> samples_a,
                   std::span<const double> samples_b, std::size_t dim,
                   std::size_t bins = 0);

struct TvScanReport {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> matrix;      // row-major, checkpoints x checkpoints
  std::vector<double> successive;  // TV(c_i, c_{i+1})
  double control_tv = 0.0;         // same checkpoint, independent ensemble
  bool pass = false;

  double at(std::size_t i, std::size_t j) const {
    return matrix[i * checkpoints.size() + j];
  }
};

/// TV between the X_n marginals at every pair of checkpoints. Passes when the
/// successive distances shrink (up to twice the same-law control) and the
/// last one is below the first.
TvScanReport tv_cauchy_scan(const Problem& problem, double eta,
                            std::span<const std::uint64_t> checkpoints,
                            std::size_t replications, std::uint64_t seed,
                            unsigned threads = 1);

struct AlphaEstimate {
  double alpha = 0.0;
  double stderr_ = 0.0;
  double threshold_a = 0.0;
  double threshold_b = 0.0;
};

inline constexpr std::size_t kMinAlphaEnsemble = 1000;

/// Max over threshold pairs (a, b) of |P(A and B) - P(A) P(B)| for
/// A = {v_j <= a}, B = {v_{j+lag} <= b}; thresholds are empirical quantiles
/// at `quantiles`. A lower bound on the strong-mixing coefficient.
AlphaEstimate alpha_estimate(std::span<const double> at_j,
                             std::span<const double> at_lag,
                             std::span<const double> quantiles = {});

struct MixingReport {
  std::uint64_t j = 0;
  std::vector<std::uint64_t> lags;
  std::vector<double> alpha_hat;
  std::vector<double> alpha_stderr;
  std::vector<double> coupling_bound;  // 2 (1 - P(meet within lag))
  std::vector<double> bound_stderr;
  std::vector<bool> pass_lag;
  std::string event_family;
  bool pass = false;
  bool monotone = false;
};

/// Compares alpha_hat at each lag with twice the probability that the map
/// chain, observed from step j, has not met a copy restarted at step j from
/// the anchor (x = 0, g^i = F_i(0)) on the same noise.
MixingReport mixing_vs_coupling(const Problem& problem,
                                const ConstantsBundle& bundle,
                                std::span<const std::uint64_t> lags,
                                std::size_t replications, std::uint64_t seed,
                                std::uint64_t j = 1000, unsigned threads = 1);

/// A registered observable phi(x, g) with |phi(u)| <= C (1 + |u|).
struct Observable {
  std::string name;
  double growth = 0.0;
  std::function<double(std::span<const double> x, std::span<const double> table)> fn;
};

/// Names: "const:<c>", "coord:<k>" (index into (x, table)), "norm" (|x|),
/// "capped_sq:<cap>" (min(|x|^2, cap)), "smooth_step:<a>:<w>"
/// (logistic((x_0 - a)/w)). Throws InvalidArgument for anything else.
Observable lookup_observable(std::string_view spec);

struct LlnCheckpoint {
  std::uint64_t n = 0;
  double mean = 0.0;    // cross-replication mean of the ergodic average
  double spread = 0.0;  // cross-replication standard deviation
  double stderr_ = 0.0;
  double mad = 0.0;     // mean absolute deviation from the cross-rep mean
  double mad_stderr = 0.0;
};

struct LlnReport {
  std::string observable;
  double growth = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t burn_in = 0;
  std::vector<LlnCheckpoint> checkpoints;  // includes horizon/2 and horizon
  LlnCheckpoint burned;                    // average over (burn_in, horizon]
  std::vector<double> final_averages;      // per replication at the horizon
  double c_w = 0.0;  // max cross-rep variance of phi over checkpoint steps
  std::vector<double> ui_v;
  std::vector<double> ui_bound;  // c_w / V
  double deviation = 0.0;        // |mean(horizon) - mean(horizon/2)|

  const LlnCheckpoint& at(std::uint64_t n) const;
};

LlnReport lln_check(const Problem& problem, double eta,
                    std::string_view observable, std::uint64_t horizon,
                    std::size_t replications, std::uint64_t seed,
                    std::span<const std::uint64_t> extra_checkpoints = {},
                    unsigned threads = 1, double burn_in_fraction = 0.1);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical value c(alpha) sqrt((n + m) / (n m)).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

}  // namespace sagald
