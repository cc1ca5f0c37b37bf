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

#include <nlohmann/json.hpp>

#include "sagald/linalg.hpp"
#include "sagald/model.hpp"
#include "sagald/rng.hpp"
#include "sagald/sampler.hpp"

namespace sagald {

/// Derived constants of the random-map representation. beta is kept in log
/// space: at unmodified K(eps) it is far below the smallest double.
struct ConstantsBundle {
  double eps = 0.0;
  double eta = 0.0;
  double e_x0_sq = 0.0;
  double c_check = 0.0;  // sup_n E[|X_n|^2 + sum_i |G^i_n|^2] bound
  double c_hat = 0.0;
  double k_eps = 0.0;          // K(eps) = sqrt((2N+2) c_hat / eps)
  double good_x_radius = 0.0;  // K actually used (k_eps unless overridden)
  double good_g_radius = 0.0;  // m_hat + M K
  double regen_radius = 1.0;   // min(1, K)
  double mean_radius = 0.0;    // bound on |transition mean| over the good set
  double log_beta = 0.0;
  bool k_overridden = false;
  bool beta_overridden = false;
  bool moment_bounds_in_force = true;  // false when eta > eta_max
};

struct BundleOptions {
  std::optional<double> k_override;
  std::optional<double> log_beta_override;
  bool unsafe_eta = false;
};

/// Throws ConfigError unless 0 < eps < 1/3, eta > 0, and eta <= eta_max (the
/// last one is waived by unsafe_eta).
ConstantsBundle derive_constants(const Problem& problem, double eta, double eps,
                                 double e_x0_sq, const BundleOptions& options = {});

/// Radius bounding the one-step transition mean over the good set:
/// max(3 m_hat + 4 M K, K + 3 eta (m_hat + M K)). The first term is exact for
/// eta <= 1; the second keeps the bound valid for larger steps.
double transition_mean_radius(double eta, double k, double m_hat, double lipschitz);

/// ln beta, beta = v(d) r^d (4 pi eta)^(-d/2) exp(-(R + r)^2 / (4 eta)) with R
/// from transition_mean_radius and r the regeneration radius.
double beta_for(std::size_t dim, double eta, double k, double m_hat,
                double lipschitz, double regen_radius = 1.0);

nlohmann::json to_json(const ConstantsBundle& bundle);

/// Shared randomness of one map transition. Record n drives the transition
/// from step n to n+1.
struct NoiseRecord {
  Vector gauss;        // fallback-branch increment
  std::size_t index = 0;
  double selector = 0.0;  // uniform on (0,1); regenerate iff selector <= beta
  Vector regen_point;     // uniform on the closed unit ball
  SubstreamKey residual_key;
};

NoiseRecord draw_noise_record(std::size_t dim, std::size_t count,
                              std::uint64_t key, std::uint64_t step);
void fill_noise_record(NoiseRecord& rec, std::size_t dim, std::size_t count,
                       std::uint64_t key, std::uint64_t step);

inline bool regenerates(const NoiseRecord& rec, double log_beta) {
  return std::log(rec.selector) <= log_beta;
}

/// Mean of the one-step Gaussian transition law: x - update_term(x, g, s).
Vector transition_mean(const Problem& problem, const ChainState& state,
                       std::size_t index, double eta);

/// log density of N(mean, 2 eta I) at u.
double log_transition_density(std::span<const double> u,
                              std::span<const double> mean, double eta);

/// log density of the uniform law on the ball of radius r (-inf outside).
double log_regen_density(std::span<const double> u, double regen_radius);

/// True iff |x| <= K and every table row lies in B(m_hat + M K).
bool in_good_set(const ChainState& state, std::size_t dim,
                 const ConstantsBundle& bundle);

/// True iff x and every table row lie in B(K).
bool in_block_set(const ChainState& state, std::size_t dim, double k);

/// Draw from (q - beta nu) / (1 - beta) by rejection from q. Proposals after
/// the first, and all acceptance uniforms, come from the key's substream; the
/// first proposal uses first_gauss when given. Throws InvalidArgument if
/// beta exceeds the minorization bound at this state.
Vector residual_sample(const Problem& problem, const ChainState& state,
                       std::size_t index, double eta, double log_beta,
                       double regen_radius, const SubstreamKey& key,
                       std::span<const double> first_gauss = {});

/// One application of the random map f. Pure.
ChainState map_step(const Problem& problem, const ChainState& state,
                    const NoiseRecord& noise, double eta,
                    const ConstantsBundle& bundle);

/// In-place map stepping with reusable buffers.
class MapKernel {
 public:
  MapKernel(const Problem& problem, const ConstantsBundle& bundle);

  const ConstantsBundle& bundle() const { return *bundle_; }

  /// Applies the map; returns true iff the regeneration branch fired.
  bool step(ChainState& state, const NoiseRecord& noise);

 private:
  Vector residual(const ChainState& state, std::size_t index,
                  std::span<const double> mean, const NoiseRecord& noise) const;

  SagaKernel saga_;
  const ConstantsBundle* bundle_;
  double log_ball_density_;  // log nu inside B(r)
  double log_norm_;          // -(d/2) ln(4 pi eta)
  Vector update_;
  Vector component_;
  Vector mean_;
};

/// Z_{m,n}: the state at time n when the map chain is started from `state` at
/// time m, using the noise records of (key, step) for steps m..n-1.
ChainState iterate_z(const Problem& problem, std::uint64_t m, std::uint64_t n,
                     const ChainState& state, std::uint64_t key,
                     const ConstantsBundle& bundle);

struct MinorizationReport {
  double min_log_ratio = 0.0;    // over sampled (state, u)
  double min_density_ratio = 0.0;
  double worst_case_ratio = 0.0;  // at |u - m| = R + r
  double center_log_ratio = 0.0;  // at u = m
  std::size_t trials = 0;
  bool pass = false;
};

MinorizationReport verify_minorization(const Problem& problem,
                                       const ConstantsBundle& bundle,
                                       std::size_t trials, std::uint64_t seed);

}  // namespace sagald
