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

#include "sagald/randommap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sagald/error.hpp"

namespace sagald {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_norm_const(std::size_t dim, double eta) {
  return -0.5 * static_cast<double>(dim) * std::log(4.0 * M_PI * eta);
}

double log_ball_density(std::size_t dim, double r) {
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  return -(log_unit_ball_volume(dim) + static_cast<double>(dim) * std::log(r));
}

}  // namespace

double transition_mean_radius(double eta, double k, double m_hat,
                              double lipschitz) {
  const double row = m_hat + lipschitz * k;
  return std::max(3.0 * m_hat + 4.0 * lipschitz * k, k + 3.0 * eta * row);
}

double beta_for(std::size_t dim, double eta, double k, double m_hat,
                double lipschitz, double regen_radius) {
  if (!(regen_radius > 0.0)) return kNegInf;
  const double reach = transition_mean_radius(eta, k, m_hat, lipschitz) + regen_radius;
  return log_unit_ball_volume(dim) +
         static_cast<double>(dim) * std::log(regen_radius) +
         log_norm_const(dim, eta) - reach * reach / (4.0 * eta);
}

ConstantsBundle derive_constants(const Problem& problem, double eta, double eps,
                                 double e_x0_sq, const BundleOptions& options) {
  if (!(eps > 0.0 && eps < 1.0 / 3.0))
    throw ConfigError("eps must lie in (0, 1/3), got " + std::to_string(eps));
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  if (!(e_x0_sq >= 0.0)) throw ConfigError("E|X0|^2 must be >= 0");
  const bool over_cap = eta > eta_max(problem);
  if (over_cap && !options.unsafe_eta)
    throw ConfigError("eta exceeds eta_max = " + std::to_string(eta_max(problem)));
  if (options.k_override && !(*options.k_override >= 0.0))
    throw ConfigError("K override must be >= 0");

  const double d = static_cast<double>(problem.dim());
  const double n = static_cast<double>(problem.count());
  const double mh = problem.m_hat();
  const double m = problem.lipschitz();
  const double lead = 2.0 * (n + 1.0) * (mh * mh + m * m);
  const double denom = problem.c2() * eta;

  ConstantsBundle b;
  b.eps = eps;
  b.eta = eta;
  b.e_x0_sq = e_x0_sq;
  b.c_check = lead * 2.0 * (2.0 * d + problem.c1() + 2.0 * mh * mh + e_x0_sq) / denom;
  b.c_hat = lead * 2.0 * (2.0 * d + problem.c1() + 2.0 * mh * mh + b.c_check) / denom;
  b.k_eps = std::sqrt((2.0 * n + 2.0) * b.c_hat / eps);
  b.k_overridden = options.k_override.has_value();
  b.good_x_radius = options.k_override.value_or(b.k_eps);
  b.good_g_radius = mh + m * b.good_x_radius;
  b.regen_radius = std::min(1.0, b.good_x_radius);
  b.mean_radius = transition_mean_radius(eta, b.good_x_radius, mh, m);
  b.log_beta = beta_for(problem.dim(), eta, b.good_x_radius, mh, m, b.regen_radius);
  if (options.log_beta_override) {
    b.log_beta = *options.log_beta_override;
    b.beta_overridden = true;
  }
  b.moment_bounds_in_force = !over_cap;
  return b;
}

nlohmann::json to_json(const ConstantsBundle& b) {
  return {{"eps", b.eps},
          {"eta", b.eta},
          {"c_check", b.c_check},
          {"c_hat", b.c_hat},
          {"K", b.good_x_radius},
          {"K_eps", b.k_eps},
          {"log_beta", b.log_beta},
          {"good_x_radius", b.good_x_radius},
          {"good_g_radius", b.good_g_radius},
          {"regen_radius", b.regen_radius},
          {"e_x0_sq", b.e_x0_sq},
          {"k_overridden", b.k_overridden},
          {"beta_overridden", b.beta_overridden},
          {"moment_bounds_in_force", b.moment_bounds_in_force}};
}

void fill_noise_record(NoiseRecord& rec, std::size_t dim, std::size_t count,
                       std::uint64_t key, std::uint64_t step) {
  CounterStream rng(SubstreamKey{key, step, StreamTag::kMapRecord});
  rec.index = rng.index(count);
  rec.selector = rng.uniform();
  rec.gauss.resize(dim);
  rng.fill_normal(rec.gauss);
  rec.regen_point.resize(dim);
  rng.fill_unit_ball(rec.regen_point);
  rec.residual_key = SubstreamKey{key, step, StreamTag::kResidual};
}

NoiseRecord draw_noise_record(std::size_t dim, std::size_t count,
                              std::uint64_t key, std::uint64_t step) {
  NoiseRecord rec;
  fill_noise_record(rec, dim, count, key, step);
  return rec;
}

Vector transition_mean(const Problem& problem, const ChainState& state,
                       std::size_t index, double eta) {
  Vector mean = update_term(problem, state, index, eta);
  for (std::size_t k = 0; k < mean.size(); ++k) mean[k] = state.x[k] - mean[k];
  return mean;
}

double log_transition_density(std::span<const double> u,
                              std::span<const double> mean, double eta) {
  double dist_sq = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double diff = u[k] - mean[k];
    dist_sq += diff * diff;
  }
  return log_norm_const(u.size(), eta) - dist_sq / (4.0 * eta);
}

double log_regen_density(std::span<const double> u, double regen_radius) {
  if (!(regen_radius > 0.0) || norm(u) > regen_radius) return kNegInf;
  return log_ball_density(u.size(), regen_radius);
}

bool in_good_set(const ChainState& state, std::size_t dim,
                 const ConstantsBundle& bundle) {
  if (norm(state.x) > bundle.good_x_radius) return false;
  const std::size_t n = state.table.size() / dim;
  for (std::size_t i = 0; i < n; ++i)
    if (norm(state.row(i, dim)) > bundle.good_g_radius) return false;
  return true;
}

bool in_block_set(const ChainState& state, std::size_t dim, double k) {
  if (norm(state.x) > k) return false;
  const std::size_t n = state.table.size() / dim;
  for (std::size_t i = 0; i < n; ++i)
    if (norm(state.row(i, dim)) > k) return false;
  return true;
}

namespace {

// Shared by the free function and MapKernel.
Vector residual_from_mean(std::span<const double> mean, double eta,
                          double log_beta, double regen_radius,
                          const SubstreamKey& key,
                          std::span<const double> first_gauss) {
  const std::size_t d = mean.size();
  const double scale = std::sqrt(2.0 * eta);
  const double log_nu = log_ball_density(d, regen_radius);
  const double log_norm = log_norm_const(d, eta);

  // q is smallest over B(r) at distance |m| + r from the mean; the residual
  // is a nonnegative measure iff q there still dominates beta * nu.
  if (log_beta > kNegInf && regen_radius > 0.0) {
    const double reach = norm(mean) + regen_radius;
    const double slack =
        (log_norm - reach * reach / (4.0 * eta)) - (log_beta + log_nu);
    if (slack < -1e-9 * std::max(1.0, std::fabs(log_beta)))
      throw InvalidArgument(
          "beta exceeds the minorization bound at this state (log slack " +
          std::to_string(slack) + ")");
  }

  CounterStream rng(key);
  Vector y(d);
  for (bool first = true;; first = false) {
    if (first && first_gauss.size() == d) {
      for (std::size_t k = 0; k < d; ++k) y[k] = mean[k] + scale * first_gauss[k];
    } else {
      for (std::size_t k = 0; k < d; ++k) y[k] = mean[k] + scale * rng.normal();
    }
    const double log_w = std::log(rng.uniform());
    if (log_beta == kNegInf || norm(y) > regen_radius) return y;
    if (log_w + log_transition_density(y, mean, eta) >= log_beta + log_nu) return y;
  }
}

}  // namespace

Vector residual_sample(const Problem& problem, const ChainState& state,
                       std::size_t index, double eta, double log_beta,
                       double regen_radius, const SubstreamKey& key,
                       std::span<const double> first_gauss) {
  const Vector mean = transition_mean(problem, state, index, eta);
  return residual_from_mean(mean, eta, log_beta, regen_radius, key, first_gauss);
}

MapKernel::MapKernel(const Problem& problem, const ConstantsBundle& bundle)
    : saga_(problem, bundle.eta),
      bundle_(&bundle),
      log_ball_density_(log_ball_density(problem.dim(), bundle.regen_radius)),
      log_norm_(log_norm_const(problem.dim(), bundle.eta)),
      update_(problem.dim()),
      component_(problem.dim()),
      mean_(problem.dim()) {}

Vector MapKernel::residual(const ChainState&, std::size_t,
                           std::span<const double> mean,
                           const NoiseRecord& noise) const {
  return residual_from_mean(mean, bundle_->eta, bundle_->log_beta,
                            bundle_->regen_radius, noise.residual_key, noise.gauss);
}

bool MapKernel::step(ChainState& state, const NoiseRecord& noise) {
  const Problem& p = saga_.problem();
  const std::size_t d = p.dim();
  const std::size_t s = noise.index;
  const bool good = in_good_set(state, d, *bundle_);
  bool regenerated = false;

  saga_.update_term_into(state, s, update_, component_);
  for (std::size_t k = 0; k < d; ++k) mean_[k] = state.x[k] - update_[k];

  if (good && regenerates(noise, bundle_->log_beta)) {
    for (std::size_t k = 0; k < d; ++k)
      state.x[k] = bundle_->regen_radius * noise.regen_point[k];
    regenerated = true;
  } else if (good) {
    const Vector y = residual(state, s, mean_, noise);
    std::copy(y.begin(), y.end(), state.x.begin());
  } else {
    const double pre_norm = norm(state.x);
    const double scale = saga_.noise_scale();
    for (std::size_t k = 0; k < d; ++k) state.x[k] = mean_[k] + scale * noise.gauss[k];
    if (!all_finite(state.x)) throw NumericOverflow(state.step, pre_norm);
  }
  auto row = state.row(s, d);
  std::copy(component_.begin(), component_.end(), row.begin());
  ++state.step;
  return regenerated;
}

ChainState map_step(const Problem& problem, const ChainState& state,
                    const NoiseRecord& noise, double eta,
                    const ConstantsBundle& bundle) {
  if (noise.index >= problem.count() || noise.gauss.size() != problem.dim() ||
      noise.regen_point.size() != problem.dim())
    throw InvalidArgument("noise record does not match the problem");
  if (eta != bundle.eta)
    throw InvalidArgument("bundle was derived for a different step size");
  MapKernel kernel(problem, bundle);
  ChainState next = state;
  kernel.step(next, noise);
  return next;
}

ChainState iterate_z(const Problem& problem, std::uint64_t m, std::uint64_t n,
                     const ChainState& state, std::uint64_t key,
                     const ConstantsBundle& bundle) {
  ChainState z = state;
  z.step = m;
  if (n <= m) return z;
  MapKernel kernel(problem, bundle);
  NoiseRecord rec;
  for (std::uint64_t t = m; t < n; ++t) {
    fill_noise_record(rec, problem.dim(), problem.count(), key, t);
    kernel.step(z, rec);
  }
  return z;
}

MinorizationReport verify_minorization(const Problem& problem,
                                       const ConstantsBundle& bundle,
                                       std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  if (!(bundle.regen_radius > 0.0))
    throw InvalidArgument("regeneration ball is empty (K = 0)");
  const std::size_t d = problem.dim();
  const double r = bundle.regen_radius;
  const double log_nu = log_ball_density(d, r);
  const double log_norm = log_norm_const(d, bundle.eta);
  const double reach = bundle.mean_radius + r;

  MinorizationReport rep;
  rep.trials = trials;
  // Analytic extremes: farthest point of B(r) from a mean on the boundary of
  // B(R), and the mean itself.
  const double worst_log =
      (log_norm - reach * reach / (4.0 * bundle.eta)) - (bundle.log_beta + log_nu);
  rep.worst_case_ratio = std::exp(worst_log);
  rep.center_log_ratio = log_norm - (bundle.log_beta + log_nu);

  rep.min_log_ratio = std::numeric_limits<double>::infinity();
  ChainState st;
  st.x.resize(d);
  st.table.resize(problem.count() * d);
  Vector u(d);
  for (std::size_t t = 0; t < trials; ++t) {
    CounterStream rng(seed, t, 0, StreamTag::kAux);
    rng.fill_unit_ball(st.x);
    for (double& v : st.x) v *= bundle.good_x_radius;
    for (std::size_t i = 0; i < problem.count(); ++i) {
      auto row = st.row(i, d);
      rng.fill_unit_ball(row);
      for (double& v : row) v *= bundle.good_g_radius;
    }
    const std::size_t s = rng.index(problem.count());
    rng.fill_unit_ball(u);
    for (double& v : u) v *= r;
    const Vector mean = transition_mean(problem, st, s, bundle.eta);
    const double lr = log_transition_density(u, mean, bundle.eta) -
                      (bundle.log_beta + log_regen_density(u, r));
    rep.min_log_ratio = std::min(rep.min_log_ratio, lr);
  }
  rep.min_density_ratio = std::exp(rep.min_log_ratio);
  constexpr double kUlp = std::numeric_limits<double>::epsilon();
  rep.pass = rep.min_log_ratio >= 0.0 && rep.worst_case_ratio >= 1.0 - 4.0 * kUlp;
  return rep;
}

}  // namespace sagald
