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

#include "sagald/sampler.hpp"

#include <cmath>
#include <ostream>

#include "sagald/error.hpp"
#include "sagald/io.hpp"
#include "sagald/rng.hpp"

namespace sagald {

ChainState init_chain(const Problem& problem, std::span<const double> x0) {
  if (x0.size() != problem.dim())
    throw InvalidArgument("x0 has dimension " + std::to_string(x0.size()) +
                          ", problem has " + std::to_string(problem.dim()));
  if (!all_finite(x0)) throw InvalidArgument("x0 must be finite");
  const std::size_t d = problem.dim();
  ChainState s;
  s.x.assign(x0.begin(), x0.end());
  s.table.resize(problem.count() * d);
  for (std::size_t i = 0; i < problem.count(); ++i)
    problem.eval_into(i, x0, s.row(i, d));
  return s;
}

SagaKernel::SagaKernel(const Problem& problem, double eta)
    : problem_(&problem),
      eta_(eta),
      noise_scale_(std::sqrt(2.0 * eta)),
      update_(problem.dim()),
      component_(problem.dim()) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw InvalidArgument("step size must be positive and finite");
}

void SagaKernel::update_term_into(const ChainState& state, std::size_t s,
                                  std::span<double> out,
                                  std::span<double> component_out) const {
  const Problem& p = *problem_;
  const std::size_t d = p.dim();
  const std::size_t n = p.count();
  p.eval_into(s, state.x, component_out);
  const double inv_count = static_cast<double>(n);
  for (std::size_t k = 0; k < d; ++k) {
    CompensatedSum table_sum;
    for (std::size_t i = 0; i < n; ++i) table_sum.add(state.table[i * d + k]);
    CompensatedSum term;
    term.add(table_sum.value() / inv_count);
    term.add(component_out[k]);
    term.add(-state.table[s * d + k]);
    out[k] = eta_ * term.value();
  }
}

void SagaKernel::step(ChainState& state, std::span<const double> gauss,
                      std::size_t s) {
  const std::size_t d = problem_->dim();
  update_term_into(state, s, update_, component_);
  const double pre_norm = norm(state.x);
  for (std::size_t k = 0; k < d; ++k)
    state.x[k] = state.x[k] - update_[k] + noise_scale_ * gauss[k];
  if (!all_finite(state.x)) throw NumericOverflow(state.step, pre_norm);
  auto row = state.row(s, d);
  for (std::size_t k = 0; k < d; ++k) row[k] = component_[k];
  ++state.step;
}

namespace {

void check_state(const Problem& problem, const ChainState& state) {
  if (state.x.size() != problem.dim() ||
      state.table.size() != problem.dim() * problem.count())
    throw InvalidArgument("chain state shape does not match the problem");
}

void check_index(const Problem& problem, std::size_t index) {
  if (index >= problem.count())
    throw InvalidArgument("component index " + std::to_string(index) +
                          " out of range");
}

}  // namespace

Vector update_term(const Problem& problem, const ChainState& state,
                   std::size_t index, double eta) {
  check_state(problem, state);
  check_index(problem, index);
  SagaKernel kernel(problem, eta);
  Vector out(problem.dim()), comp(problem.dim());
  kernel.update_term_into(state, index, out, comp);
  return out;
}

ChainState saga_step(const Problem& problem, const ChainState& state,
                     const TransitionInput& input, double eta) {
  check_state(problem, state);
  check_index(problem, input.index);
  if (input.gauss.size() != problem.dim())
    throw InvalidArgument("gaussian draw has wrong dimension");
  SagaKernel kernel(problem, eta);
  ChainState next = state;
  kernel.step(next, input.gauss, input.index);
  return next;
}

Vector sgld_step(const Problem& problem, std::span<const double> x,
                 const TransitionInput& input, double eta) {
  check_index(problem, input.index);
  if (x.size() != problem.dim() || input.gauss.size() != problem.dim())
    throw InvalidArgument("dimension mismatch in sgld_step");
  if (!(eta > 0.0)) throw InvalidArgument("step size must be positive");
  Vector f(problem.dim());
  problem.eval_into(input.index, x, f);
  const double scale = std::sqrt(2.0 * eta);
  Vector next(problem.dim());
  for (std::size_t k = 0; k < next.size(); ++k)
    next[k] = x[k] - eta * f[k] + scale * input.gauss[k];
  if (!all_finite(next)) throw NumericOverflow(0, norm(x));
  return next;
}

double eta_max(const Problem& problem) {
  const double m = problem.lipschitz();
  return problem.c2() / (8.0 * m * m);
}

void draw_transition_into(std::size_t count, std::uint64_t key,
                          std::uint64_t step, std::span<double> gauss,
                          std::size_t& index) {
  CounterStream rng(SubstreamKey{key, step, StreamTag::kDirect});
  index = rng.index(count);
  rng.fill_normal(gauss);
}

TransitionInput draw_transition(const Problem& problem, std::uint64_t seed,
                                std::uint64_t replication, std::uint64_t step) {
  TransitionInput in;
  in.gauss.resize(problem.dim());
  draw_transition_into(problem.count(), replication_key(seed, replication), step,
                       in.gauss, in.index);
  return in;
}

Trajectory run_chain(const Problem& problem, std::span<const double> x0,
                     const RunOptions& options) {
  if (options.steps == 0) throw ConfigError("steps must be >= 1");
  if (!(options.eta > 0.0)) throw ConfigError("eta must be > 0");
  if (options.eta > eta_max(problem) && !options.unsafe_eta)
    throw ConfigError("eta = " + format_double(options.eta) +
                      " exceeds eta_max = " + format_double(eta_max(problem)) +
                      "; pass the unsafe flag to run anyway");
  std::uint64_t stride = options.stride;
  if (stride == 0) {
    if (options.steps > kMaxDefaultStrideSteps)
      throw ConfigError("runs longer than 1e6 steps need an explicit stride");
    stride = 1;
  }

  const std::size_t d = problem.dim();
  Trajectory traj;
  traj.dim = d;
  traj.count = problem.count();
  traj.steps.reserve(options.steps / stride + 1);
  traj.values.reserve((options.steps / stride + 1) * traj.width());

  auto record = [&traj](const ChainState& s) {
    traj.steps.push_back(s.step);
    traj.values.insert(traj.values.end(), s.x.begin(), s.x.end());
    traj.values.insert(traj.values.end(), s.table.begin(), s.table.end());
  };

  ChainState state = init_chain(problem, x0);
  SagaKernel kernel(problem, options.eta);
  const std::uint64_t key = replication_key(options.seed, options.replication);
  Vector gauss(d);
  std::size_t index = 0;
  record(state);
  for (std::uint64_t n = 0; n < options.steps; ++n) {
    draw_transition_into(problem.count(), key, n, gauss, index);
    if (options.noise_scale != 1.0)
      for (double& g : gauss) g *= options.noise_scale;
    kernel.step(state, gauss, index);
    if (state.step % stride == 0) record(state);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "step";
  for (std::size_t k = 0; k < traj.dim; ++k) os << ",x_" << k;
  for (std::size_t i = 0; i < traj.count; ++i)
    for (std::size_t k = 0; k < traj.dim; ++k) os << ",g_" << (i + 1) << '_' << k;
  os << '\n';
  for (std::size_t r = 0; r < traj.size(); ++r) {
    os << traj.steps[r];
    for (double v : traj.snapshot(r)) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
  for (std::size_t r = 0; r < traj.size(); ++r) {
    write_le_double(os, static_cast<double>(traj.steps[r]));
    for (double v : traj.snapshot(r)) write_le_double(os, v);
  }
}

}  // namespace sagald
