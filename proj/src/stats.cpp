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

#include "sagald/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "sagald/error.hpp"
#include "sagald/parallel.hpp"
#include "sagald/rng.hpp"

namespace sagald {
namespace {

// Replications are reduced in fixed-size chunks so floating sums do not
// depend on the number of worker threads.
constexpr std::size_t kChunk = 16;

std::size_t chunk_count(std::size_t reps) { return (reps + kChunk - 1) / kChunk; }

// Key salt for same-law control ensembles.
constexpr std::uint64_t kControlSalt = 0xC0FFEE1234ABCDEFull;

double parse_double(std::string_view text, std::string_view spec) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
    throw InvalidArgument("bad numeric parameter in observable '" +
                          std::string(spec) + "'");
  return v;
}

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(':', start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct MeanSpread {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSpread mean_spread(std::span<const double> v) {
  MeanSpread out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  const auto idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

Vector InitialLaw::draw(std::uint64_t seed, std::uint64_t replication) const {
  Vector x = mean;
  if (stddev > 0.0) {
    CounterStream rng(seed, replication, 0, StreamTag::kInit);
    for (double& v : x) v += stddev * rng.normal();
  }
  return x;
}

MomentSeries track_moments(const Problem& problem, const InitialLaw& x0_law,
                           double eta, std::uint64_t steps,
                           std::size_t replications, std::uint64_t seed,
                           unsigned threads, double noise_scale) {
  if (replications < 100) throw InvalidArgument("need at least 100 replications");
  if (steps == 0) throw InvalidArgument("steps must be >= 1");
  if (x0_law.mean.size() != problem.dim())
    throw InvalidArgument("initial law has wrong dimension");

  const std::size_t d = problem.dim();
  const std::size_t n_comp = problem.count();
  const std::size_t len = steps + 1;
  // Per chunk: len x (1 + N) sums.
  const std::size_t width = 1 + n_comp;
  std::vector<std::vector<double>> chunk_sums(chunk_count(replications));

  parallel_for(chunk_sums.size(), threads, [&](std::size_t c) {
    auto& sums = chunk_sums[c];
    sums.assign(len * width, 0.0);
    SagaKernel kernel(problem, eta);
    Vector gauss(d);
    std::size_t index = 0;
    const std::size_t end = std::min(replications, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      ChainState s = init_chain(problem, x0_law.draw(seed, r));
      const std::uint64_t key = replication_key(seed, r);
      for (std::uint64_t n = 0;; ++n) {
        double* row = sums.data() + n * width;
        row[0] += norm_sq(s.x);
        for (std::size_t i = 0; i < n_comp; ++i) row[1 + i] += norm_sq(s.row(i, d));
        if (n == steps) break;
        draw_transition_into(n_comp, key, n, gauss, index);
        if (noise_scale != 1.0)
          for (double& g : gauss) g *= noise_scale;
        kernel.step(s, gauss, index);
      }
    }
  });

  MomentSeries out;
  out.replications = replications;
  out.mean_x_sq.assign(len, 0.0);
  out.max_g_sq.assign(len, 0.0);
  std::vector<double> totals(len * width, 0.0);
  for (const auto& sums : chunk_sums)
    for (std::size_t k = 0; k < totals.size(); ++k) totals[k] += sums[k];
  const double reps = static_cast<double>(replications);
  for (std::size_t n = 0; n < len; ++n) {
    out.mean_x_sq[n] = totals[n * width] / reps;
    double mx = 0.0;
    for (std::size_t i = 0; i < n_comp; ++i)
      mx = std::max(mx, totals[n * width + 1 + i] / reps);
    out.max_g_sq[n] = mx;
  }

  const double mh = problem.m_hat();
  const double m = problem.lipschitz();
  out.bound_x = 2.0 *
                (2.0 * static_cast<double>(d) + problem.c1() + 2.0 * mh * mh +
                 x0_law.second_moment()) /
                (problem.c2() * eta);
  out.bounds_apply = eta <= eta_max(problem);
  out.running_max.resize(len);
  out.bound_g.resize(len);
  double running = 0.0;
  out.pass_x = out.pass_g = out.bounds_apply;
  for (std::size_t n = 0; n < len; ++n) {
    running = std::max(running, out.mean_x_sq[n]);
    out.running_max[n] = running;
    out.bound_g[n] = 2.0 * (mh * mh + m * m * running);
    if (out.mean_x_sq[n] > out.bound_x) out.pass_x = false;
    if (out.max_g_sq[n] > out.bound_g[n]) out.pass_g = false;
  }
  return out;
}

double tv_estimate(std::span<const double> samples_a,
                   std::span<const double> samples_b, std::size_t dim,
                   std::size_t bins) {
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  if (samples_a.empty() || samples_b.empty())
    throw InvalidArgument("tv_estimate needs nonempty sample sets");
  if (samples_a.size() % dim != 0 || samples_b.size() % dim != 0)
    throw InvalidArgument("sample sets are not whole rows of the given dimension");
  const std::size_t na = samples_a.size() / dim;
  const std::size_t nb = samples_b.size() / dim;
  if (bins == 0) {
    const auto n = static_cast<double>(std::min(na, nb));
    bins = std::min<std::size_t>(256, static_cast<std::size_t>(std::ceil(std::cbrt(n))));
    bins = std::max<std::size_t>(bins, 1);
  }

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (auto set : {samples_a, samples_b})
    for (std::size_t r = 0; r < set.size() / dim; ++r)
      for (std::size_t k = 0; k < dim; ++k) {
        lo[k] = std::min(lo[k], set[r * dim + k]);
        hi[k] = std::max(hi[k], set[r * dim + k]);
      }

  auto cell = [&](std::span<const double> set, std::size_t r) {
    std::uint64_t id = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      std::size_t b = 0;
      if (hi[k] > lo[k]) {
        const double pos = (set[r * dim + k] - lo[k]) / (hi[k] - lo[k]);
        b = std::min(bins - 1, static_cast<std::size_t>(pos * static_cast<double>(bins)));
      }
      id = id * bins + b;
    }
    return id;
  };

  std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t r = 0; r < na; ++r) ++counts[cell(samples_a, r)].first;
  for (std::size_t r = 0; r < nb; ++r) ++counts[cell(samples_b, r)].second;
  double l1 = 0.0;
  for (const auto& [id, c] : counts)
    l1 += std::fabs(static_cast<double>(c.first) / static_cast<double>(na) -
                    static_cast<double>(c.second) / static_cast<double>(nb));
  return std::min(1.0, 0.5 * l1);
}

namespace {

// X at each checkpoint for every replication: out[c][r * d + k].
std::vector<std::vector<double>> marginal_samples(
    const Problem& problem, double eta, std::span<const std::uint64_t> checkpoints,
    std::size_t replications, std::uint64_t seed, unsigned threads) {
  const std::size_t d = problem.dim();
  std::vector<std::vector<double>> out(checkpoints.size(),
                                       std::vector<double>(replications * d));
  const std::uint64_t last = checkpoints.empty() ? 0 : checkpoints.back();
  const Vector x0(d, 0.0);
  parallel_for(replications, threads, [&](std::size_t r) {
    ChainState s = init_chain(problem, x0);
    SagaKernel kernel(problem, eta);
    const std::uint64_t key = replication_key(seed, r);
    Vector gauss(d);
    std::size_t index = 0;
    std::size_t c = 0;
    for (std::uint64_t n = 0;; ++n) {
      while (c < checkpoints.size() && checkpoints[c] == n) {
        std::copy(s.x.begin(), s.x.end(), out[c].begin() + static_cast<std::ptrdiff_t>(r * d));
        ++c;
      }
      if (n == last) break;
      draw_transition_into(problem.count(), key, n, gauss, index);
      kernel.step(s, gauss, index);
    }
  });
  return out;
}

}  // namespace

TvScanReport tv_cauchy_scan(const Problem& problem, double eta,
                            std::span<const std::uint64_t> checkpoints,
                            std::size_t replications, std::uint64_t seed,
                            unsigned threads) {
  if (checkpoints.empty()) throw InvalidArgument("need at least one checkpoint");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw InvalidArgument("checkpoints must be nondecreasing");
  if (replications == 0) throw InvalidArgument("replications must be >= 1");

  const std::size_t d = problem.dim();
  const auto samples =
      marginal_samples(problem, eta, checkpoints, replications, seed, threads);
  const std::uint64_t last_cp = checkpoints.back();
  const auto control = marginal_samples(problem, eta, std::span(&last_cp, 1),
                                        replications, seed ^ kControlSalt, threads);

  TvScanReport rep;
  rep.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  const std::size_t c = checkpoints.size();
  rep.matrix.assign(c * c, 0.0);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i + 1; j < c; ++j) {
      const double tv = tv_estimate(samples[i], samples[j], d);
      rep.matrix[i * c + j] = rep.matrix[j * c + i] = tv;
    }
  for (std::size_t i = 0; i + 1 < c; ++i) rep.successive.push_back(rep.at(i, i + 1));
  rep.control_tv = tv_estimate(samples.back(), control.front(), d);

  // Pairs of repeated checkpoints carry no information for the pass rule.
  std::vector<double> gaps;
  for (std::size_t i = 0; i + 1 < c; ++i)
    if (checkpoints[i] != checkpoints[i + 1]) gaps.push_back(rep.successive[i]);
  rep.pass = gaps.size() < 2 || gaps.back() < gaps.front();
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] > gaps[i - 1] + 2.0 * rep.control_tv) rep.pass = false;
  return rep;
}

AlphaEstimate alpha_estimate(std::span<const double> at_j,
                             std::span<const double> at_lag,
                             std::span<const double> quantiles) {
  if (at_j.size() != at_lag.size())
    throw InvalidArgument("ensemble columns have different lengths");
  if (at_j.size() < kMinAlphaEnsemble)
    throw InvalidArgument("alpha_estimate needs at least 1000 trajectories");
  static constexpr double kDefaultQuantiles[] = {0.25, 0.5, 0.75};
  if (quantiles.empty()) quantiles = kDefaultQuantiles;

  std::vector<double> sa(at_j.begin(), at_j.end());
  std::vector<double> sb(at_lag.begin(), at_lag.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double n = static_cast<double>(at_j.size());

  AlphaEstimate best;
  best.alpha = -1.0;
  for (double qa : quantiles) {
    const double a = quantile_of_sorted(sa, qa);
    for (double qb : quantiles) {
      const double b = quantile_of_sorted(sb, qb);
      std::size_t ca = 0, cb = 0, cab = 0;
      for (std::size_t r = 0; r < at_j.size(); ++r) {
        const bool in_a = at_j[r] <= a;
        const bool in_b = at_lag[r] <= b;
        ca += in_a;
        cb += in_b;
        cab += in_a && in_b;
      }
      const double pa = static_cast<double>(ca) / n;
      const double pb = static_cast<double>(cb) / n;
      const double pab = static_cast<double>(cab) / n;
      const double cov = pab - pa * pb;
      // Variance of the centered product (1_A - pA)(1_B - pB).
      const double pa_only = pa - pab, pb_only = pb - pab;
      const double neither = 1.0 - pa - pb + pab;
      const double m2 = pab * std::pow((1 - pa) * (1 - pb), 2) +
                        pa_only * std::pow((1 - pa) * pb, 2) +
                        pb_only * std::pow(pa * (1 - pb), 2) +
                        neither * std::pow(pa * pb, 2);
      const double se = std::sqrt(std::max(0.0, m2 - cov * cov) / n);
      best.stderr_ = std::max(best.stderr_, se);
      if (std::fabs(cov) > best.alpha) {
        best.alpha = std::fabs(cov);
        best.threshold_a = a;
        best.threshold_b = b;
      }
    }
  }
  return best;
}

MixingReport mixing_vs_coupling(const Problem& problem,
                                const ConstantsBundle& bundle,
                                std::span<const std::uint64_t> lags,
                                std::size_t replications, std::uint64_t seed,
                                std::uint64_t j, unsigned threads) {
  if (lags.empty()) throw InvalidArgument("need at least one lag");
  if (replications < kMinAlphaEnsemble)
    throw InvalidArgument("mixing_vs_coupling needs at least 1000 replications");
  const std::size_t d = problem.dim();
  const std::uint64_t max_lag = *std::max_element(lags.begin(), lags.end());
  const std::uint64_t end = j + max_lag;
  constexpr auto kNever = std::numeric_limits<std::uint64_t>::max();

  const Vector zero(d, 0.0);
  const ChainState anchor = init_chain(problem, zero);
  std::vector<double> at_j(replications);
  std::vector<std::vector<double>> at_lag(lags.size(), std::vector<double>(replications));
  std::vector<std::uint64_t> meet_lag(replications, kNever);

  parallel_for(replications, threads, [&](std::size_t r) {
    const std::uint64_t key = replication_key(seed, r);
    ChainState chain = anchor;
    ChainState copy = anchor;
    MapKernel kc(problem, bundle), ka(problem, bundle);
    NoiseRecord rec;
    bool coupled = false;
    for (std::uint64_t t = 0;; ++t) {
      if (t == j) {
        at_j[r] = chain.x[0];
        copy = anchor;
        copy.step = j;
        if (chain.x == copy.x && chain.table == copy.table) {
          coupled = true;
          meet_lag[r] = 0;
        }
      }
      if (t >= j)
        for (std::size_t l = 0; l < lags.size(); ++l)
          if (t - j == lags[l]) at_lag[l][r] = chain.x[0];
      if (t == end) break;
      fill_noise_record(rec, d, problem.count(), key, t);
      kc.step(chain, rec);
      if (t >= j && !coupled) {
        ka.step(copy, rec);
        if (chain.x == copy.x && chain.table == copy.table) {
          coupled = true;
          meet_lag[r] = t + 1 - j;
        }
      }
    }
  });

  MixingReport rep;
  rep.j = j;
  rep.lags.assign(lags.begin(), lags.end());
  rep.event_family =
      "A = {x_0(j) <= a}, B = {x_0(j+lag) <= b}; a, b at the 0.25/0.5/0.75 "
      "empirical quantiles";
  const double n = static_cast<double>(replications);
  rep.pass = true;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    const AlphaEstimate est = alpha_estimate(at_j, at_lag[l]);
    const auto met = static_cast<double>(std::count_if(
        meet_lag.begin(), meet_lag.end(),
        [&](std::uint64_t m) { return m != kNever && m <= lags[l]; }));
    const double p = met / n;
    rep.alpha_hat.push_back(est.alpha);
    rep.alpha_stderr.push_back(est.stderr_);
    rep.coupling_bound.push_back(2.0 * (1.0 - p));
    rep.bound_stderr.push_back(2.0 * std::sqrt(p * (1.0 - p) / n));
    const double tol = 3.0 * std::hypot(est.stderr_, rep.bound_stderr.back());
    const bool ok = est.alpha <= rep.coupling_bound.back() + tol;
    rep.pass_lag.push_back(ok);
    rep.pass = rep.pass && ok;
  }
  // Monotonicity is judged along increasing lag.
  std::vector<std::size_t> order(lags.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lags[a] < lags[b]; });
  rep.monotone = true;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto prev = order[i - 1], cur = order[i];
    const double tol =
        3.0 * std::hypot(rep.alpha_stderr[prev], rep.alpha_stderr[cur]);
    if (rep.alpha_hat[cur] > rep.alpha_hat[prev] + tol) rep.monotone = false;
  }
  return rep;
}

Observable lookup_observable(std::string_view spec) {
  const auto parts = split_colon(spec);
  const std::string name(spec);
  const auto head = parts.front();
  if (head == "const" && parts.size() == 2) {
    const double c = parse_double(parts[1], spec);
    return {name, std::fabs(c), [c](auto, auto) { return c; }};
  }
  if (head == "coord" && parts.size() == 2) {
    const double k = parse_double(parts[1], spec);
    if (k < 0 || k != std::floor(k))
      throw InvalidArgument("coordinate index must be a nonnegative integer");
    const auto idx = static_cast<std::size_t>(k);
    return {name, 1.0, [idx](std::span<const double> x, std::span<const double> g) {
              if (idx < x.size()) return x[idx];
              if (idx - x.size() < g.size()) return g[idx - x.size()];
              throw InvalidArgument("coordinate index out of range");
            }};
  }
  if (head == "norm" && parts.size() == 1)
    return {name, 1.0, [](std::span<const double> x, auto) { return norm(x); }};
  if (head == "capped_sq" && parts.size() == 2) {
    const double cap = parse_double(parts[1], spec);
    if (!(cap > 0.0)) throw InvalidArgument("cap must be positive");
    return {name, cap, [cap](std::span<const double> x, auto) {
              return std::min(norm_sq(x), cap);
            }};
  }
  if (head == "smooth_step" && parts.size() == 3) {
    const double a = parse_double(parts[1], spec);
    const double w = parse_double(parts[2], spec);
    if (!(w > 0.0)) throw InvalidArgument("smooth_step width must be positive");
    return {name, 1.0, [a, w](std::span<const double> x, auto) {
              return 1.0 / (1.0 + std::exp(-(x[0] - a) / w));
            }};
  }
  throw InvalidArgument("unregistered observable '" + name +
                        "' (known: const:<c>, coord:<k>, norm, capped_sq:<cap>, "
                        "smooth_step:<a>:<w>)");
}

const LlnCheckpoint& LlnReport::at(std::uint64_t n) const {
  for (const auto& c : checkpoints)
    if (c.n == n) return c;
  throw InvalidArgument("no checkpoint at n = " + std::to_string(n));
}

LlnReport lln_check(const Problem& problem, double eta,
                    std::string_view observable, std::uint64_t horizon,
                    std::size_t replications, std::uint64_t seed,
                    std::span<const std::uint64_t> extra_checkpoints,
                    unsigned threads, double burn_in_fraction) {
  const Observable phi = lookup_observable(observable);
  if (horizon < 2) throw InvalidArgument("horizon must be >= 2");
  if (replications < 2) throw InvalidArgument("need at least 2 replications");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw InvalidArgument("burn-in fraction must lie in [0, 1)");

  std::vector<std::uint64_t> cps = {horizon / 2, horizon};
  for (auto n : extra_checkpoints)
    if (n >= 1 && n <= horizon) cps.push_back(n);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  const std::uint64_t burn_in =
      static_cast<std::uint64_t>(burn_in_fraction * static_cast<double>(horizon));
  const std::size_t d = problem.dim();
  // Per replication: average at each checkpoint, burned average, and phi at
  // each checkpoint step.
  std::vector<std::vector<double>> avg(cps.size(), std::vector<double>(replications));
  std::vector<std::vector<double>> phi_at(cps.size(), std::vector<double>(replications));
  std::vector<double> burned(replications);

  parallel_for(replications, threads, [&](std::size_t r) {
    ChainState s = init_chain(problem, Vector(d, 0.0));
    SagaKernel kernel(problem, eta);
    const std::uint64_t key = replication_key(seed, r);
    Vector gauss(d);
    std::size_t index = 0;
    double sum = 0.0, sum_at_burn = 0.0;
    std::size_t c = 0;
    for (std::uint64_t n = 0; n < horizon; ++n) {
      draw_transition_into(problem.count(), key, n, gauss, index);
      kernel.step(s, gauss, index);
      const double v = phi.fn(s.x, s.table);
      sum += v;
      const std::uint64_t k = n + 1;
      if (k == burn_in) sum_at_burn = sum;
      if (c < cps.size() && cps[c] == k) {
        avg[c][r] = sum / static_cast<double>(k);
        phi_at[c][r] = v;
        ++c;
      }
    }
    burned[r] = (sum - sum_at_burn) / static_cast<double>(horizon - burn_in);
  });

  LlnReport rep;
  rep.observable = phi.name;
  rep.growth = phi.growth;
  rep.horizon = horizon;
  rep.burn_in = burn_in;
  const double reps = static_cast<double>(replications);
  auto summarize = [&](std::uint64_t n, std::span<const double> v) {
    LlnCheckpoint cp;
    cp.n = n;
    const auto ms = mean_spread(v);
    cp.mean = ms.mean;
    cp.spread = ms.sd;
    cp.stderr_ = ms.sd / std::sqrt(reps);
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::fabs(v[i] - ms.mean);
    const auto md = mean_spread(dev);
    cp.mad = md.mean;
    cp.mad_stderr = md.sd / std::sqrt(reps);
    return cp;
  };
  for (std::size_t c = 0; c < cps.size(); ++c) {
    rep.checkpoints.push_back(summarize(cps[c], avg[c]));
    rep.c_w = std::max(rep.c_w, mean_spread(phi_at[c]).sd * mean_spread(phi_at[c]).sd);
  }
  rep.burned = summarize(horizon, burned);
  rep.final_averages = avg.back();
  rep.ui_v = {1.0, 10.0, 100.0, 1000.0};
  for (double v : rep.ui_v) rep.ui_bound.push_back(rep.c_w / v);
  rep.deviation = std::fabs(rep.at(horizon).mean - rep.at(horizon / 2).mean);
  return rep;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    worst = std::max(worst, std::fabs(static_cast<double>(i) / na -
                                      static_cast<double>(j) / nb));
  }
  return worst;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace sagald
