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

#include "sagald/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sagald/io.hpp"

namespace sagald {
namespace {

void hash_line(std::ostream& os, std::string_view hash) {
  if (!hash.empty()) os << "# config_hash=" << hash << '\n';
}

// JSON cannot carry inf/nan; those become null.
nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <class T>
nlohmann::json nums(const std::vector<T>& v) {
  auto out = nlohmann::json::array();
  for (const auto& x : v) {
    if constexpr (std::is_floating_point_v<T>)
      out.push_back(num(x));
    else
      out.push_back(x);
  }
  return out;
}

}  // namespace

void write_moments_csv(std::ostream& os, const MomentSeries& s,
                       std::string_view config_hash) {
  hash_line(os, config_hash);
  os << "n,mean_x_sq,max_g_sq,running_max,bound_x,bound_g\n";
  for (std::size_t n = 0; n < s.mean_x_sq.size(); ++n)
    os << n << ',' << format_double(s.mean_x_sq[n]) << ','
       << format_double(s.max_g_sq[n]) << ',' << format_double(s.running_max[n])
       << ',' << format_double(s.bound_x) << ',' << format_double(s.bound_g[n])
       << '\n';
}

void write_coupling_csv(std::ostream& os, const MeetProbReport& r,
                        std::string_view config_hash) {
  hash_line(os, config_hash);
  os << "k,p_hat,stderr,bound_paper,bound_empiricalD,d_occupancy,unmet\n";
  for (std::size_t k = 0; k < r.p_hat.size(); ++k)
    os << k << ',' << format_double(r.p_hat[k]) << ','
       << format_double(r.stderr_[k]) << ',' << format_double(r.bound_paper[k])
       << ',' << format_double(r.bound_empirical[k]) << ','
       << format_double(r.d_occupancy[k]) << ',' << r.unmet[k] << '\n';
}

void write_mixing_csv(std::ostream& os, const MixingReport& r,
                      std::string_view config_hash) {
  hash_line(os, config_hash);
  os << "lag,alpha_hat,alpha_stderr,coupling_bound,bound_stderr,pass\n";
  for (std::size_t i = 0; i < r.lags.size(); ++i)
    os << r.lags[i] << ',' << format_double(r.alpha_hat[i]) << ','
       << format_double(r.alpha_stderr[i]) << ','
       << format_double(r.coupling_bound[i]) << ','
       << format_double(r.bound_stderr[i]) << ',' << (r.pass_lag[i] ? 1 : 0)
       << '\n';
}

void write_lln_csv(std::ostream& os, const LlnReport& r,
                   std::string_view config_hash) {
  hash_line(os, config_hash);
  os << "n,mean,spread,stderr,mad,mad_stderr\n";
  for (const auto& c : r.checkpoints)
    os << c.n << ',' << format_double(c.mean) << ',' << format_double(c.spread)
       << ',' << format_double(c.stderr_) << ',' << format_double(c.mad) << ','
       << format_double(c.mad_stderr) << '\n';
}

void write_tv_csv(std::ostream& os, const TvScanReport& r,
                  std::string_view config_hash) {
  hash_line(os, config_hash);
  os << "n_a,n_b,tv\n";
  const std::size_t c = r.checkpoints.size();
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < c; ++j)
      os << r.checkpoints[i] << ',' << r.checkpoints[j] << ','
         << format_double(r.at(i, j)) << '\n';
}

nlohmann::json to_json(const MomentSeries& s) {
  const double sup_x =
      s.mean_x_sq.empty() ? 0.0 : *std::max_element(s.mean_x_sq.begin(), s.mean_x_sq.end());
  const double sup_g =
      s.max_g_sq.empty() ? 0.0 : *std::max_element(s.max_g_sq.begin(), s.max_g_sq.end());
  return {{"replications", s.replications},
          {"steps", s.mean_x_sq.empty() ? 0 : s.mean_x_sq.size() - 1},
          {"sup_mean_x_sq", num(sup_x)},
          {"sup_max_g_sq", num(sup_g)},
          {"bound_x", num(s.bound_x)},
          {"bound_g_final", s.bound_g.empty() ? nlohmann::json() : num(s.bound_g.back())},
          {"bounds_apply", s.bounds_apply},
          {"pass_x", s.bounds_apply ? nlohmann::json(s.pass_x) : nlohmann::json("n/a")},
          {"pass_g", s.bounds_apply ? nlohmann::json(s.pass_g) : nlohmann::json("n/a")}};
}

nlohmann::json meet_quantiles(const MeetProbReport& r) {
  std::vector<std::uint64_t> met;
  for (auto s : r.meet_steps)
    if (s <= r.horizon) met.push_back(s);
  if (met.empty()) return nullptr;
  std::sort(met.begin(), met.end());
  auto q = [&](double p) {
    return met[static_cast<std::size_t>(std::floor(p * static_cast<double>(met.size() - 1)))];
  };
  return {{"q10", q(0.1)}, {"q50", q(0.5)}, {"q90", q(0.9)}, {"met", met.size()}};
}

nlohmann::json to_json(const MeetProbReport& r) {
  return {{"replications", r.replications},
          {"horizon", r.horizon},
          {"blocks", r.p_hat.empty() ? 0 : r.p_hat.size() - 1},
          {"p_hat_final", r.p_hat.empty() ? nlohmann::json() : num(r.p_hat.back())},
          {"bound_paper_final",
           r.bound_paper.empty() ? nlohmann::json() : num(r.bound_paper.back())},
          {"log_block_prob", num(r.log_block_prob)},
          {"i_events", r.i_events},
          {"fontos_violations", r.fontos_violations},
          {"meet_step_quantiles", meet_quantiles(r)}};
}

nlohmann::json to_json(const RecursionCheck& c) {
  return {{"pass", c.pass},
          {"checked_blocks", c.checked_blocks},
          {"worst_slack", num(c.worst_slack)}};
}

nlohmann::json to_json(const NZero& n) {
  nlohmann::json out = {{"finite", n.finite}, {"log_value", num(n.log_value)}};
  if (n.finite) {
    out["value"] = n.value;
    out["k_star"] = n.k_star;
  } else {
    out["value"] = "sentinel: exceeds 64-bit range";
  }
  return out;
}

nlohmann::json to_json(const MixingReport& r) {
  std::vector<int> pass_lag(r.pass_lag.begin(), r.pass_lag.end());
  return {{"j", r.j},
          {"lags", r.lags},
          {"alpha_hat", nums(r.alpha_hat)},
          {"alpha_stderr", nums(r.alpha_stderr)},
          {"coupling_bound", nums(r.coupling_bound)},
          {"bound_stderr", nums(r.bound_stderr)},
          {"pass_lag", pass_lag},
          {"event_family", r.event_family},
          {"pass", r.pass},
          {"monotone", r.monotone}};
}

nlohmann::json to_json(const LlnReport& r) {
  auto cps = nlohmann::json::array();
  for (const auto& c : r.checkpoints)
    cps.push_back({{"n", c.n},
                   {"mean", num(c.mean)},
                   {"spread", num(c.spread)},
                   {"stderr", num(c.stderr_)},
                   {"mad", num(c.mad)},
                   {"mad_stderr", num(c.mad_stderr)}});
  return {{"observable", r.observable},
          {"growth", num(r.growth)},
          {"horizon", r.horizon},
          {"burn_in", r.burn_in},
          {"checkpoints", cps},
          {"burned_mean", num(r.burned.mean)},
          {"burned_spread", num(r.burned.spread)},
          {"c_w", num(r.c_w)},
          {"ui_v", nums(r.ui_v)},
          {"ui_bound", nums(r.ui_bound)},
          {"deviation", num(r.deviation)}};
}

nlohmann::json to_json(const TvScanReport& r) {
  return {{"checkpoints", r.checkpoints},
          {"matrix", nums(r.matrix)},
          {"successive", nums(r.successive)},
          {"control_tv", num(r.control_tv)},
          {"pass", r.pass}};
}

nlohmann::json to_json(const MinorizationReport& r) {
  return {{"min_log_ratio", num(r.min_log_ratio)},
          {"min_density_ratio", num(r.min_density_ratio)},
          {"worst_case_ratio", num(r.worst_case_ratio)},
          {"center_log_ratio", num(r.center_log_ratio)},
          {"trials", r.trials},
          {"pass", r.pass}};
}

nlohmann::json to_json(const AssumptionReport& r) {
  return {{"lipschitz_ok", r.lipschitz_ok},
          {"dissip_ok", r.dissip_ok},
          {"m_hat_ok", r.m_hat_ok},
          {"worst_ratio", num(r.worst_ratio)},
          {"worst_margin", num(r.worst_margin)},
          {"max_norm_at_zero", num(r.max_norm_at_zero)}};
}

}  // namespace sagald
