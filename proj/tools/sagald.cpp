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

// sagald: batch runner for the sampler, random-map and diagnostics library.
//
//   sagald constants --problem lin-1d --eta 0.03125 --eps 0.1
//   sagald couple --problem micro-1d --eta 0.5 --k-override 0.1 --unsafe-eta
//
// Exit codes: 0 ok, 2 usage, 3 safety refusal, 4 validation failure,
// 5 numeric overflow.

#include <cstdio>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sagald/coupling.hpp"
#include "sagald/error.hpp"
#include "sagald/io.hpp"
#include "sagald/randommap.hpp"
#include "sagald/report.hpp"
#include "sagald/sampler.hpp"
#include "sagald/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kIoError = 1,
  kUsage = 2,
  kSafety = 3,
  kValidation = 4,
  kOverflow = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SafetyRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Keys accepted in a --config file. threads and out do not enter the hash.
const std::set<std::string> kKnownKeys = {
    "problem", "eta",    "eps",         "seed",  "steps",       "reps",
    "k_override", "beta_override", "unsafe_eta", "threads", "out", "format",
    "x0",      "x0_std", "stride",      "noise_scale", "init_a", "init_b",
    "warmup",  "blocks", "lags",        "j",     "checkpoints", "phi",
    "trials",  "e_x0_sq", "burn_in"};
const std::set<std::string> kUnhashed = {"threads", "out"};

struct Config {
  std::string command;
  json raw;  // effective settings after merging file and flags
  sagald::Problem problem = sagald::lin_1d();
  double eta = 0.0;
  double eps = 0.1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  fs::path out = ".";
  std::string format = "csv";
  bool unsafe_eta = false;
  std::optional<double> k_override;
  std::optional<double> beta_override;
  std::string hash;

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!raw.contains(key)) return fallback;
    try {
      return raw.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }
};

// Flag registry: every option records into `overrides` only when given.
class Flags {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto& slot = store_<T>().emplace_back();
    auto* opt = app->add_option(flag, slot, help);
    setters_.push_back([opt, &slot, key](json& j) {
      if (opt->count() > 0) j[key] = slot;
    });
  }
  void add_flag(CLI::App* app, const std::string& flag, const std::string& key,
                const std::string& help) {
    auto& slot = bools_.emplace_back(false);
    auto* opt = app->add_flag(flag, slot, help);
    setters_.push_back([opt, &slot, key](json& j) {
      if (opt->count() > 0) j[key] = slot;
    });
  }
  void apply(json& j) const {
    for (const auto& s : setters_) s(j);
  }

 private:
  template <class T>
  std::deque<T>& store_() {
    if constexpr (std::is_same_v<T, double>) return doubles_;
    else if constexpr (std::is_same_v<T, std::uint64_t>) return ints_;
    else if constexpr (std::is_same_v<T, unsigned>) return uints_;
    else if constexpr (std::is_same_v<T, std::string>) return strings_;
    else if constexpr (std::is_same_v<T, std::vector<double>>) return vecs_;
    else return ivecs_;
  }
  std::deque<double> doubles_;
  std::deque<std::uint64_t> ints_;
  std::deque<unsigned> uints_;
  std::deque<std::string> strings_;
  std::deque<std::vector<double>> vecs_;
  std::deque<std::vector<std::uint64_t>> ivecs_;
  std::deque<bool> bools_;
  std::vector<std::function<void(json&)>> setters_;
};

void add_common(CLI::App* sub, Flags& f) {
  f.add<std::string>(sub, "--problem", "problem", "built-in name or inline JSON");
  f.add<double>(sub, "--eta", "eta", "step size (default: eta_max of the problem)");
  f.add<double>(sub, "--eps", "eps", "target accuracy, 0 < eps < 1/3");
  f.add<std::uint64_t>(sub, "--seed", "seed", "master seed");
  f.add<std::uint64_t>(sub, "--steps", "steps", "steps or horizon");
  f.add<std::uint64_t>(sub, "--reps", "reps", "replications");
  f.add<double>(sub, "--k-override", "k_override", "override the good-set radius K");
  f.add<double>(sub, "--beta-override", "beta_override", "override ln(beta)");
  f.add_flag(sub, "--unsafe-eta", "unsafe_eta", "allow eta above eta_max");
  f.add<unsigned>(sub, "--threads", "threads", "worker threads");
  f.add<std::string>(sub, "--out", "out", "output directory");
  f.add<std::string>(sub, "--format", "format", "csv | json | binary");
  f.add<double>(sub, "--e-x0-sq", "e_x0_sq", "E|X0|^2 for the constants");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  return j;
}

Config resolve(const std::string& command, json raw) {
  for (const auto& [key, value] : raw.items())
    if (!kKnownKeys.count(key)) throw UsageError("unknown config key '" + key + "'");
  Config c;
  c.command = command;
  c.raw = raw;
  if (!raw.contains("problem")) throw UsageError("missing --problem");
  const json& p = raw["problem"];
  c.problem = p.is_string() ? sagald::resolve_problem(p.get<std::string>())
                            : sagald::problem_from_json(p);
  c.eta = c.get("eta", sagald::eta_max(c.problem));
  c.eps = c.get("eps", 0.1);
  c.seed = c.get<std::uint64_t>("seed", 0);
  c.threads = c.get<unsigned>("threads", 1);
  c.out = c.get<std::string>("out", ".");
  c.format = c.get<std::string>("format", "csv");
  c.unsafe_eta = c.get("unsafe_eta", false);
  if (raw.contains("k_override")) c.k_override = c.get("k_override", 0.0);
  if (raw.contains("beta_override")) c.beta_override = c.get("beta_override", 0.0);
  if (c.format != "csv" && c.format != "json" && c.format != "binary")
    throw UsageError("--format must be csv, json or binary");
  if (c.format == "binary" && command != "sample")
    throw UsageError("binary output is only available for 'sample'");
  if (!(c.eta > 0.0)) throw UsageError("--eta must be positive");
  if (c.eta > sagald::eta_max(c.problem) && !c.unsafe_eta)
    throw SafetyRefusal("eta = " + sagald::format_double(c.eta) +
                        " exceeds eta_max = " +
                        sagald::format_double(sagald::eta_max(c.problem)) +
                        "; pass --unsafe-eta to run anyway");

  // Canonical form: resolved problem, explicit eta, sorted keys.
  json canon = raw;
  for (const auto& k : kUnhashed) canon.erase(k);
  canon["problem"] = sagald::to_json(c.problem);
  canon["eta"] = c.eta;
  canon["command"] = command;
  c.hash = sagald::hex64(sagald::fnv1a64(canon.dump()));
  c.raw["eta"] = c.eta;
  return c;
}

json provenance(const Config& c) {
  json cfg = c.raw;
  for (const auto& k : kUnhashed) cfg.erase(k);
  cfg["problem"] = sagald::to_json(c.problem);
  return {{"config_hash", c.hash}, {"command", c.command}, {"config", cfg}};
}

std::ofstream open_out(const Config& c, const std::string& name,
                       bool binary = false) {
  fs::create_directories(c.out);
  const fs::path path = c.out / name;
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const Config& c, const std::string& name, const json& doc) {
  auto os = open_out(c, name);
  os << doc.dump(2) << '\n';
}

// CSV table text, also embedded in JSON output when --format json.
template <class Writer>
std::string table(Writer&& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

json csv_rows(const std::string& csv) {
  auto rows = json::array();
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

void emit_table(const Config& c, const std::string& stem, json& summary,
                const std::function<void(std::ostream&, std::string_view)>& writer) {
  if (c.format == "json") {
    summary["rows"] = csv_rows(table([&](std::ostream& os) { writer(os, {}); }));
  } else {
    auto os = open_out(c, stem + ".csv");
    writer(os, c.hash);
  }
}

sagald::ConstantsBundle bundle_for(const Config& c, double e_x0_sq) {
  sagald::BundleOptions opts;
  opts.k_override = c.k_override;
  opts.log_beta_override = c.beta_override;
  opts.unsafe_eta = c.unsafe_eta;
  try {
    return sagald::derive_constants(c.problem, c.eta, c.eps,
                                    c.get("e_x0_sq", e_x0_sq), opts);
  } catch (const sagald::ConfigError& e) {
    throw UsageError(e.what());
  }
}

sagald::MinorizationReport require_minorization(const Config& c,
                                                const sagald::ConstantsBundle& b) {
  const auto rep = sagald::verify_minorization(
      c.problem, b, c.get<std::uint64_t>("trials", 100000), c.seed);
  if (!rep.pass) {
    throw ValidationFailure(
        "minorization fails for the chosen constants: min density ratio " +
        sagald::format_double(rep.min_density_ratio) + ", worst-case ratio " +
        sagald::format_double(rep.worst_case_ratio));
  }
  return rep;
}

sagald::Vector vector_or(const Config& c, const std::string& key, double fill) {
  auto v = c.get(key, sagald::Vector(c.problem.dim(), fill));
  if (v.size() != c.problem.dim())
    throw UsageError("'" + key + "' must have " + std::to_string(c.problem.dim()) +
                     " entries");
  return v;
}

int cmd_constants(const Config& c) {
  const auto b = bundle_for(c, c.get("e_x0_sq", 0.0));
  const auto n0 = sagald::n_zero(b.log_beta, c.problem.count(), c.eps);
  json doc = provenance(c);
  doc["eta_max"] = sagald::eta_max(c.problem);
  doc["constants"] = sagald::to_json(b);
  doc["log_block_prob"] = sagald::log_block_probability(b.log_beta, c.problem.count());
  doc["n_zero"] = sagald::to_json(n0);
  write_json(c, "constants.json", doc);

  std::printf("config_hash      %s\n", c.hash.c_str());
  std::printf("eta              %s (eta_max %s)\n", sagald::format_double(b.eta).c_str(),
              sagald::format_double(sagald::eta_max(c.problem)).c_str());
  std::printf("eps              %s\n", sagald::format_double(b.eps).c_str());
  std::printf("C_check          %s\n", sagald::format_double(b.c_check).c_str());
  std::printf("C_hat            %s\n", sagald::format_double(b.c_hat).c_str());
  std::printf("K(eps)           %s\n", sagald::format_double(b.k_eps).c_str());
  std::printf("K used           %s%s\n", sagald::format_double(b.good_x_radius).c_str(),
              b.k_overridden ? " (override)" : "");
  std::printf("table radius     %s\n", sagald::format_double(b.good_g_radius).c_str());
  std::printf("regen radius     %s\n", sagald::format_double(b.regen_radius).c_str());
  std::printf("ln beta          %s%s\n", sagald::format_double(b.log_beta).c_str(),
              b.beta_overridden ? " (override)" : "");
  if (n0.finite)
    std::printf("n0               %llu\n", static_cast<unsigned long long>(n0.value));
  else
    std::printf("n0               beyond 64-bit range (ln n0 = %s)\n",
                sagald::format_double(n0.log_value).c_str());
  return kOk;
}

void write_trajectory(const Config& c, const sagald::Trajectory& t) {
  if (c.format == "binary") {
    auto os = open_out(c, "trajectory.bin", true);
    os.write("SAGALDB1", 8);
    const std::uint64_t hash = std::stoull(c.hash, nullptr, 16);
    const std::uint64_t cols = t.width() + 1;
    for (std::uint64_t v : {hash, cols})
      for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
    sagald::write_trajectory_binary(os, t);
  } else if (c.format == "json") {
    json doc = provenance(c);
    doc["rows"] = csv_rows(table([&](std::ostream& os) {
      sagald::write_trajectory_csv(os, t);
    }));
    write_json(c, "trajectory.json", doc);
  } else {
    auto os = open_out(c, "trajectory.csv");
    os << "# config_hash=" << c.hash << '\n';
    sagald::write_trajectory_csv(os, t);
  }
}

int cmd_sample(const Config& c) {
  const auto steps = c.get<std::uint64_t>("steps", 1000);
  const auto reps = c.get<std::uint64_t>("reps", 200);
  sagald::InitialLaw law{vector_or(c, "x0", 0.0), c.get("x0_std", 0.0)};

  sagald::RunOptions opts;
  opts.eta = c.eta;
  opts.steps = steps;
  opts.seed = c.seed;
  opts.stride = c.get<std::uint64_t>("stride", 0);
  opts.unsafe_eta = c.unsafe_eta;
  opts.noise_scale = c.get("noise_scale", 1.0);
  sagald::Trajectory traj;
  try {
    traj = sagald::run_chain(c.problem, law.mean, opts);
  } catch (const sagald::ConfigError& e) {
    throw UsageError(e.what());
  }
  write_trajectory(c, traj);

  const auto moments = sagald::track_moments(c.problem, law, c.eta, steps, reps,
                                             c.seed, c.threads, opts.noise_scale);
  json doc = provenance(c);
  doc["moments"] = sagald::to_json(moments);
  emit_table(c, "moments", doc, [&](std::ostream& os, std::string_view h) {
    sagald::write_moments_csv(os, moments, h);
  });
  write_json(c, "sample.json", doc);
  std::printf("config_hash %s\n", c.hash.c_str());
  if (moments.bounds_apply)
    std::printf("moment bound E|X|^2: %s, E|G|^2: %s\n",
                moments.pass_x ? "PASS" : "FAIL", moments.pass_g ? "PASS" : "FAIL");
  else
    std::printf("moment bounds not applicable (eta above eta_max)\n");
  return kOk;
}

int cmd_couple(const Config& c) {
  sagald::CouplingInit init;
  init.x_a = vector_or(c, "init_a", 0.0);
  init.x_b = vector_or(c, "init_b", 2.0);
  init.warmup = c.get<std::uint64_t>("warmup", 0);
  if (init.warmup > 0) init.kind = sagald::CouplingInit::Kind::kFromRuns;
  const double e0 = std::max(sagald::norm_sq(init.x_a), sagald::norm_sq(init.x_b));
  const auto b = bundle_for(c, e0);
  const auto minor = require_minorization(c, b);

  const auto blocks = c.get<std::uint64_t>("blocks", 300);
  const auto reps = c.get<std::uint64_t>("reps", 1000);
  const auto rep =
      sagald::empirical_meet_prob(c.problem, init, blocks, reps, b, c.seed, c.threads);
  const auto rec = sagald::check_recursion(rep);
  const auto n0 = sagald::n_zero(b.log_beta, c.problem.count(), c.eps);

  json doc = provenance(c);
  doc["constants"] = sagald::to_json(b);
  doc["minorization"] = sagald::to_json(minor);
  doc["coupling"] = sagald::to_json(rep);
  doc["recursion"] = sagald::to_json(rec);
  doc["n_zero"] = sagald::to_json(n0);
  if (!n0.finite || n0.log_value > std::log(static_cast<double>(rep.horizon) + 1.0) + 20.0)
    doc["note"] =
        "n0 is far beyond the horizon: no regeneration-driven meetings are "
        "expected; any meetings come from synchronous-noise coalescence";
  emit_table(c, "coupling", doc, [&](std::ostream& os, std::string_view h) {
    sagald::write_coupling_csv(os, rep, h);
  });
  write_json(c, "coupling.json", doc);

  std::printf("config_hash %s\n", c.hash.c_str());
  std::printf("ln beta %s, blocks %llu, reps %llu\n",
              sagald::format_double(b.log_beta).c_str(),
              static_cast<unsigned long long>(blocks),
              static_cast<unsigned long long>(reps));
  std::printf("p_hat(final) %s, I-events %llu, fontos violations %llu\n",
              sagald::format_double(rep.p_hat.back()).c_str(),
              static_cast<unsigned long long>(rep.i_events),
              static_cast<unsigned long long>(rep.fontos_violations));
  std::printf("recursion %s (%zu blocks checked)\n", rec.pass ? "PASS" : "FAIL",
              rec.checked_blocks);
  return kOk;
}

int cmd_mixing(const Config& c) {
  const auto b = bundle_for(c, 0.0);
  const auto minor = require_minorization(c, b);
  const auto lags = c.get("lags", std::vector<std::uint64_t>{100, 1000, 10000, 100000});
  const auto reps = c.get<std::uint64_t>("reps", 2000);
  const auto j = c.get<std::uint64_t>("j", 1000);
  const auto rep =
      sagald::mixing_vs_coupling(c.problem, b, lags, reps, c.seed, j, c.threads);
  json doc = provenance(c);
  doc["constants"] = sagald::to_json(b);
  doc["minorization"] = sagald::to_json(minor);
  doc["mixing"] = sagald::to_json(rep);
  emit_table(c, "mixing", doc, [&](std::ostream& os, std::string_view h) {
    sagald::write_mixing_csv(os, rep, h);
  });
  write_json(c, "mixing.json", doc);
  std::printf("config_hash %s\n", c.hash.c_str());
  for (std::size_t i = 0; i < rep.lags.size(); ++i)
    std::printf("lag %-8llu alpha %-10.4g bound %-10.4g %s\n",
                static_cast<unsigned long long>(rep.lags[i]), rep.alpha_hat[i],
                rep.coupling_bound[i], rep.pass_lag[i] ? "PASS" : "FAIL");
  std::printf("inequality %s, monotone %s\n", rep.pass ? "PASS" : "FAIL",
              rep.monotone ? "yes" : "no");
  return kOk;
}

int cmd_lln(const Config& c) {
  const auto horizon = c.get<std::uint64_t>("steps", 100000);
  const auto reps = c.get<std::uint64_t>("reps", 32);
  const auto phi = c.get<std::string>("phi", "capped_sq:100");
  const auto extra = c.get("checkpoints", std::vector<std::uint64_t>{});
  const auto rep = sagald::lln_check(c.problem, c.eta, phi, horizon, reps, c.seed,
                                     extra, c.threads, c.get("burn_in", 0.1));
  json doc = provenance(c);
  doc["lln"] = sagald::to_json(rep);
  emit_table(c, "lln", doc, [&](std::ostream& os, std::string_view h) {
    sagald::write_lln_csv(os, rep, h);
  });
  write_json(c, "lln.json", doc);
  std::printf("config_hash %s\n", c.hash.c_str());
  for (const auto& cp : rep.checkpoints)
    std::printf("n %-9llu mean %s spread %s\n", static_cast<unsigned long long>(cp.n),
                sagald::format_double(cp.mean).c_str(),
                sagald::format_double(cp.spread).c_str());
  std::printf("burned mean %s (burn-in %llu)\n",
              sagald::format_double(rep.burned.mean).c_str(),
              static_cast<unsigned long long>(rep.burn_in));
  return kOk;
}

int cmd_tv(const Config& c) {
  const auto cps = c.get("checkpoints", std::vector<std::uint64_t>{10, 100, 1000, 2000});
  const auto reps = c.get<std::uint64_t>("reps", 10000);
  const auto rep = sagald::tv_cauchy_scan(c.problem, c.eta, cps, reps, c.seed, c.threads);
  json doc = provenance(c);
  doc["tv"] = sagald::to_json(rep);
  emit_table(c, "tv", doc, [&](std::ostream& os, std::string_view h) {
    sagald::write_tv_csv(os, rep, h);
  });
  write_json(c, "tv.json", doc);
  std::printf("config_hash %s\n", c.hash.c_str());
  for (std::size_t i = 0; i < rep.successive.size(); ++i)
    std::printf("TV(%llu, %llu) = %.4f\n",
                static_cast<unsigned long long>(rep.checkpoints[i]),
                static_cast<unsigned long long>(rep.checkpoints[i + 1]),
                rep.successive[i]);
  std::printf("control %.4f, %s\n", rep.control_tv, rep.pass ? "PASS" : "FAIL");
  return kOk;
}

int cmd_verify(const Config& c) {
  const auto b = bundle_for(c, c.get("e_x0_sq", 0.0));
  const auto trials = c.get<std::uint64_t>("trials", 100000);
  const auto assume = sagald::verify_assumptions(c.problem, trials, b.good_x_radius, c.seed);
  const auto minor = sagald::verify_minorization(c.problem, b, trials, c.seed);
  json doc = provenance(c);
  doc["constants"] = sagald::to_json(b);
  doc["assumptions"] = sagald::to_json(assume);
  doc["minorization"] = sagald::to_json(minor);
  const bool ok = assume.lipschitz_ok && assume.dissip_ok && assume.m_hat_ok && minor.pass;
  doc["pass"] = ok;
  write_json(c, "verify.json", doc);
  std::printf("config_hash %s\n", c.hash.c_str());
  std::printf("lipschitz %s, dissipativity %s, |F_i(0)| %s, minorization %s\n",
              assume.lipschitz_ok ? "ok" : "FAIL", assume.dissip_ok ? "ok" : "FAIL",
              assume.m_hat_ok ? "ok" : "FAIL", minor.pass ? "ok" : "FAIL");
  if (!ok) {
    std::fprintf(stderr, "verification failed (min density ratio %s)\n",
                 sagald::format_double(minor.min_density_ratio).c_str());
    return kValidation;
  }
  return kOk;
}

void add_command_flags(const std::string& name, CLI::App* sub, Flags& f) {
  if (name == "sample") {
    f.add<std::vector<double>>(sub, "--x0", "x0", "initial point");
    f.add<double>(sub, "--x0-std", "x0_std", "Gaussian spread of X0 for moments");
    f.add<std::uint64_t>(sub, "--stride", "stride", "trajectory thinning");
    f.add<double>(sub, "--noise-scale", "noise_scale", "noise multiplier (0: noiseless)");
  } else if (name == "couple") {
    f.add<std::vector<double>>(sub, "--init-a", "init_a", "start of chain A");
    f.add<std::vector<double>>(sub, "--init-b", "init_b", "start of chain B");
    f.add<std::uint64_t>(sub, "--warmup", "warmup", "independent direct-chain warm-up steps");
    f.add<std::uint64_t>(sub, "--blocks", "blocks", "number of blocks k_max");
    f.add<std::uint64_t>(sub, "--trials", "trials", "minorization samples");
  } else if (name == "mixing") {
    f.add<std::vector<std::uint64_t>>(sub, "--lags", "lags", "lags");
    f.add<std::uint64_t>(sub, "--j", "j", "reference step");
    f.add<std::uint64_t>(sub, "--trials", "trials", "minorization samples");
  } else if (name == "lln") {
    f.add<std::string>(sub, "--phi", "phi", "observable, e.g. capped_sq:100");
    f.add<std::vector<std::uint64_t>>(sub, "--checkpoints", "checkpoints", "extra n");
    f.add<double>(sub, "--burn-in", "burn_in", "burn-in fraction");
  } else if (name == "tv") {
    f.add<std::vector<std::uint64_t>>(sub, "--checkpoints", "checkpoints", "steps n");
  } else if (name == "verify") {
    f.add<std::uint64_t>(sub, "--trials", "trials", "samples per check");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAGA Langevin sampler: runs, couplings and diagnostics"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::function<int(const Config&)>>> commands = {
      {"constants", cmd_constants}, {"sample", cmd_sample}, {"couple", cmd_couple},
      {"mixing", cmd_mixing},       {"lln", cmd_lln},       {"tv", cmd_tv},
      {"verify", cmd_verify}};
  const std::map<std::string, std::string> blurbs = {
      {"constants", "derived constants and ln beta"},
      {"sample", "trajectory and moment report"},
      {"couple", "coupled map chains, meeting probabilities"},
      {"mixing", "alpha-mixing estimate against the coupling bound"},
      {"lln", "ergodic averages of an observable"},
      {"tv", "TV distances between marginals"},
      {"verify", "check declared constants and the minorization"}};

  Flags flags;
  std::string config_path;
  std::vector<std::pair<CLI::App*, const std::function<int(const Config&)>*>> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, blurbs.at(name));
    add_common(sub, flags);
    add_command_flags(name, sub, flags);
    sub->add_option("--config", config_path, "JSON config; flags override it");
    subs.emplace_back(sub, &fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (const auto& [sub, fn] : subs) {
      if (!sub->parsed()) continue;
      json raw = config_path.empty() ? json::object() : load_config_file(config_path);
      flags.apply(raw);
      const Config cfg = resolve(sub->get_name(), raw);
      return (*fn)(cfg);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const SafetyRefusal& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return kSafety;
  } catch (const ValidationFailure& e) {
    std::fprintf(stderr, "validation failed: %s\n", e.what());
    return kValidation;
  } catch (const sagald::NumericOverflow& e) {
    std::fprintf(stderr, "numeric overflow: %s\n", e.what());
    return kOverflow;
  } catch (const sagald::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const sagald::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  }
  return kUsage;
}
