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

#include "sagald/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sagald/error.hpp"
#include "sagald/rng.hpp"

namespace sagald {
namespace {

void check_component(std::size_t dim, const Component& c) {
  std::visit(
      [dim](const auto& comp) {
        using T = std::decay_t<decltype(comp)>;
        if constexpr (std::is_same_v<T, AffineComponent>) {
          if (comp.matrix.size() != dim * dim || comp.offset.size() != dim)
            throw InvalidArgument("affine component has wrong shape");
        } else {
          if (comp.direction.size() != dim)
            throw InvalidArgument("tanh-well direction has wrong dimension");
          if (!std::isfinite(comp.amplitude))
            throw InvalidArgument("tanh-well amplitude must be finite");
        }
      },
      c);
}

void check_x(const Problem& problem, std::span<const double> x) {
  if (x.size() != problem.dim())
    throw InvalidArgument("state has dimension " + std::to_string(x.size()) +
                          ", problem has " + std::to_string(problem.dim()));
}

// Uniform point in the ball of the given radius.
Vector ball_point(CounterStream& rng, std::size_t dim, double radius) {
  Vector p(dim);
  rng.fill_unit_ball(p);
  for (double& v : p) v *= radius;
  return p;
}

}  // namespace

Problem::Problem(std::size_t dim, std::vector<Component> components,
                 double lipschitz, double m_hat, double c1, double c2)
    : dim_(dim),
      components_(std::move(components)),
      lipschitz_(lipschitz),
      m_hat_(m_hat),
      c1_(c1),
      c2_(c2) {
  if (dim_ == 0) throw InvalidArgument("dimension must be positive");
  if (components_.empty()) throw InvalidArgument("need at least one component");
  for (const auto& c : components_) check_component(dim_, c);
  if (!(lipschitz_ >= 1.0)) throw InvalidArgument("lipschitz constant M must be >= 1");
  if (!(m_hat_ >= 0.0)) throw InvalidArgument("m_hat must be >= 0");
  if (!(c1_ > 0.0)) throw InvalidArgument("c1 must be > 0");
  if (!(c2_ > 0.0 && c2_ <= 1.0)) throw InvalidArgument("c2 must lie in (0, 1]");
}

void Problem::eval_into(std::size_t i, std::span<const double> x,
                        std::span<double> out) const {
  std::visit(
      [&](const auto& comp) {
        using T = std::decay_t<decltype(comp)>;
        if constexpr (std::is_same_v<T, AffineComponent>) {
          for (std::size_t r = 0; r < dim_; ++r) {
            double acc = comp.offset[r];
            for (std::size_t c = 0; c < dim_; ++c)
              acc += comp.matrix[r * dim_ + c] * x[c];
            out[r] = acc;
          }
        } else {
          const double pull =
              comp.amplitude * std::tanh(dot(x, comp.direction));
          for (std::size_t r = 0; r < dim_; ++r)
            out[r] = x[r] - pull * comp.direction[r];
        }
      },
      components_[i]);
}

Vector mean_drift(const Problem& problem, std::span<const double> x) {
  check_x(problem, x);
  const std::size_t d = problem.dim();
  Vector sum(d, 0.0);
  Vector term(d);
  for (std::size_t i = 0; i < problem.count(); ++i) {
    problem.eval_into(i, x, term);
    for (std::size_t k = 0; k < d; ++k) sum[k] += term[k];
  }
  const double n = static_cast<double>(problem.count());
  for (double& v : sum) v /= n;
  return sum;
}

Vector component_eval(const Problem& problem, std::size_t i,
                      std::span<const double> x) {
  if (i >= problem.count())
    throw InvalidArgument("component index " + std::to_string(i) +
                          " out of range [0, " +
                          std::to_string(problem.count()) + ")");
  check_x(problem, x);
  Vector out(problem.dim());
  problem.eval_into(i, x, out);
  return out;
}

AssumptionReport verify_assumptions(const Problem& problem,
                                    std::size_t sample_count, double radius,
                                    std::uint64_t seed) {
  if (sample_count == 0) throw InvalidArgument("sample_count must be >= 1");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be > 0");

  const std::size_t d = problem.dim();
  AssumptionReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  Vector zero(d, 0.0), fx(d), fy(d);
  for (std::size_t i = 0; i < problem.count(); ++i) {
    problem.eval_into(i, zero, fx);
    rep.max_norm_at_zero = std::max(rep.max_norm_at_zero, norm(fx));
  }
  rep.m_hat_ok = rep.max_norm_at_zero <= problem.m_hat();

  for (std::size_t n = 0; n < sample_count; ++n) {
    CounterStream rng(seed, n, 0, StreamTag::kAux);
    const Vector x = ball_point(rng, d, radius);
    const Vector y = ball_point(rng, d, radius);
    Vector diff(d);
    for (std::size_t k = 0; k < d; ++k) diff[k] = x[k] - y[k];
    const double dist = norm(diff);
    if (dist > 0.0) {
      for (std::size_t i = 0; i < problem.count(); ++i) {
        problem.eval_into(i, x, fx);
        problem.eval_into(i, y, fy);
        for (std::size_t k = 0; k < d; ++k) diff[k] = fx[k] - fy[k];
        rep.worst_ratio = std::max(rep.worst_ratio, norm(diff) / dist);
      }
    }
    const Vector drift = mean_drift(problem, x);
    const double margin =
        dot(drift, x) - problem.c2() * norm_sq(x) + problem.c1();
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  // Difference quotients carry a few ulps of rounding.
  rep.lipschitz_ok = rep.worst_ratio <= problem.lipschitz() * (1.0 + 1e-12);
  rep.dissip_ok = rep.worst_margin >= 0.0;
  return rep;
}

Problem lin_1d() {
  return Problem(1,
                 {AffineComponent{{2.0}, {-1.0}}, AffineComponent{{1.0}, {1.0}}},
                 2.0, 1.0, 0.01, 1.0);
}

Problem micro_1d() {
  return Problem(1,
                 {AffineComponent{{1.0}, {0.1}}, AffineComponent{{1.0}, {-0.1}}},
                 1.0, 0.1, 0.01, 1.0);
}

Problem well_2d() {
  // Directions at 0, 90, 45 and 135 degrees. The Jacobian of each component
  // has eigenvalues 1 and 1 - 3 sech^2, so the true modulus is 2 <= M = 4.
  const double h = std::sqrt(0.5);
  const std::vector<Vector> dirs = {{1.0, 0.0}, {0.0, 1.0}, {h, h}, {-h, h}};
  std::vector<Component> comps;
  for (const auto& u : dirs) comps.emplace_back(TanhWellComponent{u, 3.0});
  return Problem(2, std::move(comps), 4.0, 0.0, 4.5, 0.5);
}

std::vector<std::string> builtin_names() {
  return {"lin-1d", "micro-1d", "well-2d"};
}

Problem builtin_problem(std::string_view name) {
  if (name == "lin-1d") return lin_1d();
  if (name == "micro-1d") return micro_1d();
  if (name == "well-2d") return well_2d();
  throw InvalidArgument("unknown built-in problem '" + std::string(name) + "'");
}

nlohmann::json to_json(const Problem& problem) {
  nlohmann::json comps = nlohmann::json::array();
  const std::size_t d = problem.dim();
  for (const auto& c : problem.components()) {
    std::visit(
        [&](const auto& comp) {
          using T = std::decay_t<decltype(comp)>;
          if constexpr (std::is_same_v<T, AffineComponent>) {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t r = 0; r < d; ++r)
              rows.push_back(std::vector<double>(
                  comp.matrix.begin() + static_cast<std::ptrdiff_t>(r * d),
                  comp.matrix.begin() + static_cast<std::ptrdiff_t>((r + 1) * d)));
            comps.push_back({{"kind", "affine"},
                             {"params", {{"matrix", rows}, {"offset", comp.offset}}}});
          } else {
            comps.push_back(
                {{"kind", "tanh-well"},
                 {"params",
                  {{"direction", comp.direction}, {"amplitude", comp.amplitude}}}});
          }
        },
        c);
  }
  return {{"dim", d},
          {"count", problem.count()},
          {"components", comps},
          {"lipschitz", problem.lipschitz()},
          {"m_hat", problem.m_hat()},
          {"c1", problem.c1()},
          {"c2", problem.c2()}};
}

Problem problem_from_json(const nlohmann::json& doc) {
  try {
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto count = doc.at("count").get<std::size_t>();
    std::vector<Component> comps;
    for (const auto& c : doc.at("components")) {
      const auto kind = c.at("kind").get<std::string>();
      const auto& p = c.at("params");
      if (kind == "affine") {
        AffineComponent a;
        for (const auto& row : p.at("matrix"))
          for (const auto& v : row) a.matrix.push_back(v.get<double>());
        a.offset = p.at("offset").get<Vector>();
        comps.emplace_back(std::move(a));
      } else if (kind == "tanh-well") {
        comps.emplace_back(TanhWellComponent{p.at("direction").get<Vector>(),
                                             p.at("amplitude").get<double>()});
      } else {
        throw InvalidArgument("unknown component kind '" + kind + "'");
      }
    }
    if (comps.size() != count)
      throw InvalidArgument("'count' does not match number of components");
    return Problem(dim, std::move(comps), doc.at("lipschitz").get<double>(),
                   doc.at("m_hat").get<double>(), doc.at("c1").get<double>(),
                   doc.at("c2").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed problem document: ") + e.what());
  }
}

Problem resolve_problem(std::string_view name_or_json) {
  const auto first = name_or_json.find_first_not_of(" \t\n");
  if (first != std::string_view::npos && name_or_json[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(name_or_json);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("problem JSON does not parse: ") + e.what());
    }
    return problem_from_json(doc);
  }
  return builtin_problem(name_or_json);
}

}  // namespace sagald
