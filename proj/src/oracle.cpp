// Copyright 2026 The pdomd Authors
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

#include "pdomd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace pdomd {
namespace {

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

// Vertex of the set minimizing <g, v>.
Vector linear_minimizer(const DecisionSet& set, const Vector& g) {
  if (set.is_simplex()) {
    Index best = 0;
    g.minCoeff(&best);
    Vector v = Vector::Zero(g.size());
    v[best] = 1.0;
    return v;
  }
  Vector v(g.size());
  for (Index k = 0; k < g.size(); ++k) {
    v[k] = g[k] > 0.0 ? set.lower()[k] : set.upper()[k];
  }
  return v;
}

double frank_wolfe_gap(const DecisionSet& set, const Vector& x, const Vector& g) {
  return g.dot(x - linear_minimizer(set, g));
}

struct SmoothResult {
  Vector x;
  double value = 0.0;
  double gap = 0.0;  // Frank-Wolfe gap at x
  int iterations = 0;
};

enum class StopRule {
  // Frank-Wolfe gap, an upper bound on the suboptimality, below
  // tolerance * max(1, |value|).
  kGap,
  // Norm of the gradient mapping below tolerance.
  kGradientMapping,
};

// Accelerated projected gradient. Step sizes come from a local Lipschitz
// test on gradient differences and momentum restarts from the gradient
// mapping direction, so no function values are compared: that keeps the
// iteration moving long after value differences drop below rounding.
SmoothResult minimize_smooth(const DecisionSet& set, const Objective& value,
                             const Gradient& gradient, Vector start,
                             double tolerance, int max_iterations, StopRule rule) {
  Vector x = set.project(start);
  Vector gx = gradient(x);
  Vector y = x;
  Vector gy = gx;
  double momentum = 1.0;
  double lipschitz = 1.0;
  SmoothResult out;
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it;
    if (rule == StopRule::kGap) {
      out.gap = frank_wolfe_gap(set, x, gx);
      if (out.gap <= tolerance * std::max(1.0, std::abs(value(x)))) break;
    } else {
      const double mapping =
          lipschitz * (x - set.project(x - gx / lipschitz)).norm();
      if (mapping <= tolerance) break;
    }

    Vector z, gz;
    for (int tries = 0; tries < 200; ++tries) {
      z = set.project(y - gy / lipschitz);
      gz = gradient(z);
      const double moved = (z - y).norm();
      if (moved == 0.0 || (gz - gy).norm() <= lipschitz * moved * (1.0 + 1e-12)) break;
      lipschitz *= 2.0;
    }
    if (z == x && y == x) break;  // fixed point

    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if ((y - z).dot(z - x) > 0.0) {
      // The step reversed the momentum direction: restart.
      momentum = 1.0;
      y = z;
      gy = gz;
    } else {
      y = z + ((momentum - 1.0) / next) * (z - x);
      gy = gradient(y);
      momentum = next;
    }
    x = std::move(z);
    gx = std::move(gz);
    lipschitz *= 0.95;
  }
  if (rule == StopRule::kGradientMapping) out.gap = frank_wolfe_gap(set, x, gx);
  out.value = value(x);
  out.x = std::move(x);
  return out;
}

struct Lagrangian {
  const StaticProgram& program;
  Vector lambda;
  Vector eta;

  double value(const Vector& mu) const {
    double v = program.objective->value(mu);
    for (Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] != 0.0) v += lambda[i] * program.inequalities[i]->value(mu);
    }
    if (eta.size() > 0) {
      v += eta.dot(program.equality_matrix * mu - program.equality_targets);
    }
    return v;
  }
  Vector gradient(const Vector& mu) const {
    Vector g = program.objective->gradient(mu);
    for (Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] != 0.0) g += lambda[i] * program.inequalities[i]->gradient(mu);
    }
    if (eta.size() > 0) g += program.equality_matrix.transpose() * eta;
    return g;
  }
};

Vector inequality_values(const StaticProgram& program, const Vector& mu) {
  Vector g(program.num_inequalities());
  for (Index i = 0; i < g.size(); ++i) g[i] = program.inequalities[i]->value(mu);
  return g;
}

Vector equality_residual(const StaticProgram& program, const Vector& mu) {
  if (program.num_equalities() == 0) return Vector();
  return program.equality_matrix * mu - program.equality_targets;
}

void check_program(const StaticProgram& program) {
  require(program.objective != nullptr, "oracle: program has no objective");
  require(program.equality_matrix.rows() == program.equality_targets.size(),
          "oracle: equality matrix and targets disagree");
  require(program.num_equalities() == 0 ||
              program.equality_matrix.cols() == program.dimension(),
          "oracle: equality matrix width mismatch");
}

enum class AlmStatus { kConverged, kDiverged, kStalled };

struct AlmOutcome {
  AlmStatus status = AlmStatus::kStalled;
  HindsightResult result;
};

// Proximal augmented Lagrangian on a rescaled copy of the program: each
// constraint row is divided by its gradient size at the start point so that
// one penalty parameter fits all of them.
AlmOutcome augmented_lagrangian(const StaticProgram& program,
                                const OracleOptions& options) {
  check_program(program);
  const DecisionSet& set = program.set;
  const Index L = program.num_inequalities();
  const Index M = program.num_equalities();
  Vector mu = set.initial_point();

  Vector row_scale(L + M);
  for (Index i = 0; i < L; ++i) {
    row_scale[i] =
        1.0 / std::max(1.0, program.inequalities[i]->gradient(mu).norm());
  }
  for (Index j = 0; j < M; ++j) {
    row_scale[L + j] = 1.0 / std::max(1.0, program.equality_matrix.row(j).norm());
  }
  const double objective_scale =
      1.0 / std::max(1.0, program.objective->gradient(mu).norm());
  const double width = std::max(1.0, (set.upper() - set.lower()).maxCoeff());

  // Scaled multipliers.
  Vector lambda = Vector::Zero(L);
  Vector eta = Vector::Zero(M);
  double rho = 1.0;
  double tau = width;
  double previous_infeasibility = std::numeric_limits<double>::infinity();
  double inner_tolerance = 1e-2;

  AlmOutcome out;
  HindsightResult& result = out.result;
  for (int outer = 1; outer <= options.max_outer_iterations; ++outer) {
    const Vector center = mu;
    const auto penalized = [&](const Vector& x) {
      double v = objective_scale * program.objective->value(x);
      for (Index i = 0; i < L; ++i) {
        const double s = std::max(
            lambda[i] + rho * row_scale[i] * program.inequalities[i]->value(x), 0.0);
        v += (s * s - lambda[i] * lambda[i]) / (2.0 * rho);
      }
      if (M > 0) {
        const Vector r =
            row_scale.tail(M).cwiseProduct(equality_residual(program, x));
        v += eta.dot(r) + 0.5 * rho * r.squaredNorm();
      }
      return v + (x - center).squaredNorm() / (2.0 * tau);
    };
    const auto penalized_gradient = [&](const Vector& x) {
      Vector g = objective_scale * program.objective->gradient(x);
      for (Index i = 0; i < L; ++i) {
        const double s = std::max(
            lambda[i] + rho * row_scale[i] * program.inequalities[i]->value(x), 0.0);
        if (s > 0.0) g += s * row_scale[i] * program.inequalities[i]->gradient(x);
      }
      if (M > 0) {
        const Vector r =
            row_scale.tail(M).cwiseProduct(equality_residual(program, x));
        const Vector w = row_scale.tail(M).cwiseProduct(eta + rho * r);
        g += program.equality_matrix.transpose() * w;
      }
      return Vector(g + (x - center) / tau);
    };
    mu = minimize_smooth(set, penalized, penalized_gradient, mu, inner_tolerance,
                         options.max_inner_iterations, StopRule::kGradientMapping)
             .x;

    const Vector g = inequality_values(program, mu);
    const Vector r = equality_residual(program, mu);
    for (Index i = 0; i < L; ++i) {
      lambda[i] = std::max(lambda[i] + rho * row_scale[i] * g[i], 0.0);
    }
    if (M > 0) eta += rho * row_scale.tail(M).cwiseProduct(r);

    // Back to the original units.
    result.multipliers.lambda = lambda.cwiseProduct(row_scale.head(L)) / objective_scale;
    result.multipliers.eta = eta.cwiseProduct(row_scale.tail(M)) / objective_scale;
    result.mu = mu;
    result.value = program.objective->value(mu);
    result.inequality_residual = g.cwiseMax(0.0).norm();
    result.equality_residual = M > 0 ? r.norm() : 0.0;
    result.outer_iterations = outer;

    const Lagrangian lagrangian{program, result.multipliers.lambda,
                                result.multipliers.eta};
    const double scale = std::max(1.0, std::abs(result.value));
    // Displacement of a projected gradient step on the scaled Lagrangian.
    const double stationarity =
        (mu - set.project(mu - objective_scale * lagrangian.gradient(mu))).norm();
    const double complementarity =
        L > 0 ? std::abs(result.multipliers.lambda.dot(g)) / scale : 0.0;
    result.kkt_residual =
        std::max({result.inequality_residual, result.equality_residual,
                  stationarity, complementarity});

    if (result.multipliers.norm() > options.divergence_norm) {
      out.status = AlmStatus::kDiverged;
      return out;
    }
    if (result.kkt_residual <= options.kkt_tolerance) {
      out.status = AlmStatus::kConverged;
      return out;
    }
    const double infeasibility =
        std::max(result.inequality_residual, result.equality_residual);
    if (infeasibility > options.kkt_tolerance &&
        infeasibility > 0.25 * previous_infeasibility) {
      rho = std::min(rho * 4.0, 1e8);
    }
    previous_infeasibility = infeasibility;
    tau = std::min(tau * 2.0, 1e4 * width);
    inner_tolerance = std::max(
        1e-13, std::min(0.1 * inner_tolerance, 1e-2 * result.kkt_residual));
  }
  out.status = AlmStatus::kStalled;
  return out;
}

class AveragedFunction final : public ConvexFunction {
 public:
  AveragedFunction(std::shared_ptr<const std::vector<std::unique_ptr<SlotRealization>>> slots,
                   Index inequality)
      : slots_(std::move(slots)), inequality_(inequality) {}

  double value(const Vector& mu) const override {
    double total = 0.0;
    for (const auto& slot : *slots_) {
      total += inequality_ < 0 ? slot->objective(mu) : slot->inequality(inequality_, mu);
    }
    return total / static_cast<double>(slots_->size());
  }
  Vector gradient(const Vector& mu) const override {
    Vector total = Vector::Zero(mu.size());
    for (const auto& slot : *slots_) {
      total += inequality_ < 0 ? slot->objective_gradient(mu)
                               : slot->inequality_gradient(inequality_, mu);
    }
    return total / static_cast<double>(slots_->size());
  }

 private:
  std::shared_ptr<const std::vector<std::unique_ptr<SlotRealization>>> slots_;
  Index inequality_;
};

}  // namespace

double DualPoint::norm() const { return std::sqrt(lambda.squaredNorm() + eta.squaredNorm()); }

Vector DualPoint::stacked() const {
  Vector x(size());
  x << lambda, eta;
  return x;
}

DualPoint DualPoint::unstack(const Vector& x, Index num_inequalities) {
  require(num_inequalities >= 0 && num_inequalities <= x.size(),
          "DualPoint: bad split");
  return {x.head(num_inequalities), x.tail(x.size() - num_inequalities)};
}

HindsightResult hindsight_optimum(const StaticProgram& program,
                                  const OracleOptions& options) {
  const AlmOutcome outcome = augmented_lagrangian(program, options);
  switch (outcome.status) {
    case AlmStatus::kConverged:
      return outcome.result;
    case AlmStatus::kDiverged:
      throw InfeasibleError(
          "hindsight_optimum: penalized residual does not vanish (residual " +
          std::to_string(std::max(outcome.result.inequality_residual,
                                  outcome.result.equality_residual)) +
          "); the program looks infeasible");
    case AlmStatus::kStalled:
      break;
  }
  throw RuntimeError("hindsight_optimum: KKT residual stalled at " +
                     std::to_string(outcome.result.kkt_residual));
}

HindsightResult hindsight_optimum(const Problem& problem, std::size_t t,
                                  std::size_t k, const OracleOptions& options) {
  if (problem.has_exact_means()) {
    return hindsight_optimum(problem.static_program(t, k), options);
  }
  HindsightResult result = hindsight_optimum(
      sample_average_program(problem, t, k, std::max<std::size_t>(k, 1000), 0),
      options);
  result.estimated = true;
  return result;
}

StaticProgram sample_average_program(const Problem& problem, std::size_t t,
                                     std::size_t k, std::size_t draws,
                                     std::uint64_t seed) {
  require(k > 0 && draws > 0, "sample_average_program: empty window");
  auto slots = std::make_shared<std::vector<std::unique_ptr<SlotRealization>>>();
  Rng rng(seed);
  Matrix equality = Matrix::Zero(problem.num_equalities(), problem.dimension());
  for (std::size_t n = 0; n < draws; ++n) {
    slots->push_back(problem.sample(t + n % k, rng));
    if (equality.rows() > 0) equality += slots->back()->equality_vectors();
  }
  equality /= static_cast<double>(draws);
  std::shared_ptr<const std::vector<std::unique_ptr<SlotRealization>>> shared = slots;
  StaticProgram program{problem.set(), std::make_shared<AveragedFunction>(shared, -1),
                        {}, equality, problem.targets()};
  for (Index i = 0; i < problem.num_inequalities(); ++i) {
    program.inequalities.push_back(std::make_shared<AveragedFunction>(shared, i));
  }
  return program;
}

DualEvaluation evaluate_dual(const StaticProgram& program, const DualPoint& point,
                             const OracleOptions& options) {
  check_program(program);
  require(point.lambda.size() == program.num_inequalities() &&
              point.eta.size() == program.num_equalities(),
          "dual_function: dual point has the wrong size");
  require((point.lambda.array() >= 0.0).all(),
          "dual_function: lambda must be nonnegative");
  const Lagrangian lagrangian{program, point.lambda, point.eta};
  DualEvaluation out;

  if (program.is_linear()) {
    // Exact: minimize the combined linear form over a vertex or clip.
    const Vector mu0 = Vector::Zero(program.dimension());
    const Vector c = lagrangian.gradient(mu0);
    out.argmin = linear_minimizer(program.set, c);
    out.value = lagrangian.value(out.argmin);
    return out;
  }
  const SmoothResult inner = minimize_smooth(
      program.set, [&](const Vector& x) { return lagrangian.value(x); },
      [&](const Vector& x) { return lagrangian.gradient(x); },
      program.set.initial_point(), options.inner_gap_tolerance,
      options.max_inner_iterations, StopRule::kGap);
  out.value = inner.value;
  out.argmin = inner.x;
  out.inner_gap = inner.gap;
  return out;
}

double dual_function(const StaticProgram& program, const DualPoint& point,
                     const OracleOptions& options) {
  return evaluate_dual(program, point, options).value;
}

double dual_function(const Problem& problem, std::size_t t, std::size_t k,
                     const DualPoint& point, const OracleOptions& options) {
  return dual_function(problem.static_program(t, k), point, options);
}

MultiplierEstimate estimate_multipliers(const StaticProgram& program,
                                        const OracleOptions& options) {
  OracleOptions tight = options;
  tight.kkt_tolerance = std::min(options.kkt_tolerance, 1e-2 * options.dual_gap_tolerance);
  const AlmOutcome outcome = augmented_lagrangian(program, tight);
  if (outcome.status == AlmStatus::kDiverged) {
    throw DivergenceError(
        "estimate_multipliers: multiplier norm exceeded " +
        std::to_string(options.divergence_norm) +
        "; SELM is likely violated or the multipliers are unbounded");
  }
  if (outcome.status == AlmStatus::kStalled) {
    throw RuntimeError("estimate_multipliers: dual ascent stalled");
  }
  MultiplierEstimate out;
  out.point = outcome.result.multipliers;
  out.bound = out.point.norm();
  out.primal_value = outcome.result.value;
  out.dual_value = dual_function(program, out.point, options);
  out.gap = out.primal_value - out.dual_value;
  if (out.gap > options.dual_gap_tolerance * std::max(1.0, std::abs(out.primal_value))) {
    throw RuntimeError("estimate_multipliers: duality gap " +
                       std::to_string(out.gap) + " above tolerance");
  }
  return out;
}

MultiplierEstimate estimate_multipliers(const Problem& problem, std::size_t t,
                                        std::size_t k,
                                        const OracleOptions& options) {
  return estimate_multipliers(problem.static_program(t, k), options);
}

WeakEbcEstimate weak_ebc_probe(const StaticProgram& program,
                               const MultiplierEstimate& optimum,
                               std::size_t samples,
                               const std::vector<double>& radius_grid,
                               std::uint64_t seed, const OracleOptions& options) {
  require(!radius_grid.empty(), "weak_ebc_probe: empty radius grid");
  for (double r : radius_grid) {
    require(r > 0.0 && std::isfinite(r), "weak_ebc_probe: radii must be positive");
  }
  WeakEbcEstimate out;
  out.radii = radius_grid;
  std::sort(out.radii.begin(), out.radii.end());
  out.min_ratio.assign(out.radii.size(), std::numeric_limits<double>::infinity());

  const Index L = program.num_inequalities();
  const Vector center = optimum.point.stacked();
  const Index n = center.size();
  if (n == 0) return out;

  Rng rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < out.radii.size(); ++r) {
    for (std::size_t s = 0; s < samples; ++s) {
      Vector direction(n);
      for (Index i = 0; i < n; ++i) direction[i] = normal(rng);
      Vector x = center + out.radii[r] * direction / direction.norm();
      x.head(L) = x.head(L).cwiseMax(0.0);
      const double dist = (x - center).norm();
      if (dist < 1e-12) {
        ++out.excluded;
        continue;
      }
      const double q = dual_function(program, DualPoint::unstack(x, L), options);
      out.min_ratio[r] = std::min(out.min_ratio[r], (optimum.dual_value - q) / dist);
    }
  }

  // Smallest l0 whose tail of radii has a positive worst-case ratio.
  double tail = std::numeric_limits<double>::infinity();
  out.l0 = out.radii.back();
  for (std::size_t r = out.radii.size(); r-- > 0;) {
    tail = std::min(tail, out.min_ratio[r]);
    if (!(tail > 0.0)) break;
    out.l0 = out.radii[r];
    out.c0 = std::isfinite(tail) ? tail : 0.0;
  }
  return out;
}

WeakEbcEstimate weak_ebc_probe(const Problem& problem, std::size_t t,
                               std::size_t k, std::size_t samples,
                               const std::vector<double>& radius_grid,
                               std::uint64_t seed, const OracleOptions& options) {
  const StaticProgram program = problem.static_program(t, k);
  return weak_ebc_probe(program, estimate_multipliers(program, options), samples,
                        radius_grid, seed, options);
}

}  // namespace pdomd
