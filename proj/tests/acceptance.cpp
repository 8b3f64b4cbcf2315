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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "pdomd/engine.hpp"
#include "pdomd/experiment.hpp"
#include "pdomd/geometry.hpp"
#include "pdomd/oracle.hpp"
#include "pdomd/synthetic.hpp"
#include "pdomd/telemetry.hpp"
#include "pdomd/text.hpp"

namespace {

using namespace pdomd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Vector gaussian(Index d, double scale, Rng& rng) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

Index random_dimension(Rng& rng) { return std::uniform_int_distribution<Index>(2, 10)(rng); }

Vector interior_simplex(Index d, Rng& rng) {
  return mix_toward_uniform(DecisionSet::simplex(d).sample_uniform(rng), 0.01);
}

double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// ---- 1: geometry ----------------------------------------------------------

Outcome geometry_suite() {
  Outcome out;
  const auto euclid = BregmanGeometry::euclidean();
  const auto entropy = BregmanGeometry::negative_entropy();
  constexpr int kInstances = 1000;
  Rng rng(101);

  int pinsker = 0, convexity = 0, pushback = 0, mixing = 0, prox = 0;
  double worst_prox = 0.0;
  for (int n = 0; n < kInstances; ++n) {
    const Index d = random_dimension(rng);
    const DecisionSet simplex = DecisionSet::simplex(d);
    const Vector p = interior_simplex(d, rng);
    const Vector q = interior_simplex(d, rng);
    const double l1 = (p - q).lpNorm<1>();
    pinsker += bregman_divergence(entropy, p, q) >= 0.5 * l1 * l1 - 1e-12;

    bool convex_ok = true;
    for (const auto& g : {euclid, entropy}) {
      const double norm = g.primal_norm(p - q);
      convex_ok &= bregman_divergence(g, p, q) >= 0.5 * g.modulus() * norm * norm - 1e-12;
    }
    convexity += convex_ok;

    const Vector z = simplex.sample_uniform(rng);
    const Vector c = gaussian(d, 2.0, rng);
    const double alpha = uniform(0.1, 10.0, rng);
    const DecisionSet box = DecisionSet::box(Vector::Zero(d), Vector::Constant(d, 30.0));
    pushback += pushback_check(entropy, simplex, c, p, alpha, z).residual >= -1e-9 &&
                pushback_check(euclid, box, 10.0 * c, box.sample_uniform(rng), alpha,
                               box.sample_uniform(rng))
                        .residual >= -1e-9;

    const double theta = uniform(1e-4, 0.99, rng);
    const Vector mixed = mix_toward_uniform(q, theta);
    const double dd = static_cast<double>(d);
    mixing += bregman_divergence(entropy, z, mixed) - bregman_divergence(entropy, z, q) <=
                  theta * std::log(dd) + 1e-9 &&
              bregman_divergence(entropy, z, mixed) <= std::log(dd / theta) + 1e-9;

    const Vector lo = gaussian(d, 1.0, rng);
    const DecisionSet rbox = DecisionSet::box(lo, lo + gaussian(d, 1.0, rng).cwiseAbs());
    const Vector y = rbox.sample_uniform(rng);
    const double e1 = (mirror_step(entropy, simplex, p, c, alpha) -
                       numeric_prox_step(entropy, simplex, p, c, alpha))
                          .lpNorm<Eigen::Infinity>();
    const double e2 = (euclidean_box_step(y, c, alpha, rbox) -
                       numeric_prox_step(euclid, rbox, y, c, alpha))
                          .lpNorm<Eigen::Infinity>();
    worst_prox = std::max({worst_prox, e1, e2});
    prox += e1 <= 1e-8 && e2 <= 1e-8;
  }
  out.require(pinsker == kInstances, "pinsker");
  out.require(convexity == kInstances, "strong convexity");
  out.require(pushback == kInstances, "pushback");
  out.require(mixing == kInstances, "mixing bounds");
  out.require(prox == kInstances, "prox agreement");
  out.note(std::to_string(kInstances) + " instances per property, worst prox gap " +
           num(worst_prox));
  return out;
}

// ---- 2: engine algebra ----------------------------------------------------

Outcome engine_suite() {
  Outcome out;
  SyntheticOptions box;
  box.set_kind = DecisionSet::Kind::kBox;
  const auto problem = build_synthetic_problem(8, 2, 2, 1, box);
  const std::size_t T = 1600;
  const AlgorithmParams params = parameter_schedule(T, Variant::kGeneral);

  double worst_q = 0.0, worst_margin = 0.0, drift_sum = 0.0, final_sq = 0.0;
  RunOptions options;
  options.on_slot = [&](const PrimalDualMirrorDescent& engine, const StepOutcome& s,
                        const Observation&) {
    worst_q = std::min(worst_q, engine.duals().Q.minCoeff());
    worst_margin = std::min(worst_margin, s.lower_bound_margin);
    drift_sum += s.drift;
    final_sq = engine.duals().squared_norm();
  };
  const RunRecord record = run(*problem, T, params, 3, Variant::kGeneral, options);
  const double telescoping = std::abs(drift_sum - 0.5 * final_sq) / std::max(1.0, final_sq);
  out.require(worst_q >= 0.0, "dual nonnegativity");
  out.require(worst_margin >= -1e-9, "per-step lower bound");
  out.require(telescoping <= 1e-6, "drift telescoping");

  DppAuditOptions audit;
  audit.samples = 100;
  const DppAuditResult a = dpp_audit(record, *problem, audit);
  out.require(a.checked == 100 && a.worst_residual <= 1e-6, "DPP audit");
  out.note("min Q " + num(worst_q) + ", min margin " + num(worst_margin) +
           ", telescoping error " + num(telescoping) + ", worst DPP residual " +
           num(a.worst_residual));
  return out;
}

// ---- 3 and 4: rates and dual boundedness ----------------------------------

RateReport rate_sweep() {
  const nlohmann::json j = {{"scenario", "synthetic"},
                            {"T", {100, 400, 1600, 6400}},
                            {"seeds", "0..19"},
                            {"variant", "simplex"},
                            {"synthetic",
                             {{"dimension", 10}, {"inequalities", 2}, {"equalities", 2},
                              {"problem_seed", 0}, {"set", "simplex"}}}};
  return sweep_rates(parse_config(j));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

Outcome rate_check(const RateReport& r) {
  Outcome out;
  std::vector<double> ineq, eq, regret;
  for (const RatePoint& p : r.points) {
    regret.push_back(p.regret.mean);
    ineq.push_back(p.inequality_violation.mean);
    eq.push_back(p.equality_violation.mean);
  }
  out.require(r.expected, "expected-form metrics");
  out.require(!r.regret.degenerate && r.regret.slope >= 0.3 && r.regret.slope <= 0.65,
              "regret slope in [0.3, 0.65]");
  out.require(strictly_decreasing(ineq), "inequality violation decreasing");
  out.require(strictly_decreasing(eq), "equality violation decreasing");
  out.require(!r.scaled_inequality.degenerate && r.scaled_inequality.slope <= 0.65,
              "T * inequality violation slope <= 0.65");
  out.require(!r.scaled_equality.degenerate && r.scaled_equality.slope <= 0.65,
              "T * equality violation slope <= 0.65");
  std::string means = "regret";
  for (double v : regret) means += " " + num(v);
  out.note(means);
  out.note("regret slope " + num(r.regret.slope) + " [" + num(r.regret.ci_low) + ", " +
           num(r.regret.ci_high) + "]");
  out.note("T*ineq slope " + (r.scaled_inequality.degenerate ? std::string("degenerate")
                                                             : num(r.scaled_inequality.slope)));
  out.note("T*eq slope " + (r.scaled_equality.degenerate ? std::string("degenerate")
                                                         : num(r.scaled_equality.slope)));
  return out;
}

Outcome dual_check(const RateReport& r) {
  Outcome out;
  std::string ratios = "max |(Q,H)|/sqrt(T):";
  for (std::size_t i = 0; i < r.dual_norm_ratio.size(); ++i) {
    ratios += " " + num(r.dual_norm_ratio[i]);
    if (i > 0) {
      out.require(r.dual_norm_ratio[i] <= 1.5 * r.dual_norm_ratio[i - 1],
                  "growth at T=" + std::to_string(r.points[i].horizon));
    }
  }
  out.note(ratios);
  return out;
}

// ---- 5: oracle ------------------------------------------------------------

class Quadratic final : public ConvexFunction {
 public:
  Quadratic(Vector a, Vector c, double offset = 0.0)
      : a_(std::move(a)), c_(std::move(c)), offset_(offset) {}
  double value(const Vector& mu) const override {
    return 0.5 * (mu - a_).squaredNorm() + c_.dot(mu) + offset_;
  }
  Vector gradient(const Vector& mu) const override { return mu - a_ + c_; }

 private:
  Vector a_, c_;
  double offset_;
};

StaticProgram make_program(DecisionSet set, std::shared_ptr<const ConvexFunction> f,
                           std::vector<std::shared_ptr<const ConvexFunction>> g,
                           Matrix A, Vector b) {
  return {std::move(set), std::move(f), std::move(g), std::move(A), std::move(b)};
}

DualPoint random_dual(Index L, Index M, Rng& rng) {
  DualPoint p{gaussian(L, 2.0, rng).cwiseAbs(), gaussian(M, 2.0, rng)};
  return p;
}

// Weak duality and concavity on 100 random points/triples each.
bool duality_properties(const StaticProgram& prog, double optimum, Rng& rng) {
  const Index L = prog.num_inequalities();
  const Index M = prog.num_equalities();
  for (int n = 0; n < 100; ++n) {
    if (dual_function(prog, random_dual(L, M, rng)) > optimum + 1e-8) return false;
  }
  for (int n = 0; n < 100; ++n) {
    const Vector x = random_dual(L, M, rng).stacked();
    const Vector y = random_dual(L, M, rng).stacked();
    const double s = uniform(0.0, 1.0, rng);
    const double mid = dual_function(prog, DualPoint::unstack(s * x + (1 - s) * y, L));
    const double chord = s * dual_function(prog, DualPoint::unstack(x, L)) +
                         (1 - s) * dual_function(prog, DualPoint::unstack(y, L));
    if (mid < chord - 1e-8) return false;
  }
  return true;
}

// Grid search for min <c, mu> on the 4-simplex with <a, mu> <= e and
// <h, mu> = b. Two passes: a 2-D grid over (mu0, mu1) at step 1e-3, and a fine
// walk over mu0 along each edge family where one more row is tight (mu2 = 0,
// mu3 = 0 or the inequality), so that vertices off the coarse grid are hit.
double grid_lp4(const Vector& c, const Vector& a, double e, const Vector& h, double b) {
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vector& mu) {
    if (mu.minCoeff() < -1e-12 || a.dot(mu) - e > 1e-12) return;
    best = std::min(best, c.dot(mu));
  };
  const double det = h[3] - h[2];
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; i + j <= 1000; ++j) {
      const double m0 = i * 1e-3, m1 = j * 1e-3;
      const double s = 1.0 - m0 - m1;
      const double m3 = (b - h[0] * m0 - h[1] * m1 - h[2] * s) / det;
      Vector mu(4);
      mu << m0, m1, s - m3, m3;
      consider(mu);
    }
  }
  for (int row = 0; row < 3; ++row) {
    for (int i = 0; i <= 100000; ++i) {
      const double m0 = i * 1e-5;
      Matrix K(3, 3);
      Vector rhs(3);
      K.row(0) << 1, 1, 1;
      K.row(1) << h[1], h[2], h[3];
      rhs[0] = 1.0 - m0;
      rhs[1] = b - h[0] * m0;
      if (row < 2) {
        K.row(2) = Vector::Unit(3, row + 1).transpose();
        rhs[2] = 0.0;
      } else {
        K.row(2) << a[1], a[2], a[3];
        rhs[2] = e - a[0] * m0;
      }
      const Eigen::FullPivLU<Matrix> lu(K);
      if (!lu.isInvertible()) continue;
      const Vector rest = lu.solve(rhs);
      Vector mu(4);
      mu << m0, rest;
      consider(mu);
    }
  }
  return best;
}

Outcome oracle_suite() {
  Outcome out;
  Rng rng(505);
  int instances = 0, duality_ok = 0, feasible_ok = 0, grid_ok = 0, grid_total = 0;
  double worst_feasibility = 0.0, worst_grid = 0.0;

  const auto record = [&](const StaticProgram& prog, const HindsightResult& h) {
    ++instances;
    duality_ok += duality_properties(prog, h.value, rng);
    const double residual = std::max(h.inequality_residual, h.equality_residual);
    worst_feasibility = std::max(worst_feasibility, residual);
    feasible_ok += residual <= 1e-6;
  };
  const auto compare = [&](double oracle, double grid) {
    ++grid_total;
    worst_grid = std::max(worst_grid, std::abs(oracle - grid));
    grid_ok += std::abs(oracle - grid) <= 1e-3;
  };

  // Synthetic windows.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = build_synthetic_problem(10, 2, 2, seed);
    const StaticProgram prog = p->static_program(seed * 13, 50);
    record(prog, hindsight_optimum(prog));
  }

  // d = 4 simplex LPs with one inequality and one equality.
  for (int n = 0; n < 5; ++n) {
    const Vector c = gaussian(4, 1.0, rng), a = gaussian(4, 1.0, rng), h = gaussian(4, 1.0, rng);
    const Vector anchor = Vector::Constant(4, 0.25);
    const double e = a.dot(anchor) + 0.05, b = h.dot(anchor);
    Matrix A = h.transpose();
    Vector bv(1);
    bv << b;
    const StaticProgram prog =
        make_program(DecisionSet::simplex(4), std::make_shared<AffineFunction>(c, 0.0),
                     {std::make_shared<AffineFunction>(a, -e)}, A, bv);
    const HindsightResult r = hindsight_optimum(prog);
    record(prog, r);
    compare(r.value, grid_lp4(c, a, e, h, b));
  }

  // d = 3 simplex LPs with one equality: the feasible set is a segment.
  for (int n = 0; n < 5; ++n) {
    const Vector c = gaussian(3, 1.0, rng), a = gaussian(3, 1.0, rng), h = gaussian(3, 1.0, rng);
    const Vector anchor = Vector::Constant(3, 1.0 / 3.0);
    const double e = a.dot(anchor) + 0.05, b = h.dot(anchor);
    Matrix A = h.transpose();
    Vector bv(1);
    bv << b;
    const StaticProgram prog =
        make_program(DecisionSet::simplex(3), std::make_shared<AffineFunction>(c, 0.0),
                     {std::make_shared<AffineFunction>(a, -e)}, A, bv);
    const HindsightResult r = hindsight_optimum(prog);
    record(prog, r);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000000; ++i) {
      const double m0 = i * 1e-6;
      const double m2 = (b - h[0] * m0 - h[1] * (1.0 - m0)) / (h[2] - h[1]);
      Vector mu(3);
      mu << m0, 1.0 - m0 - m2, m2;
      if (mu.minCoeff() < 0.0 || a.dot(mu) > e) continue;
      best = std::min(best, c.dot(mu));
    }
    compare(r.value, best);
  }

  // d = 2 quadratic programs on the unit box with a curved inequality.
  for (int n = 0; n < 5; ++n) {
    const Vector target = gaussian(2, 0.8, rng).array() + 0.5;
    const Vector lin = gaussian(2, 0.3, rng);
    const auto f = std::make_shared<Quadratic>(target, lin);
    const auto g = std::make_shared<Quadratic>(Vector::Zero(2), Vector::Zero(2), -0.3);
    const StaticProgram prog =
        make_program(DecisionSet::box(Vector::Zero(2), Vector::Ones(2)), f, {g},
                     Matrix(0, 2), Vector(0));
    const HindsightResult r = hindsight_optimum(prog);
    record(prog, r);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
      for (int j = 0; j <= 1000; ++j) {
        Vector mu(2);
        mu << i * 1e-3, j * 1e-3;
        if (g->value(mu) > 0.0) continue;
        best = std::min(best, f->value(mu));
      }
    }
    compare(r.value, best);
  }

  out.require(duality_ok == instances, "weak duality / concavity");
  out.require(feasible_ok == instances, "hindsight feasibility");
  out.require(grid_ok == grid_total, "grid agreement");
  out.note(std::to_string(instances) + " instances, worst feasibility residual " +
           num(worst_feasibility) + ", " + std::to_string(grid_total) +
           " grid comparisons, worst gap " + num(worst_grid));
  return out;
}

// ---- 6: datacenter --------------------------------------------------------

const FigureSeries& figure(const ExperimentResult& r, const std::string& name) {
  for (const FigureSeries& f : r.figures) {
    if (f.name == name) return f;
  }
  throw RuntimeError("missing figure " + name);
}

// OLS slope of y against t over the index range [begin, y.size()).
double trend(const std::vector<double>& y, std::size_t begin) {
  const double n = static_cast<double>(y.size() - begin);
  double mt = 0.0, my = 0.0;
  for (std::size_t i = begin; i < y.size(); ++i) {
    mt += static_cast<double>(i) / n;
    my += y[i] / n;
  }
  double sty = 0.0, stt = 0.0;
  for (std::size_t i = begin; i < y.size(); ++i) {
    const double dt = static_cast<double>(i) - mt;
    sty += dt * (y[i] - my);
    stt += dt * dt;
  }
  return sty / stt;
}

Outcome datacenter_experiment() {
  Outcome out;
  const std::size_t T = 2000;
  const ExperimentConfig c = parse_config(nlohmann::json{
      {"scenario", "datacenter"}, {"T", T}, {"seeds", "0..4"}});
  const ExperimentResult r = run_experiment(c);
  const FigureSeries& pacing = figure(r, "pacing");
  const FigureSeries& cost = figure(r, "cost");
  const FigureSeries& unserved = figure(r, "unserved");

  const double p100 = pacing.algorithm[99], p_end = pacing.algorithm.back();
  out.require(p_end <= 0.2 * p100, "(a) pacing violation decay");
  out.require(cost.algorithm.back() <= cost.reac.back(), "(b) cost vs Reac");
  const std::size_t burn_in = T / 10;
  const double slope = trend(unserved.algorithm, burn_in - 1);
  out.require(slope <= 0.0, "(c) unserved trend after burn-in");

  out.note("(a) pacing " + num(p100) + " at t=100, " + num(p_end) + " at T, ratio " +
           num(p_end / p100));
  out.note("(b) cost " + num(cost.algorithm.back()) + " vs Reac " + num(cost.reac.back()) +
           ", hindsight " + num(cost.hindsight.back()));
  out.note("(c) unserved " + num(unserved.algorithm[burn_in - 1]) + " at t=" +
           std::to_string(burn_in) + ", " + num(unserved.algorithm.back()) +
           " at T, slope " + num(slope) + " per slot (hindsight " +
           num(unserved.hindsight.back()) + ")");
  return out;
}

// ---- 7: determinism -------------------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.starts_with("# wall_time_seconds")) out += line + '\n';
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "pdomd_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0, mismatches = 0;
  const std::vector<nlohmann::json> configs = {
      {{"scenario", "synthetic"}, {"T", 800}, {"seeds", "0..3"}},
      {{"scenario", "datacenter"}, {"T", 300}, {"seeds", "0..2"}}};
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<fs::path> dirs;
    for (std::size_t workers : {1, 4}) {
      ExperimentConfig c = parse_config(configs[k]);
      c.workers = workers;
      c.output_dir = root / (std::to_string(k) + "_w" + std::to_string(workers));
      write_experiment(c, run_experiment(c));
      dirs.push_back(c.output_dir);
    }
    for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), dirs[0]);
      const bool record = rel.begin()->string() == "records";
      std::string a = slurp(entry.path()), b = slurp(dirs[1] / rel);
      if (record) {
        a = without_wall_time(a);
        b = without_wall_time(b);
      }
      ++files;
      mismatches += a != b;
    }
  }
  fs::remove_all(root);
  out.require(files > 0 && mismatches == 0, "identical outputs");
  out.note(std::to_string(files) + " files compared, " + std::to_string(mismatches) +
           " differ");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
  };
  RateReport sweep;
  const std::vector<Criterion> criteria = {
      {1, "geometry", 30, geometry_suite},
      {2, "engine algebra", 60, engine_suite},
      {3, "rates", 600,
       [&] {
         sweep = rate_sweep();
         return rate_check(sweep);
       }},
      {4, "dual boundedness", 600, [&] { return dual_check(sweep); }},
      {5, "oracle", 300, oracle_suite},
      {6, "datacenter", 300, datacenter_experiment},
      {7, "determinism", 300, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    o.require(seconds < c.limit_seconds, "runtime limit " + num(c.limit_seconds) + " s");
    failures += !o.pass;
    std::printf("[%s] criterion %d (%s): %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
