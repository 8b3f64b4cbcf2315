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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "pdomd/datacenter.hpp"
#include "pdomd/oracle.hpp"
#include "pdomd/price_trace.hpp"
#include "pdomd/sampling.hpp"
#include "pdomd/synthetic.hpp"

namespace pdomd {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <class Draw>
Moments moments(int n, Draw draw) {
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sq += x * x;
  }
  Moments m;
  m.mean = sum / n;
  m.variance = (sq - n * m.mean * m.mean) / (n - 1);
  return m;
}

// Running mean and standard error of a scalar statistic.
struct Accumulator {
  double sum = 0.0, sq = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    sq += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double standard_error() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, (sq - n * m * m) / (n - 1)) / n);
  }
};

// ---- samplers -------------------------------------------------------------

TEST(Pareto, ScaleSupportAndMean) {
  EXPECT_DOUBLE_EQ(pareto_scale(5.0, 2.5), 3.0);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) ASSERT_GE(pareto_sample(5.0, 2.5, rng), 3.0);
  const Moments m = moments(1000000, [&] { return pareto_sample(5.0, 2.5, rng); });
  EXPECT_NEAR(m.mean, 5.0, 0.05);
  EXPECT_THROW(pareto_sample(1.0, 1.0, rng), ConfigError);
  EXPECT_THROW(pareto_sample(0.0, 2.5, rng), ConfigError);
}

TEST(Poisson, Moments) {
  Rng rng(2);
  const Moments m =
      moments(100000, [&] { return static_cast<double>(poisson_sample(1000.0, rng)); });
  EXPECT_NEAR(m.mean, 1000.0, 10.0);
  EXPECT_NEAR(m.variance, 1000.0, 50.0);
}

TEST(Poisson, TinyMeanAndReplay) {
  Rng rng(3);
  int nonzero = 0;
  for (int i = 0; i < 1000; ++i) nonzero += poisson_sample(1e-12, rng) != 0;
  EXPECT_EQ(nonzero, 0);
  EXPECT_EQ(poisson_sample(0.0, rng), 0);
  Rng a(4), b(4);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(poisson_sample(50.0, a), poisson_sample(50.0, b));
}

TEST(ServiceCurve, Examples) {
  const ServiceCurve s;
  EXPECT_EQ(s(0.0), 0.0);
  EXPECT_NEAR(s.inverse(5.0), (std::exp(5.0 / 8.0) - 1.0) / 4.0, 1e-15);
  EXPECT_NEAR(s.inverse(5.0), 0.21706, 1e-5);
  EXPECT_EQ(s.inverse(1000.0), 30.0);
  EXPECT_EQ(s.inverse(-1.0), 0.0);
  for (int i = 0; i <= 3000; ++i) {
    const double mu = 0.01 * i;
    ASSERT_NEAR(s.inverse(s(mu)), mu, 1e-10);
  }
  const double top = 8.0 * std::log(121.0);
  for (int i = 0; i <= 1000; ++i) {
    const double y = top * i / 1000.0;
    ASSERT_NEAR(s(s.inverse(y)), y, 1e-10);
  }
}

// ---- price traces ---------------------------------------------------------

TEST(PriceTrace, ParsesLongFormat) {
  std::istringstream in(
      "slot,zone,price\n"
      "0,A,10\n0,B,10\n0,C,10\n0,D,10\n0,E,10\n"
      "1,A,10\n1,B,10\n1,C,10\n1,D,10\n1,E,10\n");
  const PriceTrace t = parse_price_trace(in, 5);
  ASSERT_EQ(t.num_zones(), 5u);
  EXPECT_EQ(t.length(), 2u);
  for (const auto& series : t.prices) EXPECT_EQ(series, (std::vector<double>{10, 10}));
}

TEST(PriceTrace, RejectsBadInput) {
  const auto parse = [](const std::string& text, std::optional<std::size_t> zones = {}) {
    std::istringstream in(text);
    return parse_price_trace(in, zones);
  };
  EXPECT_THROW(parse("slot,zone,price\n0,A,1\n0,B,1\n1,A,1\n"), ConfigError);  // ragged
  EXPECT_THROW(parse("slot,zone,price\n0,A,abc\n"), ConfigError);
  EXPECT_THROW(parse("slot,zone\n0,A\n"), ConfigError);
  EXPECT_THROW(parse("slot,zone,price\n0,A,1\n2,A,1\n"), ConfigError);  // gap
  EXPECT_THROW(parse("slot,zone,price\n0,A,1\n0,B,1\n", 5), ConfigError);
  EXPECT_THROW(parse("slot,zone,price\n0,A,1\n0,A,2\n"), ConfigError);
  // Negative prices are legal.
  EXPECT_EQ(parse("slot,zone,price\n0,A,-3.5\n").prices[0][0], -3.5);
}

TEST(PriceTrace, GeneratorRoundTrip) {
  TraceGeneratorOptions options;
  options.slots = 500;
  options.seed = 9;
  const PriceTrace t = generate_price_trace(options);
  EXPECT_EQ(t.num_zones(), 5u);
  EXPECT_EQ(t.length(), 500u);
  std::stringstream buffer;
  write_price_trace(t, buffer);
  EXPECT_TRUE(parse_price_trace(buffer, 5) == t);
  EXPECT_TRUE(generate_price_trace(options) == t);
}

// ---- data center ----------------------------------------------------------

std::shared_ptr<const DatacenterProblem> datacenter(std::size_t slots = 50) {
  TraceGeneratorOptions options;
  options.slots = slots;
  return build_datacenter_problem(DatacenterConfig{}, generate_price_trace(options), slots);
}

TEST(Datacenter, Shape) {
  const auto p = datacenter();
  EXPECT_EQ(p->dimension(), 50);
  EXPECT_EQ(p->num_inequalities(), 1);
  EXPECT_EQ(p->num_equalities(), 4);
  EXPECT_EQ(p->targets(), Vector::Zero(4));
  EXPECT_TRUE(p->set().is_box());
  EXPECT_EQ(p->set().upper(), Vector::Constant(50, 30.0));
}

TEST(Datacenter, ZeroPowerServesNothing) {
  const auto p = datacenter();
  Rng rng(1);
  for (std::size_t t = 0; t < 20; ++t) {
    const auto slot = p->sample_slot(t, rng);
    const Vector zero = Vector::Zero(50);
    EXPECT_EQ(slot->inequality(0, zero), slot->arrivals());
    EXPECT_GT(slot->arrivals(), 0.0);
    EXPECT_EQ(slot->equality_vectors() * zero, Vector::Zero(4));
  }
}

TEST(Datacenter, ExactMeansAtUniformPower) {
  const auto p = datacenter();
  const auto g = p->mean_inequality(0);
  for (double c : {0.0, 0.5, 3.0, 30.0}) {
    EXPECT_NEAR(g->value(Vector::Constant(50, c)), 1000.0 - 400.0 * std::log1p(4.0 * c),
                1e-9);
  }
  // Uniform power gives group shares (0.2, 0.2, 0.2, 0.4), so the pacing
  // residuals are nonzero.
  const Vector residual = p->mean_equality_vectors() * Vector::Constant(50, 1.0);
  EXPECT_NEAR(residual[0], 5.0 * 10 * (1.0 - 0.05) - 5.0 * 40 * 0.05, 1e-9);
  EXPECT_GT(residual.cwiseAbs().minCoeff(), 1.0);
}

TEST(Datacenter, PacingResidualVanishesAtTargetShares) {
  const auto p = datacenter();
  const DatacenterConfig& c = p->config();
  Vector mu(50);
  // Group j gets a total mass proportional to its ratio, spread evenly.
  for (std::size_t j = 0; j < c.pacing_groups.size(); ++j) {
    const double servers = 10.0 * static_cast<double>(c.pacing_groups[j].size());
    for (std::size_t cluster : c.pacing_groups[j]) {
      for (Index s = 0; s < 10; ++s) {
        mu[static_cast<Index>(cluster) * 10 + s] = 40.0 * c.pacing_ratios[j] / servers;
      }
    }
  }
  EXPECT_LT((p->mean_equality_vectors() * mu).cwiseAbs().maxCoeff(), 1e-12);
  // Rows sum to zero once weighted by membership: sum_j row_j = w (1 - sum beta).
  EXPECT_LT(p->mean_equality_vectors().colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Datacenter, MonteCarloMatchesExactMeans) {
  const auto p = datacenter();
  Rng rng(5);
  Rng point_rng(6);
  const Vector mu = p->set().sample_uniform(point_rng) * 0.1;
  const double g_mean = p->mean_inequality(0)->value(mu);
  const Vector h_mean = p->mean_equality_vectors() * mu;
  Accumulator g;
  std::vector<Accumulator> h(4);
  for (int n = 0; n < 100000; ++n) {
    const auto slot = p->sample_slot(0, rng);
    g.add(slot->inequality(0, mu));
    const Vector e = slot->equality_vectors() * mu;
    for (Index j = 0; j < 4; ++j) h[static_cast<std::size_t>(j)].add(e[j]);
  }
  EXPECT_LE(std::abs(g.mean() - g_mean), 3.0 * g.standard_error());
  for (Index j = 0; j < 4; ++j) {
    const Accumulator& a = h[static_cast<std::size_t>(j)];
    EXPECT_LE(std::abs(a.mean() - h_mean[j]), 3.0 * a.standard_error()) << "row " << j;
  }
}

TEST(Datacenter, SplitHalfMeansAgree) {
  const auto p = datacenter();
  Rng rng(7);
  const Vector mu = Vector::Constant(50, 2.0);
  Accumulator first, second;
  for (int n = 0; n < 40000; ++n) {
    const double g = p->sample_slot(0, rng)->inequality(0, mu);
    (n < 20000 ? first : second).add(g);
  }
  const double se = std::hypot(first.standard_error(), second.standard_error());
  EXPECT_LE(std::abs(first.mean() - second.mean()), 3.0 * se);
}

TEST(Datacenter, SeededBuildsAreIdentical) {
  const auto a = datacenter();
  const auto b = datacenter();
  Rng ra(11), rb(11);
  const Vector mu = Vector::Constant(50, 1.5);
  for (std::size_t t = 0; t < 30; ++t) {
    const auto sa = a->sample_slot(t, ra);
    const auto sb = b->sample_slot(t, rb);
    ASSERT_EQ(sa->arrivals(), sb->arrivals());
    ASSERT_EQ(sa->inequality(0, mu), sb->inequality(0, mu));
    ASSERT_EQ(sa->equality_vectors(), sb->equality_vectors());
    ASSERT_EQ(sa->objective(mu), sb->objective(mu));
  }
}

TEST(Datacenter, GradientMatchesFiniteDifference) {
  const auto p = datacenter();
  Rng rng(12);
  const auto slot = p->sample_slot(3, rng);
  const Vector mu = Vector::Constant(50, 4.0);
  const Vector grad = slot->inequality_gradient(0, mu);
  for (Index k : {0, 17, 49}) {
    Vector step = mu;
    step[k] += 1e-6;
    EXPECT_NEAR((slot->inequality(0, step) - slot->inequality(0, mu)) / 1e-6, grad[k], 1e-4);
  }
}

TEST(Datacenter, Errors) {
  TraceGeneratorOptions options;
  options.slots = 10;
  EXPECT_THROW(build_datacenter_problem(DatacenterConfig{}, generate_price_trace(options), 11),
               ConfigError);
  options.zone_levels = {1.0, 1.0, 1.0};
  EXPECT_THROW(build_datacenter_problem(DatacenterConfig{}, generate_price_trace(options), 10),
               ConfigError);
  DatacenterConfig bad;
  bad.pacing_ratios = {0.5, 0.5, 0.5, 0.5};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = DatacenterConfig{};
  bad.pacing_groups = {{0}, {1}, {2}, {3}};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Reac, Examples) {
  const DatacenterConfig c;
  const std::vector<double> thousand(10, 1000.0);
  const Vector mu = reac_policy_step(thousand, c);
  for (Index k = 0; k < 10; ++k) EXPECT_NEAR(mu[k], 0.21706, 1e-5);
  // Clusters 4 and 5 split the 0.60 share: per-server target 30.
  EXPECT_NEAR(mu[30], c.service.inverse(30.0), 1e-15);
  EXPECT_EQ(mu[30], mu[49]);

  const std::vector<double> zero(10, 0.0);
  EXPECT_EQ(reac_policy_step(zero, c), Vector::Zero(50));

  const std::vector<double> constant(7, 800.0);
  const std::vector<double> longer(25, 800.0);
  EXPECT_EQ(reac_policy_step(constant, c), reac_policy_step(longer, c));
  EXPECT_THROW(reac_policy_step(std::vector<double>{}, c), ConfigError);
}

TEST(Reac, PadsShortHistoryWithOldestValue) {
  const DatacenterConfig c;
  const std::vector<double> history = {500.0, 1500.0};
  // Padded window: eight copies of 500 and then 500, 1500.
  const std::vector<double> padded = {500, 500, 500, 500, 500, 500, 500, 500, 500, 1500};
  EXPECT_EQ(reac_policy_step(history, c), reac_policy_step(padded, c));
}

TEST(Reac, RunUsesTrailingArrivals) {
  const auto p = datacenter(40);
  const RunRecord r = run_reac(*p, 40, 3);
  EXPECT_EQ(r.header.policy, "reac");
  const Vector first = r.decisions.row(0).transpose();
  EXPECT_EQ(first, reac_policy_step(std::vector<double>{1000.0}, p->config()));
  EXPECT_TRUE(p->set().contains(r.decisions.row(39).transpose()));
}

// ---- synthetic ------------------------------------------------------------

TEST(Synthetic, PlainOnlineConvexOptimization) {
  const auto p = build_synthetic_problem(5, 0, 0, 1);
  EXPECT_EQ(p->num_inequalities(), 0);
  EXPECT_EQ(p->num_equalities(), 0);
  Rng rng(1);
  const auto slot = p->sample(0, rng);
  EXPECT_EQ(slot->num_inequalities(), 0);
  EXPECT_EQ(slot->equality_vectors().rows(), 0);
}

TEST(Synthetic, PinnedCoordinateExample) {
  SyntheticSpec spec;
  spec.set = DecisionSet::simplex(3);
  spec.objective_mean = vec({1, 0, 0});
  spec.inequality_matrix.resize(0, 3);
  spec.inequality_offsets.resize(0);
  spec.equality_matrix = vec({1, 0, 0}).transpose();
  spec.equality_targets = vec({0.3});
  const auto p = build_synthetic_problem(spec);
  const HindsightResult h = hindsight_optimum(*p, 0, 10);
  EXPECT_NEAR(h.mu[0], 0.3, 1e-6);
  EXPECT_NEAR(h.value, 0.3, 1e-6);
}

TEST(Synthetic, Errors) {
  EXPECT_THROW(build_synthetic_problem(3, 1, 3, 0), ConfigError);
  EXPECT_THROW(build_synthetic_problem(0, 0, 0, 0), ConfigError);
}

TEST(Synthetic, AnchorIsStrictlyFeasible) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = build_synthetic_problem(10, 2, 2, seed);
    const StaticProgram program = p->static_program(0, 100);
    // A feasible program: the hindsight solver finds a feasible point.
    const HindsightResult h = hindsight_optimum(program);
    EXPECT_LE(h.inequality_residual, 1e-6);
    EXPECT_LE(h.equality_residual, 1e-6);
  }
}

TEST(Synthetic, MonteCarloMatchesExactMeans) {
  const auto p = build_synthetic_problem(6, 2, 2, 4);
  Rng point_rng(1);
  const Vector mu = p->set().sample_uniform(point_rng);
  const std::size_t t = 13;
  const double f_mean = p->mean_objective(t, 1)->value(mu);
  const Vector h_mean = p->mean_equality_vectors() * mu;
  Accumulator f;
  std::vector<Accumulator> g(2), h(2);
  Rng rng(2);
  for (int n = 0; n < 100000; ++n) {
    const auto slot = p->sample(t, rng);
    f.add(slot->objective(mu));
    for (Index i = 0; i < 2; ++i) g[static_cast<std::size_t>(i)].add(slot->inequality(i, mu));
    const Vector e = slot->equality_vectors() * mu;
    for (Index j = 0; j < 2; ++j) h[static_cast<std::size_t>(j)].add(e[j]);
  }
  EXPECT_LE(std::abs(f.mean() - f_mean), 3.0 * f.standard_error());
  for (Index i = 0; i < 2; ++i) {
    const Accumulator& a = g[static_cast<std::size_t>(i)];
    EXPECT_LE(std::abs(a.mean() - p->mean_inequality(i)->value(mu)), 3.0 * a.standard_error());
    const Accumulator& b = h[static_cast<std::size_t>(i)];
    EXPECT_LE(std::abs(b.mean() - h_mean[i]), 3.0 * b.standard_error());
  }
}

TEST(Synthetic, SplitHalfMeansAgree) {
  const auto p = build_synthetic_problem(6, 1, 1, 5);
  const Vector mu = p->set().initial_point();
  Accumulator first, second;
  Rng rng(3);
  for (int n = 0; n < 40000; ++n) {
    const double v = p->sample(0, rng)->inequality(0, mu);
    (n < 20000 ? first : second).add(v);
  }
  const double se = std::hypot(first.standard_error(), second.standard_error());
  EXPECT_LE(std::abs(first.mean() - second.mean()), 3.0 * se);
}

TEST(Synthetic, ConstantsBoundSampledValues) {
  SyntheticOptions box;
  box.set_kind = DecisionSet::Kind::kBox;
  const auto p = build_synthetic_problem(5, 2, 2, 6, box);
  const BregmanGeometry g = BregmanGeometry::euclidean();
  const ProblemConstants c = p->constants(g);
  Rng rng(4);
  for (int n = 0; n < 2000; ++n) {
    const auto slot = p->sample(static_cast<std::size_t>(n), rng);
    const Vector mu = p->set().sample_uniform(rng);
    ASSERT_LE(g.dual_norm(slot->objective_gradient(mu)), c.objective_gradient + 1e-12);
    ASSERT_LE(std::abs(slot->objective(mu)), c.objective_value + 1e-12);
    ASSERT_LE(slot->inequalities(mu).norm(), c.constraint_value + 1e-12);
    double sq = 0.0;
    for (Index j = 0; j < 2; ++j) {
      sq += std::pow(g.dual_norm(slot->equality_vectors().row(j).transpose()), 2);
    }
    ASSERT_LE(std::sqrt(sq), c.equality_vector + 1e-12);
  }
}

}  // namespace
}  // namespace pdomd
