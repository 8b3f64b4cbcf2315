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

#include "pdomd/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>

namespace pdomd {
namespace {

class SyntheticSlot final : public SlotRealization {
 public:
  SyntheticSlot(Vector objective, Matrix inequality, const Vector& offsets,
                Matrix equality)
      : objective_(std::move(objective)),
        inequality_(std::move(inequality)),
        offsets_(offsets),
        equality_(std::move(equality)) {}

  Index num_inequalities() const override { return inequality_.rows(); }
  double objective(const Vector& mu) const override {
    return objective_.dot(mu);
  }
  Vector objective_gradient(const Vector&) const override { return objective_; }
  double inequality(Index i, const Vector& mu) const override {
    return inequality_.row(i).dot(mu) - offsets_[i];
  }
  Vector inequality_gradient(Index i, const Vector&) const override {
    return inequality_.row(i).transpose();
  }
  const Matrix& equality_vectors() const override { return equality_; }

 private:
  Vector objective_;
  Matrix inequality_;
  Vector offsets_;
  Matrix equality_;
};

void fill_uniform(double amplitude, Rng& rng, double* data, Index n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Index i = 0; i < n; ++i) data[i] = amplitude * unit(rng);
}

// sup over the set of |mu_k| per coordinate.
Vector coordinate_magnitude(const DecisionSet& set) {
  return set.lower().cwiseAbs().cwiseMax(set.upper().cwiseAbs());
}

// sup over the set of <w, mu> for w >= 0 componentwise.
double support_nonnegative(const DecisionSet& set, const Vector& w) {
  if (set.is_simplex()) return w.maxCoeff();
  return w.dot(coordinate_magnitude(set));
}

double dual_norm_of_bound(const BregmanGeometry& geometry, const Vector& w) {
  return geometry.dual_norm(w);
}

}  // namespace

SyntheticProblem::SyntheticProblem(SyntheticSpec spec)
    : Problem(spec.set, spec.inequality_matrix.rows(), spec.equality_targets),
      spec_(std::move(spec)) {
  const Index d = spec_.set.dimension();
  require(spec_.objective_mean.size() == d,
          "synthetic: objective mean has the wrong dimension");
  require(spec_.inequality_matrix.rows() == spec_.inequality_offsets.size(),
          "synthetic: inequality offsets do not match the constraint count");
  require(spec_.inequality_matrix.rows() == 0 ||
              spec_.inequality_matrix.cols() == d,
          "synthetic: inequality matrix has the wrong width");
  require(spec_.equality_matrix.rows() == spec_.equality_targets.size(),
          "synthetic: equality targets do not match the constraint count");
  require(spec_.equality_matrix.rows() == 0 || spec_.equality_matrix.cols() == d,
          "synthetic: equality matrix has the wrong width");
  require(spec_.drift_direction.size() == 0 || spec_.drift_direction.size() == d,
          "synthetic: drift direction has the wrong dimension");
  require(spec_.drift_period > 0, "synthetic: drift period must be positive");
  require(spec_.objective_noise >= 0.0 && spec_.inequality_noise >= 0.0 &&
              spec_.equality_noise >= 0.0,
          "synthetic: noise amplitudes must be nonnegative");
  // Normalize empty matrices to the right width.
  if (spec_.inequality_matrix.rows() == 0) spec_.inequality_matrix.resize(0, d);
  if (spec_.equality_matrix.rows() == 0) spec_.equality_matrix.resize(0, d);
}

Vector SyntheticProblem::objective_coefficients(std::size_t t) const {
  if (spec_.drift_direction.size() == 0 || spec_.drift_amplitude == 0.0) {
    return spec_.objective_mean;
  }
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) /
                       static_cast<double>(spec_.drift_period);
  return spec_.objective_mean +
         spec_.drift_amplitude * std::sin(phase) * spec_.drift_direction;
}

std::unique_ptr<SlotRealization> SyntheticProblem::sample(std::size_t t,
                                                          Rng& rng) const {
  const Index d = dimension();
  Vector objective = objective_coefficients(t);
  Vector noise(d);
  fill_uniform(spec_.objective_noise, rng, noise.data(), d);
  objective += noise;

  Matrix inequality = spec_.inequality_matrix;
  for (Index i = 0; i < inequality.rows(); ++i) {
    fill_uniform(spec_.inequality_noise, rng, noise.data(), d);
    inequality.row(i) += noise.transpose();
  }
  Matrix equality = spec_.equality_matrix;
  for (Index j = 0; j < equality.rows(); ++j) {
    fill_uniform(spec_.equality_noise, rng, noise.data(), d);
    equality.row(j) += noise.transpose();
  }
  return std::make_unique<SyntheticSlot>(std::move(objective),
                                         std::move(inequality),
                                         spec_.inequality_offsets,
                                         std::move(equality));
}

std::shared_ptr<const ConvexFunction> SyntheticProblem::mean_objective(
    std::size_t t, std::size_t k) const {
  require(k > 0, "mean_objective: window length must be positive");
  Vector total = Vector::Zero(dimension());
  for (std::size_t s = t; s < t + k; ++s) total += objective_coefficients(s);
  return std::make_shared<AffineFunction>(total / static_cast<double>(k), 0.0);
}

std::shared_ptr<const ConvexFunction> SyntheticProblem::mean_inequality(
    Index i) const {
  return std::make_shared<AffineFunction>(
      spec_.inequality_matrix.row(i).transpose(), -spec_.inequality_offsets[i]);
}

ProblemConstants SyntheticProblem::constants(
    const BregmanGeometry& geometry) const {
  const DecisionSet& s = set();
  ProblemConstants out;

  Vector objective_bound = spec_.objective_mean.cwiseAbs().array() +
                           spec_.objective_noise;
  if (spec_.drift_direction.size() > 0) {
    objective_bound += spec_.drift_amplitude * spec_.drift_direction.cwiseAbs();
  }
  out.objective_gradient = dual_norm_of_bound(geometry, objective_bound);
  out.objective_value = support_nonnegative(s, objective_bound);

  double gradient_sq = 0.0;
  double value_sq = 0.0;
  for (Index i = 0; i < num_inequalities(); ++i) {
    const Vector row_bound =
        spec_.inequality_matrix.row(i).transpose().cwiseAbs().array() +
        spec_.inequality_noise;
    const double g = dual_norm_of_bound(geometry, row_bound);
    gradient_sq += g * g;
    const double v = support_nonnegative(s, row_bound) +
                     std::abs(spec_.inequality_offsets[i]);
    value_sq += v * v;
  }
  out.constraint_gradient = std::sqrt(gradient_sq);
  out.constraint_value = std::sqrt(value_sq);

  double equality_sq = 0.0;
  for (Index j = 0; j < num_equalities(); ++j) {
    const Vector row_bound =
        spec_.equality_matrix.row(j).transpose().cwiseAbs().array() +
        spec_.equality_noise;
    const double h = dual_norm_of_bound(geometry, row_bound);
    equality_sq += h * h;
  }
  out.equality_vector = std::sqrt(equality_sq);
  out.divergence = divergence_radius(geometry, s);
  return out;
}

std::shared_ptr<const SyntheticProblem> build_synthetic_problem(
    SyntheticSpec spec) {
  return std::make_shared<const SyntheticProblem>(std::move(spec));
}

std::shared_ptr<const SyntheticProblem> build_synthetic_problem(
    Index dimension, Index num_inequalities, Index num_equalities,
    std::uint64_t seed, const SyntheticOptions& options) {
  require(dimension > 0, "synthetic: dimension must be positive");
  require(num_inequalities >= 0 && num_equalities >= 0,
          "synthetic: constraint counts must be nonnegative");
  require(num_equalities < dimension,
          "synthetic: need fewer equality constraints than dimensions");
  const Index d = dimension;
  const bool simplex = options.set_kind == DecisionSet::Kind::kSimplex;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&](Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
    }
    return m;
  };

  SyntheticSpec spec;
  std::ostringstream id;
  id << "synthetic-d" << d << "-L" << num_inequalities << "-M" << num_equalities
     << "-" << (simplex ? "simplex" : "box") << "-s" << seed;
  spec.id = id.str();
  spec.set = simplex ? DecisionSet::simplex(d)
                     : DecisionSet::box(Vector::Zero(d), Vector::Ones(d));

  // Interior anchor point.
  Vector anchor(d);
  if (simplex) {
    Vector random_point = spec.set.sample_uniform(rng);
    anchor = 0.5 * random_point.array() + 0.5 / static_cast<double>(d);
  } else {
    for (Index i = 0; i < d; ++i) anchor[i] = 0.25 + 0.5 * unit(rng);
  }

  spec.objective_mean = gaussian(d, 1);
  spec.drift_direction = gaussian(d, 1);
  spec.drift_direction /= spec.drift_direction.norm();
  spec.drift_amplitude = options.drift_amplitude;
  spec.drift_period = options.drift_period;
  spec.objective_noise = options.objective_noise;

  spec.inequality_matrix = gaussian(num_inequalities, d);
  spec.inequality_offsets =
      spec.inequality_matrix * anchor +
      Vector::Constant(num_inequalities, options.inequality_slack);
  spec.inequality_noise = options.inequality_noise;

  spec.equality_matrix = gaussian(num_equalities, d);
  spec.equality_targets = spec.equality_matrix * anchor;
  spec.equality_noise = options.equality_noise;

  if (num_equalities > 0) {
    Matrix span(num_equalities + (simplex ? 1 : 0), d);
    span.topRows(num_equalities) = spec.equality_matrix;
    if (simplex) span.row(num_equalities).setOnes();
    Eigen::FullPivLU<Matrix> lu(span);
    if (lu.rank() != span.rows()) {
      throw RuntimeError(
          "synthetic: equality means are not linearly independent");
    }
  }
  return build_synthetic_problem(std::move(spec));
}

}  // namespace pdomd
