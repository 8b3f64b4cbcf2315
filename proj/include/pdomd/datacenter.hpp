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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pdomd/engine.hpp"
#include "pdomd/price_trace.hpp"
#include "pdomd/problem.hpp"
#include "pdomd/record.hpp"
#include "pdomd/sampling.hpp"

namespace pdomd {

// Geo-distributed data center: clusters of identical servers, one price zone
// per cluster, Poisson arrivals, Pareto service noise and Pareto budget
// consumption.
struct DatacenterConfig {
  std::size_t clusters = 5;
  std::size_t servers_per_cluster = 10;
  double arrival_mean = 1000.0;
  ServiceCurve service{8.0, 4.0, 30.0};
  double budget_mean = 5.0;
  // Pacing group j must receive ratio j of the total budget spend. The last
  // group spans two clusters.
  std::vector<std::vector<std::size_t>> pacing_groups = {{0}, {1}, {2}, {3, 4}};
  std::vector<double> pacing_ratios = {0.05, 0.10, 0.25, 0.60};
  double pareto_shape = 2.5;
  std::size_t reac_window = 10;

  std::size_t num_servers() const { return clusters * servers_per_cluster; }
  std::size_t cluster_of(std::size_t server) const {
    return server / servers_per_cluster;
  }
  void validate() const;
};

// One slot of the data center.
class DatacenterSlot final : public SlotRealization {
 public:
  DatacenterSlot(const DatacenterConfig& config, Vector prices, double arrivals,
                 Vector service_noise, Matrix equality);

  Index num_inequalities() const override { return 1; }
  double objective(const Vector& mu) const override { return prices_.dot(mu); }
  Vector objective_gradient(const Vector&) const override { return prices_; }
  // arrivals - sum_k xi_k * service(mu_k)
  double inequality(Index i, const Vector& mu) const override;
  Vector inequality_gradient(Index i, const Vector& mu) const override;
  const Matrix& equality_vectors() const override { return equality_; }

  double arrivals() const { return arrivals_; }
  double served(const Vector& mu) const;

 private:
  ServiceCurve service_;
  Vector prices_;
  double arrivals_;
  Vector service_noise_;
  Matrix equality_;
};

class DatacenterProblem final : public Problem {
 public:
  DatacenterProblem(DatacenterConfig config, PriceTrace prices);

  std::string id() const override { return "datacenter"; }
  std::unique_ptr<SlotRealization> sample(std::size_t t,
                                          Rng& rng) const override;
  std::unique_ptr<DatacenterSlot> sample_slot(std::size_t t, Rng& rng) const;

  bool has_exact_means() const override { return true; }
  std::shared_ptr<const ConvexFunction> mean_objective(
      std::size_t t, std::size_t k) const override;
  std::shared_ptr<const ConvexFunction> mean_inequality(Index i) const override;
  Matrix mean_equality_vectors() const override;
  ProblemConstants constants(const BregmanGeometry& geometry) const override;

  // Server price vector for slot t.
  Vector prices(std::size_t t) const;
  // Row j: weight_k * (1[k in group j] - ratio_j).
  Matrix pacing_matrix(const Vector& weights) const;

  const DatacenterConfig& config() const { return config_; }
  const PriceTrace& trace() const { return trace_; }

 private:
  DatacenterConfig config_;
  PriceTrace trace_;
};

std::shared_ptr<const DatacenterProblem> build_datacenter_problem(
    const DatacenterConfig& config, PriceTrace prices, std::size_t horizon);

// Reactive baseline: forecast arrivals by the mean of the last (padded)
// window, split the load across pacing groups by ratio (evenly inside a group)
// and across servers evenly, then invert the service curve.
Vector reac_policy_step(std::span<const double> arrival_history,
                        const DatacenterConfig& config);

// The Reac baseline as a Policy. Before any arrival is observed it forecasts
// the configured arrival mean.
Policy make_reac_policy(const DatacenterConfig& config);

RunRecord run_reac(const DatacenterProblem& problem, std::size_t horizon,
                   std::uint64_t seed,
                   const std::optional<Vector>& comparator = std::nullopt);

}  // namespace pdomd
