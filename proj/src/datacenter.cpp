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

#include "pdomd/datacenter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace pdomd {
namespace {

// ḡ(mu) = arrivals - sum_k weight_k * service(mu_k).
class ServiceDeficit final : public ConvexFunction {
 public:
  ServiceDeficit(double arrivals, Vector weights, ServiceCurve service)
      : arrivals_(arrivals), weights_(std::move(weights)), service_(service) {}

  double value(const Vector& mu) const override {
    double served = 0.0;
    for (Index k = 0; k < mu.size(); ++k) served += weights_[k] * service_(mu[k]);
    return arrivals_ - served;
  }
  Vector gradient(const Vector& mu) const override {
    Vector g(mu.size());
    for (Index k = 0; k < mu.size(); ++k) {
      g[k] = -weights_[k] * service_.derivative(mu[k]);
    }
    return g;
  }

 private:
  double arrivals_;
  Vector weights_;
  ServiceCurve service_;
};

// Upper quantile of |samples| inflated by 1.5: the Monte Carlo fallback for
// constants without a finite analytic bound.
double inflated_quantile(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t index = static_cast<std::size_t>(
      std::floor(0.9999 * static_cast<double>(samples.size() - 1)));
  return 1.5 * samples[index];
}

}  // namespace

void DatacenterConfig::validate() const {
  require(clusters > 0 && servers_per_cluster > 0,
          "datacenter: need at least one cluster and server");
  require(arrival_mean >= 0.0, "datacenter: arrival mean must be nonnegative");
  require(budget_mean > 0.0, "datacenter: budget mean must be positive");
  require(pareto_shape > 1.0, "datacenter: Pareto shape must exceed 1");
  require(service.coefficient > 0.0 && service.rate > 0.0 &&
              service.max_power > 0.0,
          "datacenter: service curve parameters must be positive");
  require(reac_window > 0, "datacenter: Reac window must be positive");
  require(pacing_groups.size() == pacing_ratios.size(),
          "datacenter: one pacing ratio per pacing group");
  const double total =
      std::accumulate(pacing_ratios.begin(), pacing_ratios.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-12, "datacenter: pacing ratios must sum to 1");
  std::vector<int> seen(clusters, 0);
  for (const auto& group : pacing_groups) {
    require(!group.empty(), "datacenter: empty pacing group");
    for (std::size_t c : group) {
      require(c < clusters, "datacenter: pacing group names an unknown cluster");
      ++seen[c];
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }),
          "datacenter: pacing groups must partition the clusters");
}

DatacenterSlot::DatacenterSlot(const DatacenterConfig& config, Vector prices,
                               double arrivals, Vector service_noise,
                               Matrix equality)
    : service_(config.service),
      prices_(std::move(prices)),
      arrivals_(arrivals),
      service_noise_(std::move(service_noise)),
      equality_(std::move(equality)) {}

double DatacenterSlot::served(const Vector& mu) const {
  double total = 0.0;
  for (Index k = 0; k < mu.size(); ++k) total += service_noise_[k] * service_(mu[k]);
  return total;
}

double DatacenterSlot::inequality(Index, const Vector& mu) const {
  return arrivals_ - served(mu);
}

Vector DatacenterSlot::inequality_gradient(Index, const Vector& mu) const {
  Vector g(mu.size());
  for (Index k = 0; k < mu.size(); ++k) {
    g[k] = -service_noise_[k] * service_.derivative(mu[k]);
  }
  return g;
}

DatacenterProblem::DatacenterProblem(DatacenterConfig config, PriceTrace prices)
    : Problem(DecisionSet::box(
                  Vector::Zero(static_cast<Index>(config.num_servers())),
                  Vector::Constant(static_cast<Index>(config.num_servers()),
                                   config.service.max_power)),
              1, Vector::Zero(static_cast<Index>(config.pacing_ratios.size()))),
      config_(std::move(config)),
      trace_(std::move(prices)) {
  config_.validate();
  require(trace_.num_zones() == config_.clusters,
          "datacenter: price trace has " + std::to_string(trace_.num_zones()) +
              " zones but there are " + std::to_string(config_.clusters) +
              " clusters");
}

Vector DatacenterProblem::prices(std::size_t t) const {
  require(t < trace_.length(), "datacenter: slot beyond the price trace");
  Vector c(static_cast<Index>(config_.num_servers()));
  for (std::size_t k = 0; k < config_.num_servers(); ++k) {
    c[static_cast<Index>(k)] = trace_.prices[config_.cluster_of(k)][t];
  }
  return c;
}

Matrix DatacenterProblem::pacing_matrix(const Vector& weights) const {
  const Index groups = static_cast<Index>(config_.pacing_groups.size());
  Matrix m(groups, weights.size());
  for (Index j = 0; j < groups; ++j) {
    const auto& group = config_.pacing_groups[static_cast<std::size_t>(j)];
    const double ratio = config_.pacing_ratios[static_cast<std::size_t>(j)];
    for (Index k = 0; k < weights.size(); ++k) {
      const std::size_t cluster = config_.cluster_of(static_cast<std::size_t>(k));
      const bool member =
          std::find(group.begin(), group.end(), cluster) != group.end();
      m(j, k) = weights[k] * ((member ? 1.0 : 0.0) - ratio);
    }
  }
  return m;
}

std::unique_ptr<DatacenterSlot> DatacenterProblem::sample_slot(std::size_t t,
                                                               Rng& rng) const {
  const Index d = dimension();
  const double arrivals =
      static_cast<double>(poisson_sample(config_.arrival_mean, rng));
  Vector noise(d);
  for (Index k = 0; k < d; ++k) {
    noise[k] = pareto_sample(1.0, config_.pareto_shape, rng);
  }
  Vector budget(d);
  for (Index k = 0; k < d; ++k) {
    budget[k] = pareto_sample(config_.budget_mean, config_.pareto_shape, rng);
  }
  return std::make_unique<DatacenterSlot>(config_, prices(t), arrivals,
                                          std::move(noise), pacing_matrix(budget));
}

std::unique_ptr<SlotRealization> DatacenterProblem::sample(std::size_t t,
                                                           Rng& rng) const {
  return sample_slot(t, rng);
}

std::shared_ptr<const ConvexFunction> DatacenterProblem::mean_objective(
    std::size_t t, std::size_t k) const {
  require(k > 0, "mean_objective: window length must be positive");
  require(t + k <= trace_.length(), "datacenter: window beyond the price trace");
  Vector total = Vector::Zero(dimension());
  for (std::size_t s = t; s < t + k; ++s) total += prices(s);
  return std::make_shared<AffineFunction>(total / static_cast<double>(k), 0.0);
}

std::shared_ptr<const ConvexFunction> DatacenterProblem::mean_inequality(
    Index) const {
  return std::make_shared<ServiceDeficit>(
      config_.arrival_mean, Vector::Ones(dimension()), config_.service);
}

Matrix DatacenterProblem::mean_equality_vectors() const {
  return pacing_matrix(Vector::Constant(dimension(), config_.budget_mean));
}

ProblemConstants DatacenterProblem::constants(
    const BregmanGeometry& geometry) const {
  ProblemConstants out;
  const double max_power = config_.service.max_power;
  for (std::size_t t = 0; t < trace_.length(); ++t) {
    const Vector c = prices(t);
    out.objective_gradient = std::max(out.objective_gradient, geometry.dual_norm(c));
    out.objective_value =
        std::max(out.objective_value, c.cwiseAbs().sum() * max_power);
  }

  // Pareto noise is unbounded; use a fixed-seed Monte Carlo bound.
  constexpr int kDraws = 20000;
  Rng rng(0x5eed);
  const Index d = dimension();
  const Vector top = Vector::Constant(d, max_power);
  std::vector<double> gradient, value, equality;
  gradient.reserve(kDraws);
  value.reserve(kDraws);
  equality.reserve(kDraws);
  for (int draw = 0; draw < kDraws; ++draw) {
    const auto slot = sample_slot(0, rng);
    gradient.push_back(geometry.dual_norm(slot->inequality_gradient(0, Vector::Zero(d))));
    value.push_back(std::max(std::abs(slot->inequality(0, Vector::Zero(d))),
                             std::abs(slot->inequality(0, top))));
    double sq = 0.0;
    for (Index j = 0; j < slot->equality_vectors().rows(); ++j) {
      const double n = geometry.dual_norm(slot->equality_vectors().row(j).transpose());
      sq += n * n;
    }
    equality.push_back(std::sqrt(sq));
  }
  out.constraint_gradient = inflated_quantile(std::move(gradient));
  out.constraint_value = inflated_quantile(std::move(value));
  out.equality_vector = inflated_quantile(std::move(equality));
  out.divergence = divergence_radius(geometry, set());
  return out;
}

std::shared_ptr<const DatacenterProblem> build_datacenter_problem(
    const DatacenterConfig& config, PriceTrace prices, std::size_t horizon) {
  require(prices.length() >= horizon,
          "datacenter: price trace has " + std::to_string(prices.length()) +
              " slots, need " + std::to_string(horizon));
  return std::make_shared<const DatacenterProblem>(config, std::move(prices));
}

Vector reac_policy_step(std::span<const double> arrival_history,
                        const DatacenterConfig& config) {
  require(!arrival_history.empty(), "reac: arrival history must be nonempty");
  // Pad at the front with the oldest observation up to the window length.
  const std::size_t window = config.reac_window;
  const std::size_t used = std::min(window, arrival_history.size());
  const auto recent = arrival_history.last(used);
  double total = std::accumulate(recent.begin(), recent.end(), 0.0);
  total += static_cast<double>(window - used) * recent.front();
  const double forecast = total / static_cast<double>(window);

  Vector mu = Vector::Zero(static_cast<Index>(config.num_servers()));
  for (std::size_t j = 0; j < config.pacing_groups.size(); ++j) {
    const auto& group = config.pacing_groups[j];
    const double cluster_load = config.pacing_ratios[j] * forecast /
                                static_cast<double>(group.size());
    const double server_load =
        cluster_load / static_cast<double>(config.servers_per_cluster);
    const double power = config.service.inverse(server_load);
    for (std::size_t cluster : group) {
      for (std::size_t s = 0; s < config.servers_per_cluster; ++s) {
        mu[static_cast<Index>(cluster * config.servers_per_cluster + s)] = power;
      }
    }
  }
  return mu;
}

Policy make_reac_policy(const DatacenterConfig& config) {
  auto history = std::make_shared<std::deque<double>>();
  return [config, history](std::size_t, const SlotRealization* previous) {
    if (previous != nullptr) {
      const auto* slot = dynamic_cast<const DatacenterSlot*>(previous);
      if (slot == nullptr) throw RuntimeError("reac: needs data center slots");
      history->push_back(slot->arrivals());
      if (history->size() > config.reac_window) history->pop_front();
    }
    if (history->empty()) {
      const double prior[] = {config.arrival_mean};
      return reac_policy_step(prior, config);
    }
    const std::vector<double> window(history->begin(), history->end());
    return reac_policy_step(window, config);
  };
}

RunRecord run_reac(const DatacenterProblem& problem, std::size_t horizon,
                   std::uint64_t seed, const std::optional<Vector>& comparator) {
  return run_policy(problem, horizon, seed, make_reac_policy(problem.config()),
                    "reac", comparator);
}

}  // namespace pdomd
