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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdomd {

// Per-zone electricity price series with a shared slot index.
struct PriceTrace {
  std::vector<std::string> zones;
  std::vector<std::vector<double>> prices;  // [zone][slot]

  std::size_t num_zones() const { return zones.size(); }
  std::size_t length() const { return prices.empty() ? 0 : prices.front().size(); }
};

bool operator==(const PriceTrace& a, const PriceTrace& b);

// Long-format CSV with header "slot,zone,price". Zones keep the order of their
// first appearance; slots must form the same contiguous range in every zone.
PriceTrace parse_price_trace(std::istream& in,
                             std::optional<std::size_t> expected_zones = {});
PriceTrace ingest_price_trace(const std::filesystem::path& path,
                              std::optional<std::size_t> expected_zones = {});

void write_price_trace(const PriceTrace& trace, std::ostream& out);
void export_price_trace(const PriceTrace& trace,
                        const std::filesystem::path& path);

// Seeded synthetic trace: per zone, mean * level * (1 + a sin(2 pi t / period +
// phase)) times a mean-one lognormal factor with log-std sigma.
struct TraceGeneratorOptions {
  std::size_t slots = 2000;
  std::uint64_t seed = 0;
  double mean = 30.0;
  double sigma = 0.4;
  std::vector<double> zone_levels = {0.85, 0.95, 1.0, 1.1, 1.2};
  double diurnal_amplitude = 0.25;
  std::size_t period = 288;  // 5-minute slots per day
};

PriceTrace generate_price_trace(const TraceGeneratorOptions& options);

}  // namespace pdomd
