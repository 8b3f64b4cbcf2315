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

#include "pdomd/price_trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "pdomd/text.hpp"
#include "pdomd/types.hpp"

namespace pdomd {

bool operator==(const PriceTrace& a, const PriceTrace& b) {
  return a.zones == b.zones && a.prices == b.prices;
}

PriceTrace parse_price_trace(std::istream& in,
                             std::optional<std::size_t> expected_zones) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("price trace: empty file");
  if (trim(line) != "slot,zone,price") {
    throw ConfigError("price trace: expected header 'slot,zone,price', got '" +
                      trim(line) + "'");
  }
  std::vector<std::string> zones;
  std::map<std::string, std::map<long long, double>> series;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto fields = split(row, ',');
    const std::string where = "price trace line " + std::to_string(line_number);
    if (fields.size() != 3) throw ConfigError(where + ": expected 3 fields");
    const auto slot = parse_integer(trim(fields[0]));
    if (!slot || *slot < 0) throw ConfigError(where + ": malformed slot");
    const std::string zone = trim(fields[1]);
    if (zone.empty()) throw ConfigError(where + ": empty zone name");
    const auto price = parse_double(trim(fields[2]));
    if (!price || !std::isfinite(*price)) {
      throw ConfigError(where + ": malformed price '" + trim(fields[2]) + "'");
    }
    auto [it, inserted] = series.try_emplace(zone);
    if (inserted) zones.push_back(zone);
    if (!it->second.emplace(*slot, *price).second) {
      throw ConfigError(where + ": duplicate slot for zone " + zone);
    }
  }
  if (zones.empty()) throw ConfigError("price trace: no data rows");
  if (expected_zones && zones.size() != *expected_zones) {
    throw ConfigError("price trace: expected " + std::to_string(*expected_zones) +
                      " zones, found " + std::to_string(zones.size()));
  }

  PriceTrace trace;
  trace.zones = zones;
  const auto& reference = series.at(zones.front());
  const long long first_slot = reference.begin()->first;
  for (const auto& zone : zones) {
    const auto& s = series.at(zone);
    if (s.size() != reference.size()) {
      throw ConfigError("price trace: ragged zone lengths (" + zone + " has " +
                        std::to_string(s.size()) + " slots, " + zones.front() +
                        " has " + std::to_string(reference.size()) + ")");
    }
    std::vector<double> values;
    values.reserve(s.size());
    long long expected = first_slot;
    for (const auto& [slot, price] : s) {
      if (slot != expected) {
        throw ConfigError("price trace: zone " + zone + " is missing slot " +
                          std::to_string(expected));
      }
      values.push_back(price);
      ++expected;
    }
    trace.prices.push_back(std::move(values));
  }
  return trace;
}

PriceTrace ingest_price_trace(const std::filesystem::path& path,
                              std::optional<std::size_t> expected_zones) {
  std::ifstream in(path);
  if (!in) throw ConfigError("price trace: cannot open " + path.string());
  return parse_price_trace(in, expected_zones);
}

void write_price_trace(const PriceTrace& trace, std::ostream& out) {
  out << "slot,zone,price\n";
  for (std::size_t t = 0; t < trace.length(); ++t) {
    for (std::size_t z = 0; z < trace.num_zones(); ++z) {
      out << t << ',' << trace.zones[z] << ',' << format_double(trace.prices[z][t])
          << '\n';
    }
  }
}

void export_price_trace(const PriceTrace& trace,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("price trace: cannot write " + path.string());
  write_price_trace(trace, out);
  if (!out) throw RuntimeError("price trace: write failed for " + path.string());
}

PriceTrace generate_price_trace(const TraceGeneratorOptions& options) {
  require(!options.zone_levels.empty(), "trace generator: need at least one zone");
  require(options.period > 0, "trace generator: period must be positive");
  require(options.sigma >= 0.0, "trace generator: sigma must be nonnegative");
  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PriceTrace trace;
  const std::size_t zones = options.zone_levels.size();
  trace.prices.assign(zones, std::vector<double>(options.slots));
  for (std::size_t z = 0; z < zones; ++z) {
    trace.zones.push_back("zone" + std::to_string(z + 1));
  }
  const double correction = 0.5 * options.sigma * options.sigma;
  for (std::size_t t = 0; t < options.slots; ++t) {
    for (std::size_t z = 0; z < zones; ++z) {
      const double phase =
          2.0 * std::numbers::pi *
          (static_cast<double>(t) / static_cast<double>(options.period) +
           static_cast<double>(z) / static_cast<double>(2 * zones));
      const double level = options.mean * options.zone_levels[z] *
                           (1.0 + options.diurnal_amplitude * std::sin(phase));
      trace.prices[z][t] =
          level * std::exp(options.sigma * normal(rng) - correction);
    }
  }
  return trace;
}

}  // namespace pdomd
