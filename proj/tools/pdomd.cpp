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


// pdomd: run experiments, rate sweeps, price-trace generation and replay
// audits from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pdomd/experiment.hpp"
#include "pdomd/price_trace.hpp"
#include "pdomd/telemetry.hpp"
#include "pdomd/text.hpp"

namespace {

using namespace pdomd;

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

struct CommonOptions {
  std::string config;
  std::string out;
  std::string seeds;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON experiment config")->required();
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--seeds", o.seeds, "seed range a..b (overrides seeds)");
  cmd->add_option("--workers", o.workers, "worker threads, 0 for all cores");
}

ExperimentConfig load(const CommonOptions& o) {
  ExperimentConfig c = parse_config(std::filesystem::path(o.config));
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.workers) c.workers = *o.workers;
  if (!o.seeds.empty()) {
    nlohmann::json range = o.seeds;
    nlohmann::json j = config_to_json(c);
    j["seeds"] = range;
    const auto base = c.base_dir;
    const auto out = c.output_dir;
    const auto workers = c.workers;
    c = parse_config(j);
    c.base_dir = base;
    c.output_dir = out;
    c.workers = workers;
  }
  return c;
}

void print_mean(const char* label, const MeanError& m) {
  std::cout << "  " << label << ": " << format_double(m.mean) << " +- "
            << format_double(m.standard_error) << '\n';
}

int cmd_run(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  const ExperimentResult r = run_experiment(c);
  write_experiment(c, r);
  std::cout << "config " << r.config_hash << ", T=" << c.horizon() << ", "
            << c.seeds.size() << " seeds\n"
            << "hindsight value " << format_double(r.hindsight.value) << '\n';
  for (const PolicyResults& p : r.policies) {
    std::cout << p.policy << '\n';
    if (p.aggregate.expected_regret) print_mean("regret", *p.aggregate.expected_regret);
    print_mean("realized regret", p.aggregate.realized_regret);
    if (p.aggregate.inequality_violation) {
      print_mean("inequality violation", *p.aggregate.inequality_violation);
    }
    if (p.aggregate.equality_violation) {
      print_mean("equality violation", *p.aggregate.equality_violation);
    }
  }
  std::cout << "wrote " << c.output_dir.string() << '\n';
  return 0;
}

std::string slope_text(const SlopeFit& f) {
  if (f.degenerate) return "degenerate";
  return format_double(f.slope) + " [" + format_double(f.ci_low) + ", " +
         format_double(f.ci_high) + "]";
}

int cmd_sweep(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  const RateReport r = sweep_rates(c);
  write_rate_report(c, r);
  std::cout << "T, regret, inequality violation, equality violation, dual/sqrt(T)\n";
  for (const RatePoint& p : r.points) {
    std::cout << p.horizon << ", " << format_double(p.regret.mean) << ", "
              << format_double(p.inequality_violation.mean) << ", "
              << format_double(p.equality_violation.mean) << ", "
              << format_double(p.dual_norm_ratio.mean) << '\n';
  }
  std::cout << "regret slope " << slope_text(r.regret) << '\n'
            << "T * inequality violation slope " << slope_text(r.scaled_inequality) << '\n'
            << "T * equality violation slope " << slope_text(r.scaled_equality) << '\n';
  return 0;
}

struct TraceOptions {
  std::string config;
  std::string out;
  std::size_t slots = 2000;
  std::optional<std::uint64_t> seed;
};

int cmd_gen_trace(const TraceOptions& o) {
  TraceGeneratorOptions options;
  if (!o.config.empty()) {
    const ExperimentConfig c = parse_config(std::filesystem::path(o.config));
    options = c.datacenter.trace;
  }
  options.slots = o.slots;
  if (o.seed) options.seed = *o.seed;
  if (o.slots == 0) throw ConfigError("gen-trace: --slots must be positive");
  export_price_trace(generate_price_trace(options), o.out);
  std::cout << "wrote " << o.out << " (" << options.slots << " slots, "
            << options.zone_levels.size() << " zones)\n";
  return 0;
}

struct AuditOptions {
  std::string record;
  std::string config;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  bool previous = false;
};

int cmd_audit(const AuditOptions& o) {
  namespace fs = std::filesystem;
  const fs::path record_path(o.record);
  fs::path config_path(o.config);
  if (config_path.empty()) {
    // Default layout written by `run`: <out>/records/<name>.csv next to
    // <out>/config.json.
    config_path = record_path.parent_path().parent_path() / "config.json";
  }
  const ExperimentConfig c = parse_config(config_path);
  const RunRecord record = import_record(record_path);
  const std::string hash = config_hash(c);
  if (record.header.config_hash != hash) {
    throw ConfigError("audit: record hash " + record.header.config_hash +
                      " does not match config hash " + hash);
  }
  if (record.header.policy != "primal-dual") {
    throw ConfigError("audit: only primal-dual records can be audited, got '" +
                      record.header.policy + "'");
  }
  const auto problem = build_problem(c, record.length());
  DppAuditOptions options;
  options.samples = o.samples;
  options.seed = o.seed;
  options.comparator_at_previous = o.previous;
  const DppAuditResult r = dpp_audit(record, *problem, options);
  std::cout << "checked " << r.checked << " slots, worst residual "
            << format_double(r.worst_residual) << " at slot " << r.worst_slot
            << ", constant " << format_double(r.constant) << '\n';
  if (r.worst_residual > o.tolerance) {
    std::cerr << "audit failed: residual above tolerance " << format_double(o.tolerance)
              << '\n';
    return kRuntimeExit;
  }
  std::cout << "audit passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-dual online mirror descent experiments"};
  app.require_subcommand(1);

  CommonOptions run_options;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment and write its outputs");
  add_common(run_cmd, run_options);

  CommonOptions sweep_options;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "fit regret and violation rates over T");
  add_common(sweep_cmd, sweep_options);

  TraceOptions trace_options;
  CLI::App* trace_cmd = app.add_subcommand("gen-trace", "write a synthetic price trace");
  trace_cmd->add_option("--out", trace_options.out, "output CSV")->required();
  trace_cmd->add_option("--slots", trace_options.slots, "number of slots");
  trace_cmd->add_option("--seed", trace_options.seed, "generator seed");
  trace_cmd->add_option("--config", trace_options.config,
                        "take generator settings from datacenter.trace");

  AuditOptions audit_options;
  CLI::App* audit_cmd = app.add_subcommand("audit", "replay a record and check the DPP bound");
  audit_cmd->add_option("--record", audit_options.record, "record CSV or JSON")->required();
  audit_cmd->add_option("--config", audit_options.config,
                        "experiment config (default: ../config.json next to the record)");
  audit_cmd->add_option("--samples", audit_options.samples, "slots to check");
  audit_cmd->add_option("--seed", audit_options.seed, "sampling seed");
  audit_cmd->add_option("--tolerance", audit_options.tolerance, "largest allowed residual");
  audit_cmd->add_flag("--previous", audit_options.previous,
                      "compare against the previous decision instead of random points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run_cmd) return cmd_run(run_options);
    if (*sweep_cmd) return cmd_sweep(sweep_options);
    if (*trace_cmd) return cmd_gen_trace(trace_options);
    if (*audit_cmd) return cmd_audit(audit_options);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
