#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <tbb/global_control.h>

#include "mingap/errors.hpp"
#include "mingap/experiments.hpp"

namespace mingap {

using nlohmann::json;

namespace {

std::string opt_double(const std::optional<double>& x) {
  return x ? fmt::format("{:.17g}", *x) : std::string();
}

std::string opt_int(const std::optional<std::int64_t>& x) {
  return x ? fmt::format("{}", *x) : std::string();
}

json row_to_json(const ResultRow& r) {
  json j;
  j["N"] = r.n;
  j["alpha_id"] = r.alpha_id;
  j["alpha_hex"] = r.alpha.to_string();
  j["delta_min_hex"] = r.delta_min.hex();
  j["delta_min"] = r.delta_min.decimal();
  j["scaled"] = r.scaled;
  j["d_value"] = r.d_value ? json(*r.d_value) : json(nullptr);
  j["M"] = r.m ? json(*r.m) : json(nullptr);
  j["collision"] = r.collision;
  j["t1_violation"] = r.t1_violation;
  j["t2_satisfied"] = r.t2_satisfied;
  j["distinct_gaps"] = r.distinct_gaps;
  j["normalized"] = r.normalized ? json(*r.normalized) : json(nullptr);
  return j;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

} // namespace

void write_table_csv(std::ostream& out, const ResultTable& table) {
  out << "N,alpha_id,alpha_hex,delta_min_hex,delta_min,scaled,d_value,M,collision,"
         "t1_violation,t2_satisfied,distinct_gaps,normalized\n";
  for (const auto& r : table.rows) {
    out << fmt::format("{},{},{},{},{},{:.17g},{},{},{},{},{},{},{}\n", r.n, r.alpha_id,
                       r.alpha.to_string(), r.delta_min.hex(), r.delta_min.decimal(), r.scaled,
                       opt_double(r.d_value), opt_int(r.m), r.collision ? 1 : 0,
                       r.t1_violation ? 1 : 0, r.t2_satisfied ? 1 : 0, r.distinct_gaps,
                       opt_double(r.normalized));
  }
}

void write_table_json(std::ostream& out, const ResultTable& table) {
  json j;
  j["family"] = table.family;
  j["params"] = table.params;
  j["bits"] = table.bits;
  j["seed"] = table.seed;
  j["eta"] = table.eta;
  j["warnings"] = table.warnings;
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(row_to_json(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e) != nullptr) {
    return kExitResource;
  }
  if (dynamic_cast<const Error*>(&e) != nullptr) {
    return kExitValidation;
  }
  return 1;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& fallback_out) {
  cfg.validate();
  std::unique_ptr<tbb::global_control> limit;
  if (cfg.threads > 0) {
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  cfg.threads);
  }
  const std::string started = iso_now();
  const auto t0 = std::chrono::steady_clock::now();

  RunOutcome outcome;
  ResultTable table;
  json verdict;
  auto verdict_line = [&](bool passed, const std::string& text) {
    outcome.summary += fmt::format("{}: {}\n", passed ? "PASS" : "FAIL", text);
    if (!passed) {
      outcome.exit_code = kExitVerification;
    }
  };

  switch (cfg.experiment) {
  case ExperimentKind::scan: {
    table = scan_minimal_gap(cfg);
    outcome.summary = fmt::format("scan: {} rows\n", table.rows.size());
    break;
  }
  case ExperimentKind::theorem1: {
    auto run = verify_theorem1(cfg);
    table = std::move(run.table);
    const auto& r = run.report;
    verdict = {{"samples", r.samples}, {"violations", r.violations}, {"fraction", r.fraction},
               {"max_fraction", r.max_fraction}, {"passed", r.passed}};
    verdict_line(r.passed, fmt::format("theorem1 lower bound: {}/{} violations ({:.4f} <= {})",
                                       r.violations, r.samples, r.fraction, r.max_fraction));
    for (const auto& d : r.d_diagnostics) {
      outcome.summary += fmt::format("  N={} M={} mean D={:.6g} +- {:.3g} (predicted {:.6g})\n",
                                     d.n, d.m, d.mean, d.std_error, d.predicted);
    }
    break;
  }
  case ExperimentKind::theorem2: {
    auto run = verify_theorem2(cfg);
    table = std::move(run.table);
    const auto& r = run.report;
    verdict = {{"samples", r.samples}, {"satisfied", r.satisfied}, {"fraction", r.fraction},
               {"min_fraction", r.min_fraction}, {"passed", r.passed},
               {"hypothesis_N", r.hypothesis_n}, {"hypothesis_exponent", r.hypothesis_exponent},
               {"hypothesis_ok", r.hypothesis_ok}, {"gap_events", r.gap_events},
               {"d_events", r.d_events}, {"implication_failures", r.implication_failures}};
    verdict_line(r.passed, fmt::format("theorem2 upper bound: {}/{} satisfied ({:.4f} >= {}); "
                                       "{} implication failures; energy exponent {:.3f} at N={}{}",
                                       r.satisfied, r.samples, r.fraction, r.min_fraction,
                                       r.implication_failures, r.hypothesis_exponent,
                                       r.hypothesis_n, r.hypothesis_ok ? "" : " (hypothesis unmet)"));
    break;
  }
  case ExperimentKind::threegap: {
    auto run = verify_three_gap(cfg);
    table = std::move(run.table);
    verdict = {{"samples", run.report.samples}, {"max_distinct", run.report.max_distinct},
               {"passed", run.report.passed}};
    verdict_line(run.report.passed, fmt::format("three gaps: max distinct gaps {} over {} cells",
                                                run.report.max_distinct, run.report.samples));
    break;
  }
  case ExperimentKind::primes: {
    auto run = prime_gap_experiment(cfg);
    table = std::move(run.table);
    const auto& r = run.report;
    verdict = {{"samples", r.samples}, {"excluded_collisions", r.excluded_collisions},
               {"normalized_min", r.normalized_min}, {"normalized_median", r.normalized_median},
               {"floor_violations", r.floor_violations}, {"passed", r.passed}};
    verdict_line(r.passed, fmt::format("primes: {} floor violations; normalized min {:.6g}, "
                                       "median {:.6g}",
                                       r.floor_violations, r.normalized_min, r.normalized_median));
    break;
  }
  }

  auto write = [&](std::ostream& out) {
    if (cfg.format == OutputFormat::csv) {
      write_table_csv(out, table);
    } else {
      write_table_json(out, table);
    }
  };
  if (cfg.output_path.empty()) {
    write(fallback_out);
  } else {
    outcome.data_path = cfg.output_path;
    std::ofstream out(outcome.data_path);
    if (!out) {
      throw InputError("cannot write " + cfg.output_path);
    }
    write(out);
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.output_path.empty()) {
    json manifest;
    manifest["config"] = json::parse(config_to_json(cfg));
    manifest["seed"] = cfg.alphas.seed;
    manifest["version"] = version();
    manifest["started"] = started;
    manifest["elapsed_s"] = elapsed;
    manifest["warnings"] = table.warnings;
    if (!verdict.is_null()) {
      manifest["verdict"] = verdict;
    }
    outcome.manifest_path = cfg.output_path + ".manifest.json";
    std::ofstream m(outcome.manifest_path);
    m << manifest.dump(2) << '\n';
  }
  for (const auto& w : table.warnings) {
    outcome.summary += "warning: " + w + "\n";
  }
  return outcome;
}

RunOutcome run_config(const std::filesystem::path& path, std::ostream& fallback_out) {
  return run_experiment(load_config(path), fallback_out);
}

} // namespace mingap
