#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mingap/circle.hpp"
#include "mingap/sequences.hpp"
#include "mingap/window.hpp"

namespace mingap {

std::string version();

enum class ExperimentKind { scan, theorem1, theorem2, threegap, primes };
enum class OutputFormat { csv, json };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// M as a function of N: c N^(2 - eta), c N^(2 + eta), or c N; floored, >= 1.
struct MRule {
  enum class Form { none, n2_minus_eta, n2_plus_eta, linear };
  Form form = Form::none;
  double c = 1.0;

  std::optional<std::int64_t> evaluate(std::size_t n, double eta) const;
  std::string to_string() const;
  static MRule parse(std::string_view text);
};

struct AlphaSpec {
  std::size_t samples = 32;
  std::uint64_t seed = 1;
  unsigned bits = 0;  // 0: default_bits for the sequence
  /// When non-empty, used instead of sampling.
  std::vector<FixedPointAngle> explicit_angles;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::scan;
  SequenceSource sequence{};
  std::vector<std::size_t> ns;
  AlphaSpec alphas;
  MRule m_rule;
  WindowKind window = WindowKind::triangle;
  double eta = 0.2;
  double epsilon = 0.1;
  double max_violation_fraction = 0.10;
  double min_satisfaction_fraction = 0.90;
  /// Largest N at which the energy hypothesis of the upper-bound check is measured.
  std::size_t hypothesis_energy_n = 1024;
  double max_energy_exponent = 2.7;
  std::size_t threads = 0;  // 0: library default
  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses the JSON config layout documented in the README. Syntax errors
/// and field errors throw ConfigError with a line number or field name.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// "a,b,c" or "geom:start:stop:factor".
std::vector<std::size_t> parse_grid(std::string_view text);

enum class GridKind { theorem1, corollary };

inline constexpr std::size_t kMaxGridValue = 10'000'000;

/// N_k = floor(k^(2/eta)) (theorem1) or floor(k^(4/eta)) (corollary) for
/// k = 1..k_max, keeping values >= 2, ascending and deduplicated. Values past
/// 10^7 are dropped and a warning is appended.
std::vector<std::size_t> borel_cantelli_grid(GridKind kind, double eta, std::size_t k_max,
                                             std::vector<std::string>* warnings = nullptr);

struct ResultRow {
  std::size_t n = 0;
  std::size_t alpha_id = 0;
  FixedPointAngle alpha{0, kMinAngleBits};
  DyadicValue delta_min;
  double scaled = 0.0;  // N^2 delta_min
  std::optional<double> d_value;
  std::optional<std::int64_t> m;
  bool collision = false;
  bool t1_violation = false;  // delta_min <= N^-(2 + eta)
  bool t2_satisfied = false;  // delta_min <  N^-(2 - eta)
  std::size_t distinct_gaps = 0;
  std::optional<double> normalized;  // delta_min N (log N)^(2 + eps), primes only
};

struct ResultTable {
  std::string family;
  std::string params;
  unsigned bits = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  std::vector<ResultRow> rows;  // ordered by (alpha_id, N)
  std::vector<std::string> warnings;
};

/// Builds one row from a gap report; flags use `eta`.
ResultRow make_row(const GapReport& gaps, std::size_t n, std::size_t alpha_id,
                   const FixedPointAngle& alpha, double eta);

/// delta <= N^-(exponent), decided on exact log2 values.
bool dyadic_at_most_power(const DyadicValue& delta, std::size_t n, double exponent);

/// The angles a config scans: explicit ones, or samples 0..S-1 of the seed.
std::vector<FixedPointAngle> config_angles(const ExperimentConfig& cfg, const IntegerSequence& seq);

/// Every (alpha, N) cell of the config; D(N, M) is filled in when the config
/// has an M rule. Deterministic for a given config regardless of threads.
ResultTable scan_minimal_gap(const ExperimentConfig& cfg);
ResultTable scan_minimal_gap(const ExperimentConfig& cfg, const IntegerSequence& seq);

struct ExponentFit {
  std::vector<std::pair<std::size_t, double>> per_alpha;  // (alpha_id, slope)
  double median_slope = 0.0;
};

/// Least-squares slope of log delta_min against log N per angle; collision
/// rows are skipped, angles with fewer than 3 distinct N are skipped.
ExponentFit fit_exponent(const ResultTable& table);

struct DDiagnostic {
  std::size_t n = 0;
  std::int64_t m = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double predicted = 0.0;  // N(N-1)/M
};

struct Theorem1Report {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double fraction = 0.0;
  double max_fraction = 0.0;
  bool passed = false;
  std::vector<DDiagnostic> d_diagnostics;
};

/// Violation fraction over the rows only.
Theorem1Report evaluate_theorem1(const ResultTable& table, double max_fraction);

struct Theorem1Run {
  ResultTable table;
  Theorem1Report report;
};
Theorem1Run verify_theorem1(const ExperimentConfig& cfg);

struct Theorem2Report {
  std::size_t samples = 0;
  std::size_t satisfied = 0;
  double fraction = 0.0;
  double min_fraction = 0.0;
  bool passed = false;
  std::size_t hypothesis_n = 0;
  double hypothesis_exponent = 0.0;
  bool hypothesis_ok = true;
  /// Cells with delta_min <= 1/(4M) for M = N^(2 - eta)/2, and among
  /// them the ones with D < 1 (must stay 0 for a threshold-ok window).
  std::size_t gap_events = 0;
  std::size_t d_events = 0;  // cells with D >= 1
  std::size_t implication_failures = 0;
};

Theorem2Report evaluate_theorem2(const ResultTable& table, double min_fraction);

struct Theorem2Run {
  ResultTable table;
  Theorem2Report report;
};
Theorem2Run verify_theorem2(const ExperimentConfig& cfg);

struct ThreeGapReport {
  std::size_t samples = 0;
  std::size_t max_distinct = 0;
  bool passed = false;
};

struct ThreeGapRun {
  ResultTable table;
  ThreeGapReport report;
};
ThreeGapRun verify_three_gap(const ExperimentConfig& cfg);

struct PrimeReport {
  std::size_t samples = 0;
  std::size_t excluded_collisions = 0;
  double normalized_min = 0.0;
  double normalized_median = 0.0;
  /// Cells at N >= 1024 with delta_min <= N^-2.1.
  std::size_t floor_violations = 0;
  bool passed = false;
};

struct PrimeRun {
  ResultTable table;
  PrimeReport report;
};
PrimeRun prime_gap_experiment(const ExperimentConfig& cfg);

void write_table_csv(std::ostream& out, const ResultTable& table);
void write_table_json(std::ostream& out, const ResultTable& table);

/// Exit codes shared by run_config and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitVerification = 4;

/// Maps a caught exception onto the exit code table.
int exit_code_for(const std::exception& e);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string summary;  // one line per verdict
  std::filesystem::path data_path;
  std::filesystem::path manifest_path;
};

/// Runs `cfg`, writes the table to cfg.output_path (stdout when empty)
/// and a `<output>.manifest.json` next to it. Library errors propagate.
RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& fallback_out);

/// load_config + run_experiment.
RunOutcome run_config(const std::filesystem::path& path, std::ostream& fallback_out);

} // namespace mingap
