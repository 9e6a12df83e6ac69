#include "mingap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mingap/dstat.hpp"
#include "mingap/energy.hpp"
#include "mingap/errors.hpp"
#include "parallel.hpp"

namespace mingap {

using nlohmann::json;

std::string version() { return MINGAP_VERSION; }

std::string to_string(ExperimentKind kind) {
  switch (kind) {
  case ExperimentKind::scan: return "scan";
  case ExperimentKind::theorem1: return "theorem1";
  case ExperimentKind::theorem2: return "theorem2";
  case ExperimentKind::threegap: return "threegap";
  case ExperimentKind::primes: return "primes";
  }
  return "scan";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::scan, ExperimentKind::theorem1, ExperimentKind::theorem2,
                 ExperimentKind::threegap, ExperimentKind::primes}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  throw ConfigError(fmt::format(
      "experiment must be one of scan|theorem1|theorem2|threegap|primes, got '{}'",
      std::string(text)));
}

// ---------------------------------------------------------------------------
// M rules

std::optional<std::int64_t> MRule::evaluate(std::size_t n, double eta) const {
  const double x = static_cast<double>(n);
  double m = 0.0;
  switch (form) {
  case Form::none: return std::nullopt;
  case Form::n2_minus_eta: m = c * std::pow(x, 2.0 - eta); break;
  case Form::n2_plus_eta: m = c * std::pow(x, 2.0 + eta); break;
  case Form::linear: m = c * x; break;
  }
  if (!(m < 9.0e18)) {
    throw ResourceError(fmt::format("M = {:.3g} at N = {} does not fit a 64-bit integer", m, n));
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(m)));
}

std::string MRule::to_string() const {
  switch (form) {
  case Form::none: return "";
  case Form::n2_minus_eta: return fmt::format("{}*N^(2-eta)", c);
  case Form::n2_plus_eta: return fmt::format("{}*N^(2+eta)", c);
  case Form::linear: return fmt::format("{}*N", c);
  }
  return "";
}

MRule MRule::parse(std::string_view text) {
  MRule rule;
  if (text.empty()) {
    return rule;
  }
  std::string body(text);
  body.erase(std::remove(body.begin(), body.end(), ' '), body.end());
  const auto star = body.find('*');
  std::string shape = body;
  if (star != std::string::npos) {
    try {
      std::size_t used = 0;
      rule.c = std::stod(body.substr(0, star), &used);
      if (used != star) {
        throw std::invalid_argument("trailing");
      }
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("M_rule '{}': bad constant", std::string(text)));
    }
    shape = body.substr(star + 1);
  }
  if (shape == "N^(2-eta)") {
    rule.form = Form::n2_minus_eta;
  } else if (shape == "N^(2+eta)") {
    rule.form = Form::n2_plus_eta;
  } else if (shape == "N") {
    rule.form = Form::linear;
  } else {
    throw ConfigError(fmt::format(
        "M_rule '{}' must be c*N^(2-eta), c*N^(2+eta) or c*N", std::string(text)));
  }
  if (!(rule.c > 0.0)) {
    throw ConfigError("M_rule constant must be positive");
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Grids

std::vector<std::size_t> parse_grid(std::string_view text) {
  auto to_size = [&](const std::string& s) -> std::size_t {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) {
        throw std::invalid_argument("trailing");
      }
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("N grid '{}': bad integer '{}'", std::string(text), s));
    }
  };
  std::vector<std::string> parts;
  std::string cur;
  const bool geom = text.rfind("geom:", 0) == 0;
  const std::string_view body = geom ? text.substr(5) : text;
  const char sep = geom ? ':' : ',';
  for (char ch : body) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  parts.push_back(cur);

  std::vector<std::size_t> out;
  if (geom) {
    if (parts.size() != 3) {
      throw ConfigError(fmt::format("N grid '{}' must be geom:start:stop:factor", std::string(text)));
    }
    const std::size_t start = to_size(parts[0]);
    const std::size_t stop = to_size(parts[1]);
    const std::size_t factor = to_size(parts[2]);
    if (start < 2 || factor < 2 || stop < start) {
      throw ConfigError(fmt::format("N grid '{}': need 2 <= start <= stop and factor >= 2",
                                    std::string(text)));
    }
    for (std::size_t n = start; n <= stop; n *= factor) {
      out.push_back(n);
      if (n > stop / factor) {
        break;
      }
    }
  } else {
    for (const auto& p : parts) {
      out.push_back(to_size(p));
    }
  }
  return out;
}

std::vector<std::size_t> borel_cantelli_grid(GridKind kind, double eta, std::size_t k_max,
                                             std::vector<std::string>* warnings) {
  if (!(eta > 0.0 && eta < 2.0)) {
    throw ConfigError("eta must be in (0,2)");
  }
  if (k_max < 2) {
    throw ConfigError("k_max must be at least 2");
  }
  const double exponent = (kind == GridKind::theorem1 ? 2.0 : 4.0) / eta;
  const double rounded = std::round(exponent);
  const bool integral = std::fabs(exponent - rounded) < 1e-12;

  std::vector<std::size_t> out;
  bool truncated = false;
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::size_t value = 0;
    if (integral) {
      BigInt p;
      mpz_ui_pow_ui(p.get_mpz_t(), k, static_cast<unsigned long>(rounded));
      if (p > static_cast<unsigned long>(kMaxGridValue)) {
        truncated = true;
        break;
      }
      value = p.get_ui();
    } else {
      const long double v = std::pow(static_cast<long double>(k), static_cast<long double>(exponent));
      if (v > static_cast<long double>(kMaxGridValue)) {
        truncated = true;
        break;
      }
      value = static_cast<std::size_t>(std::floor(v));
    }
    if (value >= 2 && (out.empty() || value > out.back())) {
      out.push_back(value);
    }
  }
  if (truncated && warnings != nullptr) {
    warnings->push_back(fmt::format("grid truncated at N <= {} ({} points kept)", kMaxGridValue,
                                    out.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (ns.empty()) {
    throw ConfigError("Ns must list at least one N");
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 2) {
      throw ConfigError(fmt::format("Ns[{}] = {} must be at least 2", i, ns[i]));
    }
    if (ns[i] > kMaxGridValue) {
      throw ConfigError(fmt::format("Ns[{}] = {} exceeds {}", i, ns[i], kMaxGridValue));
    }
    if (i > 0 && ns[i] <= ns[i - 1]) {
      throw ConfigError("Ns must be strictly ascending");
    }
  }
  if (!(eta > 0.0 && eta < 2.0)) {
    throw ConfigError("eta must be in (0,2)");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("epsilon must be positive");
  }
  if (alphas.explicit_angles.empty() && alphas.samples == 0) {
    throw ConfigError("alphas.samples must be at least 1");
  }
  if (alphas.bits != 0 && alphas.bits < kMinAngleBits) {
    throw ConfigError(fmt::format("alphas.bits must be 0 (automatic) or at least {}", kMinAngleBits));
  }
  if (!(max_violation_fraction >= 0.0 && max_violation_fraction <= 1.0)) {
    throw ConfigError("thresholds.max_violation_fraction must be in [0,1]");
  }
  if (!(min_satisfaction_fraction >= 0.0 && min_satisfaction_fraction <= 1.0)) {
    throw ConfigError("thresholds.min_satisfaction_fraction must be in [0,1]");
  }
  if (experiment == ExperimentKind::primes && sequence.family.kind != Family::primes) {
    throw ConfigError("experiment 'primes' needs sequence 'primes'");
  }
  if (experiment == ExperimentKind::threegap && sequence.family.kind != Family::naturals) {
    throw ConfigError("experiment 'threegap' needs sequence 'naturals'");
  }
}

namespace {

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

template <class T>
T field(const json& j, const char* name) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("field '{}' has the wrong type", name));
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(fmt::format("unknown field '{}{}'", std::string(where), key));
    }
  }
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config syntax error at line {}: {}", line_of_byte(text, e.byte),
                                  e.what()));
  }
  if (!root.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  reject_unknown(root,
                 {"experiment", "sequence", "Ns", "alphas", "M_rule", "window", "eta", "epsilon",
                  "thresholds", "hypothesis_energy_N", "max_energy_exponent", "threads", "output"},
                 "");

  ExperimentConfig cfg;
  if (root.contains("experiment")) {
    cfg.experiment = parse_experiment_kind(field<std::string>(root["experiment"], "experiment"));
  }
  if (!root.contains("sequence")) {
    throw ConfigError("missing field 'sequence'");
  }
  cfg.sequence = SequenceSource::parse(field<std::string>(root["sequence"], "sequence"));
  if (root.contains("eta")) {
    cfg.eta = field<double>(root["eta"], "eta");
  }
  if (root.contains("epsilon")) {
    cfg.epsilon = field<double>(root["epsilon"], "epsilon");
  }

  if (!root.contains("Ns")) {
    throw ConfigError("missing field 'Ns'");
  }
  const json& ns = root["Ns"];
  if (ns.is_array()) {
    cfg.ns = field<std::vector<std::size_t>>(ns, "Ns");
  } else if (ns.is_string()) {
    cfg.ns = parse_grid(ns.get<std::string>());
  } else if (ns.is_object()) {
    reject_unknown(ns, {"grid", "k_max"}, "Ns.");
    const std::string grid = ns.contains("grid") ? field<std::string>(ns["grid"], "Ns.grid") : "";
    if (grid != "theorem1" && grid != "corollary") {
      throw ConfigError("Ns.grid must be 'theorem1' or 'corollary'");
    }
    if (!ns.contains("k_max")) {
      throw ConfigError("missing field 'Ns.k_max'");
    }
    cfg.ns = borel_cantelli_grid(grid == "theorem1" ? GridKind::theorem1 : GridKind::corollary,
                                 cfg.eta, field<std::size_t>(ns["k_max"], "Ns.k_max"));
  } else {
    throw ConfigError("field 'Ns' must be a list, a grid string, or a Borel-Cantelli grid object");
  }

  if (root.contains("alphas")) {
    const json& a = root["alphas"];
    if (!a.is_object()) {
      throw ConfigError("field 'alphas' must be an object");
    }
    reject_unknown(a, {"samples", "seed", "bits", "explicit"}, "alphas.");
    if (a.contains("samples")) {
      cfg.alphas.samples = field<std::size_t>(a["samples"], "alphas.samples");
    }
    if (a.contains("seed")) {
      cfg.alphas.seed = field<std::uint64_t>(a["seed"], "alphas.seed");
    }
    if (a.contains("bits")) {
      cfg.alphas.bits = field<unsigned>(a["bits"], "alphas.bits");
    }
    if (a.contains("explicit")) {
      for (const auto& s : field<std::vector<std::string>>(a["explicit"], "alphas.explicit")) {
        try {
          cfg.alphas.explicit_angles.push_back(FixedPointAngle::parse(s));
        } catch (const Error& e) {
          throw ConfigError(fmt::format("field 'alphas.explicit': {}", e.what()));
        }
      }
    }
  }
  if (root.contains("M_rule")) {
    cfg.m_rule = MRule::parse(field<std::string>(root["M_rule"], "M_rule"));
  }
  if (root.contains("window")) {
    cfg.window = parse_window_kind(field<std::string>(root["window"], "window"));
  }
  if (root.contains("thresholds")) {
    const json& t = root["thresholds"];
    reject_unknown(t, {"max_violation_fraction", "min_satisfaction_fraction"}, "thresholds.");
    if (t.contains("max_violation_fraction")) {
      cfg.max_violation_fraction =
          field<double>(t["max_violation_fraction"], "thresholds.max_violation_fraction");
    }
    if (t.contains("min_satisfaction_fraction")) {
      cfg.min_satisfaction_fraction =
          field<double>(t["min_satisfaction_fraction"], "thresholds.min_satisfaction_fraction");
    }
  }
  if (root.contains("hypothesis_energy_N")) {
    cfg.hypothesis_energy_n = field<std::size_t>(root["hypothesis_energy_N"], "hypothesis_energy_N");
  }
  if (root.contains("max_energy_exponent")) {
    cfg.max_energy_exponent = field<double>(root["max_energy_exponent"], "max_energy_exponent");
  }
  if (root.contains("threads")) {
    cfg.threads = field<std::size_t>(root["threads"], "threads");
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    reject_unknown(o, {"path", "format"}, "output.");
    if (o.contains("path")) {
      cfg.output_path = field<std::string>(o["path"], "output.path");
    }
    if (o.contains("format")) {
      const auto f = field<std::string>(o["format"], "output.format");
      if (f != "csv" && f != "json") {
        throw ConfigError("output.format must be 'csv' or 'json'");
      }
      cfg.format = f == "csv" ? OutputFormat::csv : OutputFormat::json;
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["sequence"] = cfg.sequence.to_string();
  j["Ns"] = cfg.ns;
  json a;
  a["samples"] = cfg.alphas.samples;
  a["seed"] = cfg.alphas.seed;
  a["bits"] = cfg.alphas.bits;
  if (!cfg.alphas.explicit_angles.empty()) {
    std::vector<std::string> xs;
    for (const auto& x : cfg.alphas.explicit_angles) {
      xs.push_back(x.to_string());
    }
    a["explicit"] = xs;
  }
  j["alphas"] = a;
  if (cfg.m_rule.form != MRule::Form::none) {
    j["M_rule"] = cfg.m_rule.to_string();
  }
  j["window"] = to_string(cfg.window);
  j["eta"] = cfg.eta;
  j["epsilon"] = cfg.epsilon;
  j["thresholds"] = {{"max_violation_fraction", cfg.max_violation_fraction},
                     {"min_satisfaction_fraction", cfg.min_satisfaction_fraction}};
  j["hypothesis_energy_N"] = cfg.hypothesis_energy_n;
  j["max_energy_exponent"] = cfg.max_energy_exponent;
  j["threads"] = cfg.threads;
  j["output"] = {{"path", cfg.output_path},
                 {"format", cfg.format == OutputFormat::csv ? "csv" : "json"}};
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Scans

namespace {

// log2(delta) + exponent * log2(N); -inf for delta = 0.
double log2_scaled(const DyadicValue& delta, std::size_t n, double exponent) {
  if (sgn(delta.mantissa) == 0) {
    return -INFINITY;
  }
  signed long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, delta.mantissa.get_mpz_t());
  const double log2_delta =
      std::log2(mant) + static_cast<double>(exp) - static_cast<double>(delta.bits);
  return log2_delta + exponent * std::log2(static_cast<double>(n));
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size();
  return k % 2 == 1 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

} // namespace

bool dyadic_at_most_power(const DyadicValue& delta, std::size_t n, double exponent) {
  return log2_scaled(delta, n, exponent) <= 0.0;
}

ResultRow make_row(const GapReport& gaps, std::size_t n, std::size_t alpha_id,
                   const FixedPointAngle& alpha, double eta) {
  ResultRow row;
  row.n = n;
  row.alpha_id = alpha_id;
  row.alpha = alpha;
  row.delta_min = gaps.delta_min;
  const double nd = static_cast<double>(n);
  row.scaled = nd * nd * gaps.delta_min.to_double();
  row.collision = gaps.collision;
  row.t1_violation = log2_scaled(gaps.delta_min, n, 2.0 + eta) <= 0.0;
  row.t2_satisfied = log2_scaled(gaps.delta_min, n, 2.0 - eta) < 0.0;
  row.distinct_gaps = gaps.distinct_gap_count;
  return row;
}

std::vector<FixedPointAngle> config_angles(const ExperimentConfig& cfg, const IntegerSequence& seq) {
  if (!cfg.alphas.explicit_angles.empty()) {
    return cfg.alphas.explicit_angles;
  }
  const unsigned bits = cfg.alphas.bits != 0 ? cfg.alphas.bits : default_bits(seq, cfg.ns.back());
  std::vector<FixedPointAngle> out;
  out.reserve(cfg.alphas.samples);
  for (std::size_t i = 0; i < cfg.alphas.samples; ++i) {
    out.push_back(sample_angle(cfg.alphas.seed, i, bits));
  }
  return out;
}

ResultTable scan_minimal_gap(const ExperimentConfig& cfg, const IntegerSequence& seq) {
  cfg.validate();
  const std::size_t n_max = cfg.ns.back();
  if (seq.size() < n_max) {
    throw ConfigError(fmt::format("sequence has {} terms, N = {} requested", seq.size(), n_max));
  }
  const std::vector<FixedPointAngle> angles = config_angles(cfg, seq);
  const WindowSpec& w = window(cfg.window);

  ResultTable table;
  table.family = seq.family().name();
  table.params = seq.family().params();
  table.bits = angles.front().bits();
  table.seed = cfg.alphas.seed;
  table.eta = cfg.eta;
  for (const auto& a : angles) {
    if (auto warn = precision_warning(seq, n_max, a.bits())) {
      table.warnings.push_back(*warn);
      break;
    }
  }

  std::vector<std::optional<std::int64_t>> ms;
  for (std::size_t n : cfg.ns) {
    ms.push_back(cfg.m_rule.evaluate(n, cfg.eta));
  }

  const auto per_alpha = detail::parallel_map<std::vector<ResultRow>>(
      angles.size(), [&](std::size_t id) {
        const Orbit orb = orbit(angles[id], seq, n_max);
        std::vector<ResultRow> rows;
        rows.reserve(cfg.ns.size());
        for (std::size_t k = 0; k < cfg.ns.size(); ++k) {
          const std::size_t n = cfg.ns[k];
          ResultRow row = make_row(minimal_gap(orb, n), n, id, angles[id], cfg.eta);
          if (ms[k]) {
            row.m = *ms[k];
            row.d_value = d_statistic(orb, n, *ms[k], w).value;
          }
          if (seq.family().kind == Family::primes && !row.collision) {
            const double logn = std::log(static_cast<double>(n));
            row.normalized = row.delta_min.to_double() * static_cast<double>(n) *
                             std::pow(logn, 2.0 + cfg.epsilon);
          }
          rows.push_back(std::move(row));
        }
        return rows;
      });
  for (const auto& rows : per_alpha) {
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  return table;
}

ResultTable scan_minimal_gap(const ExperimentConfig& cfg) {
  cfg.validate();
  return scan_minimal_gap(cfg, cfg.sequence.materialize(cfg.ns.back()));
}

ExponentFit fit_exponent(const ResultTable& table) {
  std::map<std::size_t, std::vector<std::pair<double, double>>> points;
  for (const auto& row : table.rows) {
    if (row.collision) {
      continue;
    }
    points[row.alpha_id].emplace_back(std::log(static_cast<double>(row.n)),
                                      std::log(row.delta_min.to_double()));
  }
  ExponentFit fit;
  for (const auto& [id, xy] : points) {
    std::vector<double> xs;
    for (const auto& p : xy) {
      xs.push_back(p.first);
    }
    std::sort(xs.begin(), xs.end());
    if (std::unique(xs.begin(), xs.end()) - xs.begin() < 3) {
      continue;
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : xy) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    fit.per_alpha.emplace_back(id, sxy / sxx);
  }
  if (fit.per_alpha.empty()) {
    throw ArgumentError("fit_exponent: no angle has 3 distinct N without collisions");
  }
  std::vector<double> slopes;
  for (const auto& p : fit.per_alpha) {
    slopes.push_back(p.second);
  }
  fit.median_slope = median_of(slopes);
  return fit;
}

// ---------------------------------------------------------------------------
// Verdicts

Theorem1Report evaluate_theorem1(const ResultTable& table, double max_fraction) {
  Theorem1Report r;
  r.samples = table.rows.size();
  r.max_fraction = max_fraction;
  for (const auto& row : table.rows) {
    r.violations += row.t1_violation ? 1 : 0;
  }
  r.fraction = r.samples == 0 ? 0.0 : static_cast<double>(r.violations) / static_cast<double>(r.samples);
  r.passed = r.samples > 0 && r.fraction <= max_fraction;

  std::map<std::size_t, std::vector<const ResultRow*>> by_n;
  for (const auto& row : table.rows) {
    if (row.d_value && row.m) {
      by_n[row.n].push_back(&row);
    }
  }
  for (const auto& [n, rows] : by_n) {
    DDiagnostic d;
    d.n = n;
    d.m = *rows.front()->m;
    std::vector<double> xs;
    for (const auto* row : rows) {
      xs.push_back(*row->d_value);
    }
    double sum = 0.0;
    for (double x : xs) {
      sum += x;
    }
    d.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - d.mean) * (x - d.mean);
    }
    d.std_error = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                                            static_cast<double>(xs.size()))
                                : 0.0;
    const double nd = static_cast<double>(n);
    d.predicted = nd * (nd - 1.0) / static_cast<double>(d.m);
    r.d_diagnostics.push_back(d);
  }
  return r;
}

Theorem1Run verify_theorem1(const ExperimentConfig& cfg) {
  ExperimentConfig run = cfg;
  if (run.m_rule.form == MRule::Form::none) {
    run.m_rule = {MRule::Form::n2_plus_eta, 0.125};
  }
  Theorem1Run out;
  out.table = scan_minimal_gap(run);
  out.report = evaluate_theorem1(out.table, cfg.max_violation_fraction);
  return out;
}

Theorem2Report evaluate_theorem2(const ResultTable& table, double min_fraction) {
  Theorem2Report r;
  r.samples = table.rows.size();
  r.min_fraction = min_fraction;
  for (const auto& row : table.rows) {
    r.satisfied += row.t2_satisfied ? 1 : 0;
    if (row.m && row.d_value) {
      // delta_min <= 1/(4M)  <=>  4 M mantissa <= 2^B.
      const BigInt lhs = row.delta_min.mantissa * BigInt(static_cast<long>(*row.m)) * 4;
      const bool gap_event = lhs <= pow2(row.delta_min.bits);
      const bool d_event = *row.d_value >= 1.0;
      r.gap_events += gap_event ? 1 : 0;
      r.d_events += d_event ? 1 : 0;
      r.implication_failures += (gap_event && !d_event) ? 1 : 0;
    }
  }
  r.fraction = r.samples == 0 ? 0.0 : static_cast<double>(r.satisfied) / static_cast<double>(r.samples);
  r.passed = r.samples > 0 && r.fraction >= min_fraction && r.implication_failures == 0;
  return r;
}

Theorem2Run verify_theorem2(const ExperimentConfig& cfg) {
  ExperimentConfig run = cfg;
  if (run.m_rule.form == MRule::Form::none) {
    run.m_rule = {MRule::Form::n2_minus_eta, 0.5};
  }
  const IntegerSequence seq = run.sequence.materialize(run.ns.back());
  Theorem2Run out;
  out.table = scan_minimal_gap(run, seq);
  out.report = evaluate_theorem2(out.table, cfg.min_satisfaction_fraction);

  const std::size_t nh = std::max<std::size_t>(2, std::min(run.ns.back(), cfg.hypothesis_energy_n));
  const EnergyReport e = additive_energy(seq, nh);
  out.report.hypothesis_n = nh;
  out.report.hypothesis_exponent = log_abs(e.energy) / std::log(static_cast<double>(nh));
  out.report.hypothesis_ok = out.report.hypothesis_exponent < cfg.max_energy_exponent;
  if (!out.report.hypothesis_ok) {
    out.table.warnings.push_back(fmt::format(
        "energy exponent {:.3f} at N = {} is not below {}; the small-energy hypothesis looks unmet",
        out.report.hypothesis_exponent, nh, cfg.max_energy_exponent));
  }
  return out;
}

ThreeGapRun verify_three_gap(const ExperimentConfig& cfg) {
  ThreeGapRun out;
  out.table = scan_minimal_gap(cfg);
  out.report.samples = out.table.rows.size();
  for (const auto& row : out.table.rows) {
    out.report.max_distinct = std::max(out.report.max_distinct, row.distinct_gaps);
  }
  out.report.passed = out.report.samples > 0 && out.report.max_distinct <= 3;
  return out;
}

PrimeRun prime_gap_experiment(const ExperimentConfig& cfg) {
  if (cfg.sequence.family.kind != Family::primes) {
    throw ConfigError("prime_gap_experiment needs sequence 'primes'");
  }
  PrimeRun out;
  out.table = scan_minimal_gap(cfg);
  std::vector<double> normalized;
  for (const auto& row : out.table.rows) {
    ++out.report.samples;
    if (row.normalized) {
      normalized.push_back(*row.normalized);
    } else {
      ++out.report.excluded_collisions;
    }
    if (row.n >= 1024 && dyadic_at_most_power(row.delta_min, row.n, 2.1)) {
      ++out.report.floor_violations;
    }
  }
  if (!normalized.empty()) {
    out.report.normalized_min = *std::min_element(normalized.begin(), normalized.end());
    out.report.normalized_median = median_of(normalized);
  }
  out.report.passed = out.report.samples > 0 && out.report.floor_violations == 0;
  return out;
}

} // namespace mingap
