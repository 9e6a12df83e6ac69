#include <CLI11.hpp>
#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <mingap/dstat.hpp>
#include <mingap/energy.hpp>
#include <mingap/errors.hpp>
#include <mingap/experiments.hpp>

namespace {

using namespace mingap;

struct CommonOptions {
  std::string sequence = "monomial:d=2";
  std::size_t n = 0;
  std::string grid;
  std::size_t samples = 32;
  std::uint64_t seed = 1;
  unsigned bits = 0;
  std::string window = "triangle";
  double eta = 0.2;
  double epsilon = 0.1;
  std::string m;
  std::string out;
  std::string format = "csv";
  std::size_t threads = 0;
};

void add_sequence(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--sequence", o.sequence,
                  "monomial:d=K | lacunary:q=K | primes | squarefree | naturals | file:PATH")
      ->capture_default_str();
}

void add_ns(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--N", o.n, "number of terms");
  cmd->add_option("--N-grid", o.grid, "a,b,c or geom:start:stop:factor");
}

void add_alphas(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--samples", o.samples, "number of sampled angles")->capture_default_str();
  cmd->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
  cmd->add_option("--bits", o.bits, "angle precision in bits (0 = precision rule)");
}

void add_output(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::vector<std::size_t> resolve_ns(const CommonOptions& o) {
  if (!o.grid.empty()) {
    return parse_grid(o.grid);
  }
  if (o.n == 0) {
    throw ArgumentError("one of --N or --N-grid is required");
  }
  return {o.n};
}

std::int64_t parse_m_value(const std::string& text) {
  std::int64_t m = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, m);
  if (ec != std::errc{} || p != end || m < 1) {
    throw ArgumentError("--M must be a positive integer here");
  }
  return m;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) {
        throw InputError("cannot write " + path);
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

ExperimentConfig build_config(const CommonOptions& o, ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.sequence = SequenceSource::parse(o.sequence);
  cfg.ns = resolve_ns(o);
  cfg.alphas.samples = o.samples;
  cfg.alphas.seed = o.seed;
  cfg.alphas.bits = o.bits;
  if (!o.m.empty()) {
    cfg.m_rule = MRule::parse(o.m);
  }
  cfg.window = parse_window_kind(o.window);
  cfg.eta = o.eta;
  cfg.epsilon = o.epsilon;
  cfg.threads = o.threads;
  cfg.output_path = o.out;
  cfg.format = o.format == "json" ? OutputFormat::json : OutputFormat::csv;
  cfg.validate();
  return cfg;
}

int report(const RunOutcome& outcome) {
  std::cerr << outcome.summary;
  if (!outcome.manifest_path.empty()) {
    std::cerr << "manifest: " << outcome.manifest_path.string() << '\n';
  }
  return outcome.exit_code;
}

int cmd_gen(const CommonOptions& o) {
  if (o.n == 0) {
    throw ArgumentError("--N is required");
  }
  const auto seq = SequenceSource::parse(o.sequence).materialize(o.n);
  Output out(o.out);
  write_sequence(out.stream(), seq);
  return kExitOk;
}

int cmd_energy(const CommonOptions& o) {
  const auto ns = resolve_ns(o);
  const auto seq = SequenceSource::parse(o.sequence).materialize(ns.back());
  const auto rows = energy_scan(seq, ns);
  Output out(o.out);
  write_energy_csv(out.stream(), seq, rows);
  return kExitOk;
}

int cmd_dstat(const CommonOptions& o, const std::string& alpha, std::int64_t k_max,
              std::size_t batches) {
  if (o.n == 0) {
    throw ArgumentError("--N is required");
  }
  if (o.m.empty()) {
    throw ArgumentError("--M is required");
  }
  const std::int64_t m = parse_m_value(o.m);
  const auto seq = SequenceSource::parse(o.sequence).materialize(o.n);
  const auto& w = window(parse_window_kind(o.window));
  Output out(o.out);

  if (!alpha.empty()) {
    const auto r = d_statistic(seq, o.n, m, FixedPointAngle::parse(alpha), w);
    out.stream() << "N,M,window,alpha_hex,D,contributing_pairs,expected\n"
                 << fmt::format("{},{},{},{},{:.17g},{},{:.17g}\n", r.n, r.m, to_string(r.window),
                                r.alpha.to_string(), r.value, r.contributing_pairs,
                                static_cast<double>(o.n) * static_cast<double>(o.n - 1) /
                                    static_cast<double>(m));
    return kExitOk;
  }

  MonteCarloOptions opts;
  opts.samples = o.samples;
  opts.seed = o.seed;
  opts.bits = o.bits;
  opts.batches = batches;
  opts.epsilon = o.epsilon;
  auto r = o.samples >= 100 ? d_variance_mc(seq, o.n, m, w, opts) : d_mean_mc(seq, o.n, m, w, opts);
  if (k_max > 0) {
    r.fourier = d_variance_fourier(seq, o.n, m, w, k_max);
    for (const auto& warning : r.fourier->warnings) {
      std::cerr << "warning: " << warning << '\n';
    }
  }
  write_variance_csv_header(out.stream());
  write_variance_csv_row(out.stream(), seq, o.n, m, w.kind(), r);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal gaps of dilated integer sequences on the circle", "mingap"};
  app.set_version_flag("--version", mingap::version());
  app.require_subcommand(1);

  CommonOptions o;
  std::string alpha;
  std::string experiment;
  std::string config_path;
  std::int64_t k_max = 0;
  std::size_t batches = 32;

  auto* gen = app.add_subcommand("gen", "write the first N terms of a sequence");
  add_sequence(gen, o);
  gen->add_option("--N", o.n, "number of terms")->required();
  gen->add_option("--out", o.out, "output path (default stdout)");

  auto* mg = app.add_subcommand("mingap", "minimal gap table over sampled angles");
  add_sequence(mg, o);
  add_ns(mg, o);
  add_alphas(mg, o);
  mg->add_option("--eta", o.eta, "exponent slack for the row flags")->capture_default_str();
  mg->add_option("--M", o.m, "M rule for D columns, e.g. 0.5*N^(2-eta)");
  mg->add_option("--window", o.window, "triangle | bump")->capture_default_str();
  mg->add_option("--threads", o.threads, "worker threads (0 = default)");
  add_output(mg, o);

  auto* en = app.add_subcommand("energy", "additive energy at one or more N");
  add_sequence(en, o);
  add_ns(en, o);
  en->add_option("--out", o.out, "output path (default stdout)");

  auto* ds = app.add_subcommand("dstat", "D(N, M) at one angle, or its sampled mean and variance");
  add_sequence(ds, o);
  ds->add_option("--N", o.n, "number of terms")->required();
  ds->add_option("--M", o.m, "scale M (positive integer)")->required();
  ds->add_option("--window", o.window, "triangle | bump")->capture_default_str();
  ds->add_option("--alpha", alpha, "evaluate at one angle, HEX:BITS");
  add_alphas(ds, o);
  ds->add_option("--epsilon", o.epsilon, "exponent in the N^eps E / M bound")->capture_default_str();
  ds->add_option("--k-max", k_max, "also compute the Fourier-side variance up to this frequency");
  ds->add_option("--batches", batches, "batches for the variance standard error")
      ->capture_default_str();
  ds->add_option("--out", o.out, "output path (default stdout)");

  auto* vf = app.add_subcommand("verify", "run one of the verification experiments");
  vf->add_option("--experiment", experiment, "theorem1 | theorem2 | threegap | primes")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2", "threegap", "primes"}));
  add_sequence(vf, o);
  add_ns(vf, o);
  add_alphas(vf, o);
  vf->add_option("--eta", o.eta, "exponent slack")->capture_default_str();
  vf->add_option("--epsilon", o.epsilon, "log exponent slack (primes)")->capture_default_str();
  vf->add_option("--M", o.m, "M rule, e.g. 0.5*N^(2-eta)");
  vf->add_option("--window", o.window, "triangle | bump")->capture_default_str();
  vf->add_option("--threads", o.threads, "worker threads (0 = default)");
  add_output(vf, o);

  auto* sc = app.add_subcommand("scan", "run a JSON experiment config");
  sc->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mingap::kExitValidation;
  }

  try {
    if (*gen) {
      return cmd_gen(o);
    }
    if (*mg) {
      return report(mingap::run_experiment(build_config(o, mingap::ExperimentKind::scan), std::cout));
    }
    if (*en) {
      return cmd_energy(o);
    }
    if (*ds) {
      return cmd_dstat(o, alpha, k_max, batches);
    }
    if (*vf) {
      return report(mingap::run_experiment(
          build_config(o, mingap::parse_experiment_kind(experiment)), std::cout));
    }
    if (*sc) {
      return report(mingap::run_config(config_path, std::cout));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mingap::exit_code_for(e);
  }
  return mingap::kExitOk;
}
