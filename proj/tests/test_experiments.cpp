#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <mingap/dstat.hpp>
#include <mingap/errors.hpp>
#include <mingap/experiments.hpp>

using namespace mingap;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mingap_test_" + name);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.sequence = SequenceSource::parse("monomial:d=2");
  cfg.ns = {16, 64, 256};
  cfg.alphas.samples = 6;
  cfg.alphas.seed = 4;
  return cfg;
}

ResultRow synthetic_row(std::size_t n, std::size_t id, BigInt mantissa, unsigned bits, double eta) {
  GapReport g;
  g.delta_min = {std::move(mantissa), bits};
  g.bits = bits;
  g.collision = sgn(g.delta_min.mantissa) == 0;
  return make_row(g, n, id, FixedPointAngle(BigInt(1), bits), eta);
}

} // namespace

TEST(MRule, ParseEvaluatePrint) {
  const auto r = MRule::parse("0.5*N^(2-eta)");
  EXPECT_EQ(r.form, MRule::Form::n2_minus_eta);
  EXPECT_EQ(*r.evaluate(100, 0.2), static_cast<std::int64_t>(std::floor(0.5 * std::pow(100.0, 1.8))));
  EXPECT_EQ(MRule::parse(r.to_string()).form, r.form);
  EXPECT_EQ(*MRule::parse("0.125 * N^(2+eta)").evaluate(16, 1.0), 512);
  EXPECT_EQ(*MRule::parse("N").evaluate(37, 0.2), 37);
  EXPECT_EQ(*MRule::parse("0.001*N").evaluate(10, 0.2), 1);
  EXPECT_FALSE(MRule{}.evaluate(10, 0.2).has_value());
  EXPECT_THROW(MRule::parse("N^3"), ConfigError);
  EXPECT_THROW(MRule::parse("x*N"), ConfigError);
  EXPECT_THROW(MRule::parse("-1*N"), ConfigError);
  EXPECT_THROW(MRule::parse("N^(2+eta)").evaluate(10'000'000, 1.5), ResourceError);
}

TEST(Grid, ParseListAndGeometric) {
  EXPECT_EQ(parse_grid("10,100,1000"), (std::vector<std::size_t>{10, 100, 1000}));
  EXPECT_EQ(parse_grid("geom:256:8192:2"),
            (std::vector<std::size_t>{256, 512, 1024, 2048, 4096, 8192}));
  EXPECT_THROW(parse_grid("10,x"), ConfigError);
  EXPECT_THROW(parse_grid("geom:10:5:2"), ConfigError);
  EXPECT_THROW(parse_grid("geom:10:100:1"), ConfigError);
  EXPECT_THROW(parse_grid(""), ConfigError);
}

TEST(Grid, BorelCantelli) {
  // 2/eta = 4: k^4
  EXPECT_EQ(borel_cantelli_grid(GridKind::theorem1, 0.5, 5),
            (std::vector<std::size_t>{16, 81, 256, 625}));
  // 4/eta = 4: k^4
  EXPECT_EQ(borel_cantelli_grid(GridKind::corollary, 1.0, 4),
            (std::vector<std::size_t>{16, 81, 256}));
  for (double eta : {0.3, 0.7, 1.1}) {
    const auto grid = borel_cantelli_grid(GridKind::theorem1, eta, 30);
    std::vector<std::size_t> expect;
    for (int k = 1; k <= 30; ++k) {
      const long double v = std::floor(std::pow(static_cast<long double>(k), 2.0L / eta));
      if (v >= 2 && v <= kMaxGridValue && (expect.empty() || v > expect.back())) {
        expect.push_back(static_cast<std::size_t>(v));
      }
    }
    EXPECT_EQ(grid, expect) << eta;
    EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  }
  std::vector<std::string> warnings;
  const auto big = borel_cantelli_grid(GridKind::theorem1, 0.1, 10, &warnings);
  EXPECT_EQ(big, (std::vector<std::size_t>{1'048'576}));
  EXPECT_FALSE(warnings.empty());
}

TEST(Config, MinimalAndDefaults) {
  const auto cfg = parse_config(R"({"sequence": "primes", "Ns": [10, 20]})");
  EXPECT_EQ(cfg.experiment, ExperimentKind::scan);
  EXPECT_EQ(cfg.sequence.family.kind, Family::primes);
  EXPECT_EQ(cfg.ns, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(cfg.alphas.samples, 32u);
  EXPECT_DOUBLE_EQ(cfg.eta, 0.2);
  EXPECT_EQ(cfg.window, WindowKind::triangle);
}

TEST(Config, AllFields) {
  const auto cfg = parse_config(R"json({
    "experiment": "theorem2",
    "sequence": "lacunary:q=3",
    "Ns": "geom:64:256:2",
    "alphas": {"samples": 5, "seed": 9, "bits": 300, "explicit": ["1:64"]},
    "M_rule": "0.5*N^(2-eta)",
    "window": "bump",
    "eta": 0.3,
    "epsilon": 0.2,
    "thresholds": {"max_violation_fraction": 0.2, "min_satisfaction_fraction": 0.8},
    "hypothesis_energy_N": 128,
    "max_energy_exponent": 2.5,
    "threads": 2,
    "output": {"path": "out.csv", "format": "json"}
  })json");
  EXPECT_EQ(cfg.experiment, ExperimentKind::theorem2);
  EXPECT_EQ(cfg.ns, (std::vector<std::size_t>{64, 128, 256}));
  EXPECT_EQ(cfg.alphas.bits, 300u);
  EXPECT_EQ(cfg.alphas.explicit_angles.size(), 1u);
  EXPECT_EQ(cfg.m_rule.form, MRule::Form::n2_minus_eta);
  EXPECT_EQ(cfg.window, WindowKind::bump);
  EXPECT_DOUBLE_EQ(cfg.min_satisfaction_fraction, 0.8);
  EXPECT_EQ(cfg.hypothesis_energy_n, 128u);
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_EQ(cfg.format, OutputFormat::json);

  const auto again = parse_config(config_to_json(cfg));
  EXPECT_EQ(config_to_json(again), config_to_json(cfg));
}

TEST(Config, GridObject) {
  const auto cfg =
      parse_config(R"({"sequence": "naturals", "eta": 0.5, "Ns": {"grid": "theorem1", "k_max": 4}})");
  EXPECT_EQ(cfg.ns, (std::vector<std::size_t>{16, 81, 256}));
  EXPECT_THROW(parse_config(R"({"sequence": "naturals", "Ns": {"grid": "other", "k_max": 4}})"),
               ConfigError);
}

TEST(Config, Errors) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10], "eta": 3})").find("eta must be in (0,2)"),
            std::string::npos);
  EXPECT_NE(message("{\n\"sequence\": \"primes\",\n\"Ns\": [10,,]\n}").find("line 3"),
            std::string::npos);
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10], "colour": 1})").find("colour"),
            std::string::npos);
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10], "alphas": {"n": 1}})").find("alphas.n"),
            std::string::npos);
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": "ten"})").find("ten"), std::string::npos);
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10], "eta": "x"})").find("eta"),
            std::string::npos);
  EXPECT_NE(message(R"({"Ns": [10]})").find("sequence"), std::string::npos);
  EXPECT_NE(message(R"({"sequence": "primes"})").find("Ns"), std::string::npos);
  EXPECT_NE(message(R"({"sequence": "naturals", "Ns": [10], "experiment": "primes"})"),
            "no error");
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10], "experiment": "threegap"})"),
            "no error");
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [10, 5]})"), "no error");
  EXPECT_NE(message(R"({"sequence": "primes", "Ns": [1]})"), "no error");
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(DyadicPower, ExactBoundaries) {
  const DyadicValue d{BigInt(1) << 108, 128};  // 2^-20
  EXPECT_TRUE(dyadic_at_most_power(d, 1024, 2.0));
  EXPECT_FALSE(dyadic_at_most_power(d, 1024, 2.01));
  EXPECT_TRUE(dyadic_at_most_power(d, 1024, 1.99));
  EXPECT_TRUE(dyadic_at_most_power(DyadicValue{BigInt(0), 128}, 10, 5.0));
}

TEST(Rows, FlagsAreConsistent) {
  const double eta = 0.2;
  const auto equal = synthetic_row(1024, 0, BigInt(1) << 108, 128, eta);  // N^-2
  EXPECT_FALSE(equal.t1_violation);
  EXPECT_TRUE(equal.t2_satisfied);
  EXPECT_DOUBLE_EQ(equal.scaled, 1.0);
  const auto tiny = synthetic_row(1024, 0, BigInt(1), 128, eta);
  EXPECT_TRUE(tiny.t1_violation);
  EXPECT_TRUE(tiny.t2_satisfied);
  const auto spaced = synthetic_row(1024, 0, BigInt(1) << 118, 128, eta);  // 1/N
  EXPECT_FALSE(spaced.t1_violation);
  EXPECT_FALSE(spaced.t2_satisfied);
}

TEST(Scan, RowsMatchDirectComputation) {
  auto cfg = small_config();
  cfg.m_rule = MRule::parse("0.5*N^(2-eta)");
  const auto seq = cfg.sequence.materialize(256);
  const auto table = scan_minimal_gap(cfg);
  ASSERT_EQ(table.rows.size(), 18u);
  EXPECT_EQ(table.family, "monomial");
  EXPECT_EQ(table.params, "d=2");
  EXPECT_EQ(table.bits, 128u);
  const auto angles = config_angles(cfg, seq);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    EXPECT_EQ(row.alpha_id, i / 3);
    EXPECT_EQ(row.n, cfg.ns[i % 3]);
    EXPECT_EQ(row.alpha, angles[row.alpha_id]);
    const auto o = orbit(row.alpha, seq, row.n);
    EXPECT_EQ(row.delta_min, minimal_gap(o).delta_min);
    ASSERT_TRUE(row.m && row.d_value);
    EXPECT_EQ(*row.m, *cfg.m_rule.evaluate(row.n, cfg.eta));
    EXPECT_DOUBLE_EQ(*row.d_value, d_statistic(o, row.n, *row.m, window(cfg.window)).value);
    EXPECT_FALSE(row.normalized);
  }
}

TEST(Scan, Invariants) {
  ExperimentConfig cfg;
  cfg.sequence = SequenceSource::parse("squarefree");
  cfg.ns = parse_grid("geom:8:2048:2");
  cfg.alphas.samples = 12;
  cfg.m_rule = MRule::parse("N");
  const auto table = scan_minimal_gap(cfg);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    // delta_min <= 1/N
    EXPECT_LE(row.delta_min.mantissa * BigInt(static_cast<long>(row.n)), BigInt(1) << table.bits);
    EXPECT_FALSE(row.t1_violation && !row.t2_satisfied);
    if (i > 0 && table.rows[i - 1].alpha_id == row.alpha_id) {
      EXPECT_LE(row.delta_min.mantissa, table.rows[i - 1].delta_min.mantissa);
    }
  }
}

TEST(Scan, DeterministicAcrossThreadCounts) {
  auto cfg = small_config();
  cfg.m_rule = MRule::parse("N");
  std::ostringstream a;
  std::ostringstream b;
  cfg.threads = 1;
  run_experiment(cfg, a);
  cfg.threads = 0;
  run_experiment(cfg, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_GT(a.str().size(), 100u);
}

TEST(Scan, ExplicitAngles) {
  auto cfg = small_config();
  cfg.alphas.explicit_angles = {FixedPointAngle(BigInt(12345), 64),
                                FixedPointAngle(BigInt(1) << 63, 64)};
  const auto table = scan_minimal_gap(cfg);
  EXPECT_EQ(table.rows.size(), 6u);
  EXPECT_TRUE(table.rows.back().collision);
}

TEST(Scan, PrecisionWarning) {
  ExperimentConfig cfg;
  cfg.sequence = SequenceSource::parse("lacunary:q=2");
  cfg.ns = {200};
  cfg.alphas.samples = 2;
  cfg.alphas.bits = 128;
  EXPECT_FALSE(scan_minimal_gap(cfg).warnings.empty());
  cfg.alphas.bits = 0;
  EXPECT_TRUE(scan_minimal_gap(cfg).warnings.empty());
}

TEST(FitExponent, RecoversExactSlope) {
  ResultTable table;
  for (std::size_t id = 0; id < 3; ++id) {
    for (unsigned k = 4; k <= 10; ++k) {
      const std::size_t n = std::size_t{1} << k;
      // delta = N^-2 scaled by a per-angle constant
      table.rows.push_back(synthetic_row(n, id, BigInt(id + 1) << (128 - 2 * k - 3), 128, 0.2));
    }
  }
  const auto fit = fit_exponent(table);
  EXPECT_NEAR(fit.median_slope, -2.0, 1e-12);
  ASSERT_EQ(fit.per_alpha.size(), 3u);
  ResultTable thin;
  thin.rows.push_back(synthetic_row(16, 0, BigInt(1) << 100, 128, 0.2));
  thin.rows.push_back(synthetic_row(32, 0, BigInt(1) << 99, 128, 0.2));
  EXPECT_THROW(fit_exponent(thin), ArgumentError);
}

TEST(FitExponent, SkipsCollisions) {
  ResultTable table;
  for (unsigned k = 4; k <= 8; ++k) {
    table.rows.push_back(synthetic_row(std::size_t{1} << k, 0, BigInt(1) << (128 - 2 * k), 128, 0.2));
    table.rows.push_back(synthetic_row(std::size_t{1} << k, 1, BigInt(0), 128, 0.2));
  }
  const auto fit = fit_exponent(table);
  ASSERT_EQ(fit.per_alpha.size(), 1u);
  EXPECT_NEAR(fit.median_slope, -2.0, 1e-12);
}

TEST(Theorem1, Evaluate) {
  ResultTable table;
  for (std::size_t id = 0; id < 10; ++id) {
    table.rows.push_back(synthetic_row(1024, id, id == 0 ? BigInt(1) : BigInt(1) << 118, 128, 0.5));
  }
  const auto r = evaluate_theorem1(table, 0.1);
  EXPECT_EQ(r.samples, 10u);
  EXPECT_EQ(r.violations, 1u);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(evaluate_theorem1(table, 0.05).passed);
}

TEST(Theorem1, VerifySmall) {
  auto cfg = small_config();
  cfg.experiment = ExperimentKind::theorem1;
  cfg.eta = 0.5;
  cfg.ns = {512};
  cfg.alphas.samples = 16;
  const auto run = verify_theorem1(cfg);
  EXPECT_TRUE(run.report.passed);
  ASSERT_FALSE(run.report.d_diagnostics.empty());
  const auto& d = run.report.d_diagnostics.front();
  EXPECT_EQ(d.m, static_cast<std::int64_t>(std::floor(0.125 * std::pow(512.0, 2.5))));
  EXPECT_DOUBLE_EQ(d.predicted, 512.0 * 511.0 / static_cast<double>(d.m));
}

TEST(Theorem2, EquallySpacedIsUnsatisfied) {
  ResultTable table;
  for (std::size_t id = 0; id < 4; ++id) {
    table.rows.push_back(synthetic_row(1024, id, BigInt(1) << 118, 128, 0.9));
  }
  const auto r = evaluate_theorem2(table, 0.9);
  EXPECT_EQ(r.satisfied, 0u);
  EXPECT_FALSE(r.passed);
}

TEST(Theorem2, VerifySmall) {
  auto cfg = small_config();
  cfg.experiment = ExperimentKind::theorem2;
  cfg.ns = {1024};
  cfg.alphas.samples = 16;
  cfg.eta = 0.4;
  const auto run = verify_theorem2(cfg);
  EXPECT_EQ(run.report.samples, 16u);
  EXPECT_EQ(run.report.implication_failures, 0u);
  EXPECT_LE(run.report.gap_events, run.report.d_events);
  EXPECT_TRUE(run.report.hypothesis_ok);
  EXPECT_EQ(run.report.hypothesis_n, 1024u);
  for (const auto& row : run.table.rows) {
    EXPECT_EQ(*row.m, static_cast<std::int64_t>(std::floor(0.5 * std::pow(1024.0, 1.6))));
  }
}

TEST(Theorem2, HypothesisGuardFlagsDenseSequence) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::theorem2;
  cfg.sequence = SequenceSource::parse("naturals");
  cfg.ns = {512};
  cfg.alphas.samples = 4;
  const auto run = verify_theorem2(cfg);
  EXPECT_FALSE(run.report.hypothesis_ok);
  EXPECT_GT(run.report.hypothesis_exponent, 2.7);
  EXPECT_FALSE(run.table.warnings.empty());
}

TEST(ThreeGap, VerifyNaturals) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::threegap;
  cfg.sequence = SequenceSource::parse("naturals");
  cfg.ns = {10, 100, 1000};
  cfg.alphas.samples = 8;
  const auto run = verify_three_gap(cfg);
  EXPECT_TRUE(run.report.passed);
  EXPECT_EQ(run.report.samples, 24u);
  EXPECT_LE(run.report.max_distinct, 3u);
}

TEST(Primes, HalfAngleCollisionExcluded) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::primes;
  cfg.sequence = SequenceSource::parse("primes");
  cfg.ns = {16};
  cfg.alphas.explicit_angles = {angle_from_rational(BigInt(1), BigInt(2), 64),
                                sample_angle(1, 0, 128).extended(128)};
  cfg.alphas.explicit_angles[0] = cfg.alphas.explicit_angles[0].extended(128);
  const auto run = prime_gap_experiment(cfg);
  ASSERT_EQ(run.table.rows.size(), 2u);
  EXPECT_TRUE(run.table.rows[0].collision);
  EXPECT_FALSE(run.table.rows[0].normalized);
  ASSERT_TRUE(run.table.rows[1].normalized);
  EXPECT_GT(*run.table.rows[1].normalized, 0.0);
  EXPECT_EQ(run.report.excluded_collisions, 1u);
}

TEST(Primes, NormalizedValues) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::primes;
  cfg.sequence = SequenceSource::parse("primes");
  cfg.ns = {1024};
  cfg.alphas.samples = 8;
  cfg.epsilon = 0.1;
  const auto run = prime_gap_experiment(cfg);
  EXPECT_TRUE(run.report.passed);
  EXPECT_EQ(run.report.floor_violations, 0u);
  for (const auto& row : run.table.rows) {
    const double logn = std::log(1024.0);
    EXPECT_NEAR(*row.normalized, row.delta_min.to_double() * 1024.0 * std::pow(logn, 2.1),
                1e-12 * *row.normalized);
  }
  EXPECT_LE(run.report.normalized_min, run.report.normalized_median);
}

TEST(Output, CsvAndJsonLayout) {
  auto cfg = small_config();
  cfg.sequence = SequenceSource::parse("primes");
  cfg.m_rule = MRule::parse("N");
  const auto table = scan_minimal_gap(cfg);
  std::ostringstream csv;
  write_table_csv(csv, table);
  const auto text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "N,alpha_id,alpha_hex,delta_min_hex,delta_min,scaled,d_value,M,collision,"
            "t1_violation,t2_satisfied,distinct_gaps,normalized");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 19);
  std::ostringstream js;
  write_table_json(js, table);
  const auto doc = nlohmann::json::parse(js.str());
  ASSERT_EQ(doc["rows"].size(), 18u);
  const auto& row = doc["rows"][0];
  for (const char* key : {"N", "alpha_id", "alpha_hex", "delta_min_hex", "delta_min", "scaled",
                          "d_value", "M", "collision", "t1_violation", "t2_satisfied",
                          "distinct_gaps", "normalized"}) {
    EXPECT_TRUE(row.contains(key)) << key;
  }
}

TEST(RunConfig, WritesDataAndManifest) {
  const auto cfg_path = temp_path("run.json");
  const auto out_path = temp_path("run.csv");
  {
    std::ofstream c(cfg_path);
    c << R"({"experiment": "threegap", "sequence": "naturals", "Ns": [10, 50],
             "alphas": {"samples": 4, "seed": 2},
             "output": {"path": ")"
      << out_path.string() << R"("}})";
  }
  std::ostringstream sink;
  const auto first = run_config(cfg_path, sink);
  EXPECT_EQ(first.exit_code, kExitOk);
  EXPECT_TRUE(sink.str().empty());
  EXPECT_NE(first.summary.find("PASS"), std::string::npos);
  const std::string data1 = read_file(out_path);
  EXPECT_EQ(std::count(data1.begin(), data1.end(), '\n'), 9);
  const auto manifest = nlohmann::json::parse(read_file(first.manifest_path));
  for (const char* key : {"config", "seed", "version", "started", "elapsed_s"}) {
    EXPECT_TRUE(manifest.contains(key)) << key;
  }
  EXPECT_EQ(manifest["version"], version());
  EXPECT_EQ(manifest["seed"], 2);

  run_config(cfg_path, sink);
  EXPECT_EQ(read_file(out_path), data1);
  std::filesystem::remove(cfg_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(first.manifest_path);
}

TEST(RunConfig, FailingVerdictExitCode) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::theorem2;
  cfg.sequence = SequenceSource::parse("monomial:d=2");
  cfg.ns = {64};
  cfg.alphas.samples = 4;
  cfg.min_satisfaction_fraction = 1.0;
  cfg.eta = 0.01;
  std::ostringstream sink;
  const auto outcome = run_experiment(cfg, sink);
  EXPECT_EQ(outcome.exit_code, kExitVerification);
  EXPECT_NE(outcome.summary.find("FAIL"), std::string::npos);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitValidation);
  EXPECT_EQ(exit_code_for(ValidationError("x")), kExitValidation);
  EXPECT_EQ(exit_code_for(InputError("x")), kExitValidation);
  EXPECT_EQ(exit_code_for(ResourceError("x")), kExitResource);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}
