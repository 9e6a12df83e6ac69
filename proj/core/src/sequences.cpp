#include "mingap/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "mingap/errors.hpp"

namespace mingap {

std::string FamilySpec::name() const {
  switch (kind) {
  case Family::monomial: return "monomial";
  case Family::lacunary: return "lacunary";
  case Family::primes: return "primes";
  case Family::squarefree: return "squarefree";
  case Family::naturals: return "naturals";
  case Family::custom: return "custom";
  }
  return "unknown";
}

std::string FamilySpec::params() const {
  switch (kind) {
  case Family::monomial: return fmt::format("d={}", param);
  case Family::lacunary: return fmt::format("q={}", param);
  default: return {};
  }
}

IntegerSequence::IntegerSequence(std::string label, FamilySpec family, std::vector<BigInt> values)
    : label_(std::move(label)), family_(family), values_(std::move(values)) {
  if (values_.size() < 2) {
    throw ValidationError(fmt::format("sequence '{}' has {} terms; at least 2 are required",
                                      label_, values_.size()));
  }
  require_distinct(values_);
}

const BigInt& IntegerSequence::term(std::size_t n) const {
  if (n == 0 || n > values_.size()) {
    throw ArgumentError(fmt::format("term index {} outside 1..{}", n, values_.size()));
  }
  return values_[n - 1];
}

BigInt IntegerSequence::max_abs(std::size_t n) const {
  BigInt best = 0;
  const std::size_t count = std::min(n, values_.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (mpz_cmpabs(values_[i].get_mpz_t(), best.get_mpz_t()) > 0) {
      best = abs(values_[i]);
    }
  }
  return best;
}

void require_distinct(const std::vector<BigInt>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  // Among all repeated values, report the one whose second occurrence comes first.
  std::size_t worst = values.size();
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (values[order[i]] == values[order[i - 1]]) {
      worst = std::min(worst, order[i]);
    }
  }
  if (worst != values.size()) {
    throw ValidationError(fmt::format("duplicate value {} at position {}",
                                      to_decimal(values[worst]), worst + 1));
  }
}

namespace {

void check_length(std::size_t n, std::size_t max, const char* what) {
  if (n < 2) {
    throw ConfigError(fmt::format("{}: N must be at least 2 (got {})", what, n));
  }
  if (n > max) {
    throw ConfigError(fmt::format("{}: N = {} exceeds the guard {}", what, n, max));
  }
}

std::vector<BigInt> to_bigints(const std::vector<std::uint64_t>& xs) {
  std::vector<BigInt> out;
  out.reserve(xs.size());
  for (std::uint64_t x : xs) {
    // mpz_class has no uint64_t constructor on every platform.
    BigInt v;
    mpz_import(v.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
    out.push_back(std::move(v));
  }
  return out;
}

// Odd-only sieve of Eratosthenes; returns primes <= limit in order.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit, std::size_t want) {
  std::vector<std::uint64_t> out;
  if (limit < 2) {
    return out;
  }
  out.push_back(2);
  const std::uint64_t half = (limit - 1) / 2;  // index i <-> 2i + 1
  std::vector<bool> composite(half + 1, false);
  for (std::uint64_t i = 1; i <= half && out.size() < want; ++i) {
    if (composite[i]) {
      continue;
    }
    const std::uint64_t p = 2 * i + 1;
    out.push_back(p);
    for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) {
      composite[j] = true;
    }
  }
  return out;
}

} // namespace

IntegerSequence generate_monomial(int d, std::size_t n) {
  if (d < 1 || d > kMaxMonomialDegree) {
    throw ConfigError(fmt::format("monomial: degree d = {} outside 1..{}", d, kMaxMonomialDegree));
  }
  check_length(n, kMaxDenseLength, "monomial");
  std::vector<BigInt> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    mpz_ui_pow_ui(values[i].get_mpz_t(), i + 1, static_cast<unsigned long>(d));
  }
  return {fmt::format("monomial:d={}", d), {Family::monomial, d}, std::move(values)};
}

IntegerSequence generate_lacunary(int q, std::size_t n) {
  if (q < 2) {
    throw ConfigError(fmt::format("lacunary: ratio q = {} must be at least 2", q));
  }
  check_length(n, kMaxLacunaryLength, "lacunary");
  std::vector<BigInt> values(n);
  BigInt power = q;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = power;
    power *= q;
  }
  return {fmt::format("lacunary:q={}", q), {Family::lacunary, q}, std::move(values)};
}

IntegerSequence generate_primes(std::size_t n) {
  check_length(n, kMaxDenseLength, "primes");
  // p_n < n (ln n + ln ln n) for n >= 6.
  const double x = static_cast<double>(std::max<std::size_t>(n, 6));
  auto limit = static_cast<std::uint64_t>(x * (std::log(x) + std::log(std::log(x))) * 1.02) + 32;
  std::vector<std::uint64_t> ps = primes_up_to(limit, n);
  while (ps.size() < n) {
    limit += limit / 2;
    ps = primes_up_to(limit, n);
  }
  ps.resize(n);
  return {"primes", {Family::primes, 0}, to_bigints(ps)};
}

IntegerSequence generate_squarefree(std::size_t n) {
  check_length(n, kMaxDenseLength, "squarefree");
  // Density 6/pi^2 ~ 0.608.
  auto limit = static_cast<std::uint64_t>(static_cast<double>(n) * 1.66) + 64;
  std::vector<std::uint64_t> out;
  for (;;) {
    std::vector<bool> square_divisible(limit + 1, false);
    for (std::uint64_t k = 2; k * k <= limit; ++k) {
      for (std::uint64_t j = k * k; j <= limit; j += k * k) {
        square_divisible[j] = true;
      }
    }
    out.clear();
    for (std::uint64_t v = 1; v <= limit && out.size() < n; ++v) {
      if (!square_divisible[v]) {
        out.push_back(v);
      }
    }
    if (out.size() == n) {
      break;
    }
    limit += limit / 2;
  }
  return {"squarefree", {Family::squarefree, 0}, to_bigints(out)};
}

IntegerSequence generate_naturals(std::size_t n) {
  check_length(n, kMaxDenseLength, "naturals");
  std::vector<BigInt> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = static_cast<unsigned long>(i + 1);
  }
  return {"naturals", {Family::naturals, 0}, std::move(values)};
}

IntegerSequence generate(const FamilySpec& spec, std::size_t n) {
  switch (spec.kind) {
  case Family::monomial: return generate_monomial(spec.param, n);
  case Family::lacunary: return generate_lacunary(spec.param, n);
  case Family::primes: return generate_primes(n);
  case Family::squarefree: return generate_squarefree(n);
  case Family::naturals: return generate_naturals(n);
  case Family::custom: break;
  }
  throw ConfigError("custom sequences are loaded from a file, not generated");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

} // namespace

IntegerSequence parse_sequence(std::istream& in, std::string label) {
  std::vector<BigInt> values;
  std::map<BigInt, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    BigInt v;
    try {
      v = parse_decimal(text);
    } catch (const InputError&) {
      throw InputError(fmt::format("{}: line {}: not a decimal integer: '{}'", label, line_no,
                                   std::string(text)));
    }
    auto [it, inserted] = first_line.emplace(v, line_no);
    if (!inserted) {
      throw ValidationError(fmt::format("{}: line {}: duplicate value {} (first seen on line {})",
                                        label, line_no, to_decimal(v), it->second));
    }
    values.push_back(std::move(v));
  }
  return {std::move(label), {Family::custom, 0}, std::move(values)};
}

IntegerSequence load_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open sequence file " + path.string());
  }
  return parse_sequence(in, path.filename().string());
}

void write_sequence(std::ostream& out, const IntegerSequence& seq) {
  out << "# " << seq.label() << " N=" << seq.size() << '\n';
  for (const auto& v : seq.values()) {
    out << to_decimal(v) << '\n';
  }
}

SequenceSource SequenceSource::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view tail = colon == std::string_view::npos ? std::string_view{}
                                                                : text.substr(colon + 1);
  auto param = [&](char key) {
    if (tail.size() < 3 || tail[0] != key || tail[1] != '=') {
      throw ConfigError(fmt::format("sequence '{}': expected {}:{}=<int>", std::string(text),
                                    std::string(head), key));
    }
    try {
      std::size_t used = 0;
      const int v = std::stoi(std::string(tail.substr(2)), &used);
      if (used != tail.size() - 2) {
        throw std::invalid_argument("trailing");
      }
      return v;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("sequence '{}': bad integer parameter", std::string(text)));
    }
  };
  SequenceSource src;
  if (head == "monomial") {
    src.family = {Family::monomial, param('d')};
  } else if (head == "lacunary") {
    src.family = {Family::lacunary, param('q')};
  } else if (head == "primes" || head == "squarefree" || head == "naturals") {
    if (!tail.empty()) {
      throw ConfigError(fmt::format("sequence '{}': takes no parameters", std::string(head)));
    }
    src.family = {head == "primes"       ? Family::primes
                  : head == "squarefree" ? Family::squarefree
                                         : Family::naturals,
                  0};
  } else if (head == "file") {
    if (tail.empty()) {
      throw ConfigError("sequence 'file:' needs a path");
    }
    src.family = {Family::custom, 0};
    src.file = std::filesystem::path(std::string(tail));
  } else {
    throw ConfigError(fmt::format(
        "unknown sequence '{}' (monomial:d=D|lacunary:q=Q|primes|squarefree|naturals|file:PATH)",
        std::string(text)));
  }
  return src;
}

std::string SequenceSource::to_string() const {
  if (file) {
    return "file:" + file->string();
  }
  const std::string p = family.params();
  return p.empty() ? family.name() : family.name() + ":" + p;
}

IntegerSequence SequenceSource::materialize(std::size_t n) const {
  if (file) {
    IntegerSequence seq = load_sequence(*file);
    if (seq.size() < n) {
      throw ConfigError(fmt::format("{} has {} terms, {} requested", file->string(), seq.size(), n));
    }
    return seq;
  }
  return generate(family, n);
}

} // namespace mingap
