#include "mingap/circle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "mingap/errors.hpp"

namespace mingap {

FixedPointAngle::FixedPointAngle(BigInt mantissa, unsigned bits)
    : mantissa_(std::move(mantissa)), bits_(bits) {
  if (bits_ < kMinAngleBits) {
    throw ArgumentError(fmt::format("angle precision {} is below {} bits", bits_, kMinAngleBits));
  }
  if (sgn(mantissa_) < 0 || bit_length(mantissa_) > bits_) {
    throw ArgumentError(fmt::format("angle mantissa out of range [0, 2^{})", bits_));
  }
}

double FixedPointAngle::to_double() const { return dyadic_to_double(mantissa_, bits_); }

std::string FixedPointAngle::to_string() const {
  return fmt::format("{}:{}", to_hex(mantissa_), bits_);
}

FixedPointAngle FixedPointAngle::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InputError(fmt::format("angle '{}' is not of the form <hex>:<bits>", std::string(text)));
  }
  unsigned bits = 0;
  try {
    std::size_t used = 0;
    const std::string tail(text.substr(colon + 1));
    const unsigned long b = std::stoul(tail, &used);
    if (used != tail.size()) {
      throw std::invalid_argument("trailing");
    }
    bits = static_cast<unsigned>(b);
  } catch (const std::exception&) {
    throw InputError(fmt::format("angle '{}' has a bad bit count", std::string(text)));
  }
  return {parse_hex(text.substr(0, colon)), bits};
}

FixedPointAngle FixedPointAngle::extended(unsigned bits) const {
  if (bits < bits_) {
    throw ArgumentError("extended() cannot lower precision");
  }
  BigInt m = mantissa_;
  m <<= (bits - bits_);
  return {std::move(m), bits};
}

FixedPointAngle FixedPointAngle::reflected() const {
  if (sgn(mantissa_) == 0) {
    return *this;
  }
  return {pow2(bits_) - mantissa_, bits_};
}

double DyadicValue::to_double() const { return dyadic_to_double(mantissa, bits); }

std::string DyadicValue::hex() const { return fmt::format("{}:{}", to_hex(mantissa), bits); }

std::string DyadicValue::decimal() const { return dyadic_to_decimal(mantissa, bits); }

FixedPointAngle angle_from_rational(const BigInt& p, const BigInt& q, unsigned bits) {
  if (sgn(q) <= 0) {
    throw ArgumentError("angle_from_rational: denominator must be positive");
  }
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  r <<= bits;
  BigInt m;
  mpz_fdiv_q(m.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t());
  return {std::move(m), bits};
}

FixedPointAngle sample_angle(std::uint64_t seed, std::uint64_t index, unsigned bits) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6d696e67u};
  std::mt19937_64 rng(seq);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> limbs(words);
  for (auto& w : limbs) {
    w = rng();
  }
  BigInt m;
  mpz_import(m.get_mpz_t(), words, 1, sizeof(std::uint64_t), 0, 0, limbs.data());
  mpz_fdiv_r_2exp(m.get_mpz_t(), m.get_mpz_t(), bits);
  return {std::move(m), bits};
}

Orbit::Orbit(FixedPointAngle alpha, std::string source, unsigned bits,
             std::vector<BigInt> mantissas)
    : alpha_(std::move(alpha)), source_(std::move(source)), bits_(bits),
      mantissas_(std::move(mantissas)) {
  for (const auto& m : mantissas_) {
    if (sgn(m) < 0 || bit_length(m) > bits_) {
      throw ArgumentError("orbit point outside [0, 1)");
    }
  }
}

Orbit Orbit::truncated(unsigned bits) const {
  if (bits > bits_ || bits < kMinAngleBits) {
    throw ArgumentError("truncated() needs 64 <= bits <= current precision");
  }
  const unsigned drop = bits_ - bits;
  std::vector<BigInt> out(mantissas_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    mpz_fdiv_q_2exp(out[i].get_mpz_t(), mantissas_[i].get_mpz_t(), drop);
  }
  BigInt a;
  mpz_fdiv_q_2exp(a.get_mpz_t(), alpha_.mantissa().get_mpz_t(), drop);
  return {FixedPointAngle(std::move(a), bits), source_, bits, std::move(out)};
}

Orbit orbit(const FixedPointAngle& alpha, const IntegerSequence& seq, std::size_t n) {
  if (n > seq.size()) {
    throw ArgumentError(fmt::format("orbit: N = {} exceeds sequence length {}", n, seq.size()));
  }
  const unsigned bits = alpha.bits();
  std::vector<BigInt> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    mpz_mul(points[i].get_mpz_t(), alpha.mantissa().get_mpz_t(), seq.values()[i].get_mpz_t());
    // Floor remainder: negative products land in [0, 2^B) as well.
    mpz_fdiv_r_2exp(points[i].get_mpz_t(), points[i].get_mpz_t(), bits);
  }
  return {alpha, seq.label(), bits, std::move(points)};
}

DyadicValue circle_distance(const FixedPointAngle& x, const FixedPointAngle& y) {
  if (x.bits() != y.bits()) {
    throw ArgumentError("circle_distance: operands have different precision");
  }
  BigInt d = x.mantissa() - y.mantissa();
  mpz_fdiv_r_2exp(d.get_mpz_t(), d.get_mpz_t(), x.bits());
  BigInt other = pow2(x.bits()) - d;
  if (other < d) {
    d = std::move(other);
  }
  return {std::move(d), x.bits()};
}

GapReport minimal_gap(const Orbit& orb, std::optional<std::size_t> count) {
  const std::size_t n = count.value_or(orb.size());
  if (n < 2) {
    throw ArgumentError("minimal_gap: need at least 2 points");
  }
  if (n > orb.size()) {
    throw ArgumentError(fmt::format("minimal_gap: N = {} exceeds orbit size {}", n, orb.size()));
  }
  std::vector<const BigInt*> sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = &orb.mantissas()[i];
  }
  std::sort(sorted.begin(), sorted.end(), [](const BigInt* a, const BigInt* b) {
    return mpz_cmp(a->get_mpz_t(), b->get_mpz_t()) < 0;
  });

  GapReport report;
  report.bits = orb.bits();
  report.gaps.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    mpz_sub(report.gaps[i].get_mpz_t(), sorted[i + 1]->get_mpz_t(), sorted[i]->get_mpz_t());
  }
  // Wraparound: from the largest point past 1 back to the smallest.
  report.gaps[n - 1] = pow2(orb.bits()) - *sorted[n - 1] + *sorted[0];

  std::sort(report.gaps.begin(), report.gaps.end());
  report.delta_min = {report.gaps.front(), orb.bits()};
  report.collision = sgn(report.gaps.front()) == 0;
  report.distinct_gap_count = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (report.gaps[i] != report.gaps[i - 1]) {
      ++report.distinct_gap_count;
    }
  }
  return report;
}

std::size_t distinct_gap_count(const Orbit& orb) { return minimal_gap(orb).distinct_gap_count; }

unsigned recommended_bits(const IntegerSequence& seq, std::size_t n) {
  const std::size_t width = bit_length(seq.max_abs(n));
  const double log2n = std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
  return static_cast<unsigned>(width + static_cast<std::size_t>(std::ceil(2.0 * log2n)) + 40);
}

unsigned default_bits(const IntegerSequence& seq, std::size_t n) {
  unsigned base = 128;
  if (seq.family().kind == Family::lacunary || seq.family().kind == Family::custom) {
    base = static_cast<unsigned>(bit_length(seq.max_abs(n)) + 128);
  }
  return std::max(base, recommended_bits(seq, n));
}

std::optional<std::string> precision_warning(const IntegerSequence& seq, std::size_t n,
                                             unsigned bits) {
  const unsigned want = recommended_bits(seq, n);
  if (bits >= want) {
    return std::nullopt;
  }
  return fmt::format("precision {} bits is below the recommended {} bits for {} at N = {}", bits,
                     want, seq.label(), n);
}

} // namespace mingap
