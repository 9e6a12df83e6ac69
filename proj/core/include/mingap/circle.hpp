#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mingap/bigint.hpp"
#include "mingap/sequences.hpp"

namespace mingap {

inline constexpr unsigned kMinAngleBits = 64;

/// A point mantissa / 2^bits of the circle R/Z, measured in turns.
class FixedPointAngle {
public:
  /// Requires 0 <= mantissa < 2^bits and bits >= 64.
  FixedPointAngle(BigInt mantissa, unsigned bits);

  const BigInt& mantissa() const noexcept { return mantissa_; }
  unsigned bits() const noexcept { return bits_; }
  double to_double() const;

  /// Lowercase hex mantissa, a colon, and the decimal bit count: `8000:16`.
  std::string to_string() const;
  static FixedPointAngle parse(std::string_view text);

  /// Same point at higher precision (low bits zero).
  FixedPointAngle extended(unsigned bits) const;
  /// The mirror point 1 - x (0 maps to 0).
  FixedPointAngle reflected() const;

  friend bool operator==(const FixedPointAngle&, const FixedPointAngle&) = default;

private:
  BigInt mantissa_;
  unsigned bits_;
};

/// An exact dyadic number mantissa / 2^bits in [0, 1].
struct DyadicValue {
  BigInt mantissa;
  unsigned bits = kMinAngleBits;

  double to_double() const;
  std::string hex() const;      // same layout as FixedPointAngle
  std::string decimal() const;  // 17 significant digits
  friend bool operator==(const DyadicValue&, const DyadicValue&) = default;
};

FixedPointAngle angle_from_rational(const BigInt& p, const BigInt& q, unsigned bits);

/// Uniform B-bit angle, a pure function of (seed, index).
FixedPointAngle sample_angle(std::uint64_t seed, std::uint64_t index, unsigned bits);

/// The points alpha * a(n) mod 1 for n = 1..N, exact at alpha's precision.
class Orbit {
public:
  Orbit(FixedPointAngle alpha, std::string source, unsigned bits, std::vector<BigInt> mantissas);

  const FixedPointAngle& alpha() const noexcept { return alpha_; }
  const std::string& source() const noexcept { return source_; }
  unsigned bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return mantissas_.size(); }
  const std::vector<BigInt>& mantissas() const noexcept { return mantissas_; }
  FixedPointAngle point(std::size_t i) const { return {mantissas_.at(i), bits_}; }

  /// Keeps the high `bits` of every point; the inverse of computing at a
  /// zero-extended alpha.
  Orbit truncated(unsigned bits) const;

private:
  FixedPointAngle alpha_;
  std::string source_;
  unsigned bits_;
  std::vector<BigInt> mantissas_;
};

Orbit orbit(const FixedPointAngle& alpha, const IntegerSequence& seq, std::size_t n);

/// ||x - y||, the distance to the nearest integer, as an exact dyadic in [0, 1/2].
DyadicValue circle_distance(const FixedPointAngle& x, const FixedPointAngle& y);

struct GapReport {
  DyadicValue delta_min;
  std::vector<BigInt> gaps;  // sorted mantissas of the N circular gaps
  unsigned bits = kMinAngleBits;
  std::size_t distinct_gap_count = 0;
  bool collision = false;
};

/// Consecutive circular gaps of the first `n` orbit points (all points if
/// `n` is absent). O(n log n).
GapReport minimal_gap(const Orbit& orbit, std::optional<std::size_t> n = std::nullopt);

std::size_t distinct_gap_count(const Orbit& orbit);

/// bitlength(max |a(n)|) + 2 log2 N + 40, rounded up.
unsigned recommended_bits(const IntegerSequence& seq, std::size_t n);

/// 128 for the dense families, bitlength(a(N)) + 128 for lacunary/custom;
/// raised to recommended_bits if that is larger.
unsigned default_bits(const IntegerSequence& seq, std::size_t n);

/// A warning string when `bits` is below recommended_bits.
std::optional<std::string> precision_warning(const IntegerSequence& seq, std::size_t n,
                                             unsigned bits);

} // namespace mingap
