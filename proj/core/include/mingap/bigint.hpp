#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mingap {

using BigInt = mpz_class;

/// Number of bits in |x|; 0 for x == 0.
std::size_t bit_length(const BigInt& x);

/// 2^bits.
BigInt pow2(std::size_t bits);

/// Natural log of |x| for x != 0, valid far outside the double range.
double log_abs(const BigInt& x);

/// x as double, truncated toward zero.
inline double to_double(const BigInt& x) { return x.get_d(); }

/// x / 2^bits as double. Underflows to 0 only below the double range.
double dyadic_to_double(const BigInt& mantissa, std::size_t bits);

std::string to_hex(const BigInt& x);
std::string to_decimal(const BigInt& x);

/// Parses an optionally signed decimal integer; throws InputError otherwise.
BigInt parse_decimal(std::string_view text);

/// Parses lowercase or uppercase hexadecimal digits (no sign, no prefix).
BigInt parse_hex(std::string_view text);

/// mantissa / 2^bits printed with 17 significant digits.
std::string dyadic_to_decimal(const BigInt& mantissa, std::size_t bits);

} // namespace mingap
