#include "mingap/bigint.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include <gmp.h>

#include "mingap/errors.hpp"

namespace mingap {

std::size_t bit_length(const BigInt& x) {
  if (sgn(x) == 0) {
    return 0;
  }
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

BigInt pow2(std::size_t bits) {
  BigInt r;
  mpz_setbit(r.get_mpz_t(), bits);
  return r;
}

double log_abs(const BigInt& x) {
  signed long exp = 0;
  const double d = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(std::fabs(d)) + static_cast<double>(exp) * std::log(2.0);
}

double dyadic_to_double(const BigInt& mantissa, std::size_t bits) {
  signed long exp = 0;
  const double d = mpz_get_d_2exp(&exp, mantissa.get_mpz_t());
  return std::ldexp(d, static_cast<int>(exp - static_cast<signed long>(bits)));
}

std::string to_hex(const BigInt& x) { return x.get_str(16); }

std::string to_decimal(const BigInt& x) { return x.get_str(10); }

BigInt parse_decimal(std::string_view text) {
  std::size_t i = 0;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    i = 1;
  }
  if (i == text.size()) {
    throw InputError("not a decimal integer: '" + std::string(text) + "'");
  }
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
      throw InputError("not a decimal integer: '" + std::string(text) + "'");
    }
  }
  // mpz_set_str rejects a leading '+'.
  const std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return BigInt(digits, 10);
}

BigInt parse_hex(std::string_view text) {
  if (text.empty()) {
    throw InputError("empty hexadecimal value");
  }
  for (char c : text) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) {
      throw InputError("not a hexadecimal value: '" + std::string(text) + "'");
    }
  }
  return BigInt(std::string(text), 16);
}

std::string dyadic_to_decimal(const BigInt& mantissa, std::size_t bits) {
  mpf_t value;
  mpf_init2(value, 192);
  mpf_set_z(value, mantissa.get_mpz_t());
  mpf_div_2exp(value, value, bits);
  const int len = gmp_snprintf(nullptr, 0, "%.17Fg", value);
  std::vector<char> buf(static_cast<std::size_t>(len) + 1);
  gmp_snprintf(buf.data(), buf.size(), "%.17Fg", value);
  mpf_clear(value);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

} // namespace mingap
