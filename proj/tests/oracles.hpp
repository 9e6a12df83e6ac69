#pragma once

// Independent reference implementations. None of these call into the
// library's algorithms; they are deliberately slow and literal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include <mingap/bigint.hpp>

namespace oracle {

using mingap::BigInt;

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e > 0) {
    if (e & 1) {
      r = mul_mod(r, b, m);
    }
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) {
    return false;
  }
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) {
      return n == p;
    }
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) {
      continue;
    }
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mul_mod(x, x, n);
      composite = x != n - 1;
    }
    if (composite) {
      return false;
    }
  }
  return true;
}

inline bool is_squarefree(std::uint64_t n) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) {
      return false;
    }
  }
  return n >= 1;
}

// E = sum over s of r(s)^2, r(s) = #{(i, j): a_i + a_j = s}.
inline BigInt energy_by_sums(const std::vector<BigInt>& a) {
  std::map<BigInt, std::uint64_t> r;
  for (const auto& x : a) {
    for (const auto& y : a) {
      ++r[BigInt(x + y)];
    }
  }
  BigInt e = 0;
  for (const auto& [s, c] : r) {
    e += BigInt(c) * c;
  }
  return e;
}

// Smallest ||x_i - x_j|| over all pairs, as a mantissa over 2^bits.
inline BigInt all_pairs_min_gap(const std::vector<BigInt>& pts, unsigned bits) {
  const BigInt one = BigInt(1) << bits;
  BigInt best = one;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      BigInt d = pts[i] - pts[j];
      if (d < 0) {
        d = -d;
      }
      BigInt e = one - d;
      best = std::min({best, d, e});
    }
  }
  return best;
}

// alpha * a mod 2^bits, for each a.
inline std::vector<BigInt> orbit_points(const BigInt& alpha, const std::vector<BigInt>& a,
                                        unsigned bits) {
  const BigInt one = BigInt(1) << bits;
  std::vector<BigInt> out;
  for (const auto& x : a) {
    BigInt p = alpha * x;
    p %= one;  // truncates toward zero
    if (p < 0) {
      p += one;
    }
    out.push_back(p);
  }
  return out;
}

// The literal double sum over ordered pairs m != n of sum_j f(M (x + j)).
template <class F>
double literal_d(const std::vector<BigInt>& pts, unsigned bits, std::int64_t m, F f) {
  const BigInt one = BigInt(1) << bits;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) {
        continue;
      }
      BigInt d = pts[i] - pts[j];
      if (d < 0) {
        d += one;
      }
      mpf_class q(d, 2 * bits + 64);
      q /= mpf_class(one, 2 * bits + 64);
      const double x = q.get_d();
      for (int shift = -2; shift <= 1; ++shift) {
        total += f(static_cast<double>(m) * (x + shift));
      }
    }
  }
  return total;
}

// integral of g over [lo, hi] by 30-point Gauss-Legendre on equal panels.
template <class G>
double integrate_panels(G g, double lo, double hi, int panels) {
  double total = 0.0;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    total += boost::math::quadrature::gauss<double, 30>::integrate(g, lo + p * h, lo + (p + 1) * h);
  }
  return total;
}

template <class G>
double integrate_support(G g, int panels = 64) {
  return integrate_panels(g, -0.5, 0.5, panels);
}

template <class F>
double fourier_by_quadrature(F f, double y, int panels = 64) {
  const double tau = 2.0 * std::acos(-1.0);
  // even, so x = 0 is a panel edge
  const int n = 2 * (panels / 2 + 2 * static_cast<int>(std::ceil(std::fabs(y))));
  return integrate_support([&](double x) { return f(x) * std::cos(tau * x * y); }, n);
}

} // namespace oracle
