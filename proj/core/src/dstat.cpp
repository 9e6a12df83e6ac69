#include "mingap/dstat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "mingap/errors.hpp"
#include "parallel.hpp"

namespace mingap {

namespace {

void check_dstat_args(std::size_t n, std::size_t available, std::int64_t m) {
  if (n < 2 || n > available) {
    throw ArgumentError(fmt::format("N = {} outside 2..{}", n, available));
  }
  if (m < 1) {
    throw ArgumentError(fmt::format("M = {} must be at least 1", m));
  }
}

// RAII scratch integers for the inner sweep; avoids an allocation per pair.
struct Scratch {
  mpz_t gap, lhs, edge;
  Scratch() { mpz_inits(gap, lhs, edge, nullptr); }
  ~Scratch() { mpz_clears(gap, lhs, edge, nullptr); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
};

// sum_{l=L+1}^inf l^-4.
double quartic_tail(std::int64_t l) {
  if (l <= 0) {
    return std::pow(std::numbers::pi, 4) / 90.0;
  }
  const double x = static_cast<double>(l);
  return 1.0 / (3.0 * x * x * x);
}

} // namespace

DStatResult d_statistic(const Orbit& orb, std::size_t n, std::int64_t m, const WindowSpec& w) {
  check_dstat_args(n, orb.size(), m);
  const unsigned bits = orb.bits();
  std::vector<const BigInt*> sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = &orb.mantissas()[i];
  }
  std::sort(sorted.begin(), sorted.end(), [](const BigInt* a, const BigInt* b) {
    return mpz_cmp(a->get_mpz_t(), b->get_mpz_t()) < 0;
  });

  const BigInt one = pow2(bits);
  const auto two_m = static_cast<unsigned long>(2 * m);
  Scratch s;
  double value = 0.0;
  std::uint64_t pairs = 0;

  // A pair contributes iff its circle distance d satisfies 2 M d < 1. For M >= 1
  // at most one of the two forward gaps between two points can do so, so each
  // unordered pair is visited once, from its left end.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t j = i + step;
      if (j < n) {
        mpz_sub(s.gap, sorted[j]->get_mpz_t(), sorted[i]->get_mpz_t());
      } else {
        mpz_sub(s.gap, sorted[j - n]->get_mpz_t(), sorted[i]->get_mpz_t());
        mpz_add(s.gap, s.gap, one.get_mpz_t());
      }
      mpz_mul_ui(s.lhs, s.gap, two_m);
      if (mpz_cmp(s.lhs, one.get_mpz_t()) >= 0) {
        break;
      }
      // Exact distance to the support edge, u = 1 - 2 M d > 0.
      mpz_sub(s.edge, one.get_mpz_t(), s.lhs);
      signed long exp = 0;
      const double mant = mpz_get_d_2exp(&exp, s.edge);
      const double u = std::ldexp(mant, static_cast<int>(exp - static_cast<signed long>(bits)));
      value += 2.0 * w.from_edge(u);
      pairs += 2;
    }
  }
  return {value, n, m, orb.alpha(), w.kind(), pairs};
}

DStatResult d_statistic(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                        const FixedPointAngle& alpha, const WindowSpec& w) {
  check_dstat_args(n, seq.size(), m);
  return d_statistic(orbit(alpha, seq, n), n, m, w);
}

double pair_correlation(const IntegerSequence& seq, std::size_t n, const FixedPointAngle& alpha,
                        const WindowSpec& w) {
  return d_statistic(seq, n, static_cast<std::int64_t>(n), alpha, w).value /
         static_cast<double>(n);
}

namespace {

std::vector<double> sample_d(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                             const WindowSpec& w, const MonteCarloOptions& opts, unsigned bits) {
  return detail::parallel_map<double>(opts.samples, [&](std::size_t s) {
    return d_statistic(seq, n, m, sample_angle(opts.seed, s, bits), w).value;
  });
}

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  return sum / static_cast<double>(xs.size());
}

double unbiased_variance(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return ss / static_cast<double>(xs.size() - 1);
}

VarianceReport moments(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                       const WindowSpec& w, const MonteCarloOptions& opts,
                       std::size_t min_samples) {
  check_dstat_args(n, seq.size(), m);
  if (opts.samples < min_samples) {
    throw ArgumentError(fmt::format("need at least {} samples, got {}", min_samples, opts.samples));
  }
  const unsigned bits = opts.bits != 0 ? opts.bits : default_bits(seq, n);
  const std::vector<double> xs = sample_d(seq, n, m, w, opts, bits);

  VarianceReport r;
  r.samples = opts.samples;
  r.seed = opts.seed;
  r.bits = bits;
  r.epsilon = opts.epsilon;
  r.mc_mean = mean_of(xs);
  r.mc_variance = unbiased_variance(xs, r.mc_mean);
  r.mc_stderr = std::sqrt(r.mc_variance / static_cast<double>(xs.size()));

  // Stderr of the variance from contiguous batches.
  const std::size_t batches = std::clamp<std::size_t>(opts.batches, 2, xs.size() / 2);
  const std::size_t width = xs.size() / batches;
  std::vector<double> batch_vars;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * width;
    const std::size_t end = b + 1 == batches ? xs.size() : begin + width;
    const std::span<const double> part(xs.data() + begin, end - begin);
    batch_vars.push_back(unbiased_variance(part, mean_of(part)));
  }
  const double bv_mean = mean_of(batch_vars);
  r.mc_var_stderr =
      std::sqrt(unbiased_variance(batch_vars, bv_mean) / static_cast<double>(batches));
  return r;
}

} // namespace

VarianceReport d_mean_mc(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                         const WindowSpec& w, const MonteCarloOptions& opts) {
  return moments(seq, n, m, w, opts, 2);
}

VarianceReport d_variance_mc(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                             const WindowSpec& w, const MonteCarloOptions& opts) {
  VarianceReport r = moments(seq, n, m, w, opts, 100);
  const EnergyReport e = additive_energy(seq, n);
  r.bound_rhs = std::exp(opts.epsilon * std::log(static_cast<double>(n)) + log_abs(e.energy)) /
                static_cast<double>(m);
  return r;
}

FourierVariance d_variance_fourier(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                                   const WindowSpec& w, std::int64_t k_max) {
  check_dstat_args(n, seq.size(), m);
  if (n > kMaxFourierVarianceLength) {
    throw ResourceError(fmt::format("Fourier variance at N = {} exceeds the guard {}", n,
                                    kMaxFourierVarianceLength));
  }
  if (k_max < 16 * m) {
    throw ArgumentError(fmt::format("K_max = {} must be at least 16 M = {}", k_max, 16 * m));
  }
  const DifferenceHistogram hist = difference_histogram(seq, n);
  const auto& keys = hist.positive();
  const double md = static_cast<double>(m);

  // c(k) = fhat(k/M)/M for k = 0..K_max.
  const std::vector<double> c = detail::parallel_map<double>(
      static_cast<std::size_t>(k_max) + 1,
      [&](std::size_t k) { return w.fourier(static_cast<double>(k) / md) / md; });

  const double e0 = w.total_curvature() / (4.0 * std::numbers::pi * std::numbers::pi);
  const BigInt kmax_big = static_cast<long>(k_max);

  struct Partial {
    double value = 0.0;
    double tail = 0.0;
  };
  // Row i sums the pairs (i, j) with j >= i; the kernel is symmetric in (v1, v2).
  const std::vector<Partial> rows = detail::parallel_map<Partial>(keys.size(), [&](std::size_t i) {
    Partial p;
    BigInt g, a1, a2;
    for (std::size_t j = i; j < keys.size(); ++j) {
      mpz_gcd(g.get_mpz_t(), keys[i].first.get_mpz_t(), keys[j].first.get_mpz_t());
      mpz_divexact(a1.get_mpz_t(), keys[i].first.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(a2.get_mpz_t(), keys[j].first.get_mpz_t(), g.get_mpz_t());
      const BigInt& big = a1 > a2 ? a1 : a2;
      std::int64_t l_max = 0;
      double kernel = 0.0;
      if (big <= kmax_big) {
        const auto s1 = static_cast<std::int64_t>(a1.get_si());
        const auto s2 = static_cast<std::int64_t>(a2.get_si());
        l_max = k_max / std::max(s1, s2);
        for (std::int64_t l = 1; l <= l_max; ++l) {
          kernel += c[static_cast<std::size_t>(l * s2)] * c[static_cast<std::size_t>(l * s1)];
        }
        kernel *= 2.0;  // l and -l
      }
      const double weight = 4.0 * static_cast<double>(keys[i].second) *
                            static_cast<double>(keys[j].second) * (i == j ? 1.0 : 2.0);
      p.value += weight * kernel;
      // |c(l a2) c(l a1)| <= e0^2 M^2 / (l^4 a1^2 a2^2).
      const double la = log_abs(a1) + log_abs(a2);
      p.tail += weight * 2.0 * e0 * e0 * md * md * std::exp(-2.0 * la) * quartic_tail(l_max);
    }
    return p;
  });

  FourierVariance out;
  out.k_max = k_max;
  for (const auto& p : rows) {
    out.value += p.value;
    out.tail_bound += p.tail;
  }
  if (out.tail_bound > 0.01 * std::fabs(out.value)) {
    out.warnings.push_back(fmt::format(
        "K_max = {} leaves an estimated tail of {:.3g} (> 1% of {:.6g}); raise K_max", k_max,
        out.tail_bound, out.value));
  }
  return out;
}

double gcd_sum(const DifferenceHistogram& hist) {
  const auto& keys = hist.positive();
  if (keys.size() > kMaxGcdSumKeys) {
    throw ResourceError(fmt::format("gcd_sum over {} distinct |v| exceeds the O(V^2) guard {}",
                                    keys.size(), kMaxGcdSumKeys));
  }
  const bool small = keys.empty() || bit_length(keys.back().first) <= 63;
  std::vector<std::uint64_t> u64;
  std::vector<double> logs;
  if (small) {
    for (const auto& [v, r] : keys) {
      u64.push_back(static_cast<std::uint64_t>(v.get_si()));
    }
  } else {
    for (const auto& [v, r] : keys) {
      logs.push_back(log_abs(v));
    }
  }

  // Pairs (v1, v2) and (v1, -v2) etc. fold to four copies of each (|v1|, |v2|).
  const std::vector<double> off = detail::parallel_map<double>(keys.size(), [&](std::size_t i) {
    double row = 0.0;
    BigInt g;
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      double ratio;
      if (small) {
        const auto gg = std::gcd(u64[i], u64[j]);
        ratio = static_cast<double>(gg) /
                std::sqrt(static_cast<double>(u64[i]) * static_cast<double>(u64[j]));
      } else {
        mpz_gcd(g.get_mpz_t(), keys[i].first.get_mpz_t(), keys[j].first.get_mpz_t());
        ratio = std::exp(log_abs(g) - 0.5 * (logs[i] + logs[j]));
      }
      row += static_cast<double>(keys[j].second) * ratio;
    }
    return 8.0 * static_cast<double>(keys[i].second) * row;
  });

  double diag = 0.0;
  for (const auto& [v, r] : keys) {
    diag += 4.0 * static_cast<double>(r) * static_cast<double>(r);
  }
  double offdiag = 0.0;
  for (double x : off) {
    offdiag += x;
  }
  return diag + offdiag;
}

KernelCheck gcd_kernel_check(std::int64_t v1, std::int64_t v2, std::int64_t m, const WindowSpec& w,
                             std::int64_t k_max) {
  if (v1 == 0 || v2 == 0) {
    throw ArgumentError("gcd_kernel_check: v1 and v2 must be nonzero");
  }
  if (m < 1 || k_max < 1) {
    throw ArgumentError("gcd_kernel_check: M and K_max must be positive");
  }
  const std::int64_t u1 = v1 < 0 ? -v1 : v1;
  const std::int64_t u2 = v2 < 0 ? -v2 : v2;
  const std::int64_t g = std::gcd(u1, u2);
  const std::int64_t a1 = u1 / g;
  const std::int64_t a2 = u2 / g;
  const double md = static_cast<double>(m);
  const std::int64_t l_max = k_max / std::max(a1, a2);

  // k1 v1 = k2 v2 iff (k1, k2) = l (v2/g, v1/g); signs of v only flip l.
  double lhs = 0.0;
  for (std::int64_t l = 1; l <= l_max; ++l) {
    lhs += w.fourier(static_cast<double>(l * a2) / md) * w.fourier(static_cast<double>(l * a1) / md);
  }
  lhs *= 2.0 / (md * md);

  const double e0 = w.total_curvature() / (4.0 * std::numbers::pi * std::numbers::pi);
  const double da1 = static_cast<double>(a1);
  const double da2 = static_cast<double>(a2);
  KernelCheck out;
  out.lhs = lhs;
  out.rhs = static_cast<double>(g) / (md * std::sqrt(static_cast<double>(u1) * static_cast<double>(u2)));
  // |c(l a2) c(l a1)| <= e0^2 M^2 / (l^4 a1^2 a2^2), both signs of l.
  out.tail_bound = 2.0 * e0 * e0 * md * md / (da1 * da1 * da2 * da2) * quartic_tail(l_max);
  return out;
}

double kernel_constant(WindowKind kind) {
  return kind == WindowKind::triangle ? 1.34 : 1.36;
}

double decay_constant(WindowKind kind) {
  return kind == WindowKind::triangle ? 0.0045 : 0.0014;
}

void write_variance_csv_header(std::ostream& out) {
  out << "family,params,N,M,window,samples,mc_mean,mc_var,fourier_var,bound_rhs,seed\n";
}

void write_variance_csv_row(std::ostream& out, const IntegerSequence& seq, std::size_t n,
                            std::int64_t m, WindowKind w, const VarianceReport& r) {
  const std::string fourier = r.fourier ? fmt::format("{:.17g}", r.fourier->value) : "";
  out << fmt::format("{},{},{},{},{},{},{:.17g},{:.17g},{},{:.17g},{}\n", seq.family().name(),
                     seq.family().params(), n, m, to_string(w), r.samples, r.mc_mean,
                     r.mc_variance, fourier, r.bound_rhs, r.seed);
}

} // namespace mingap
