#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mingap/circle.hpp"
#include "mingap/energy.hpp"
#include "mingap/sequences.hpp"
#include "mingap/window.hpp"

namespace mingap {

/// D(N, M)(alpha) = sum over ordered pairs m != n of F_M(alpha a(n) - alpha a(m)).
struct DStatResult {
  double value = 0.0;
  std::size_t n = 0;
  std::int64_t m = 1;
  FixedPointAngle alpha{0, kMinAngleBits};
  WindowKind window = WindowKind::triangle;
  /// Ordered pairs at circle distance strictly below 1/(2M), i.e. inside
  /// the open support of F_M.
  std::uint64_t contributing_pairs = 0;
};

/// Support-pruned evaluation: sort the first `n` points and sweep each one's
/// forward neighbours until the distance leaves the support.
DStatResult d_statistic(const Orbit& orbit, std::size_t n, std::int64_t m, const WindowSpec& w);
DStatResult d_statistic(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                        const FixedPointAngle& alpha, const WindowSpec& w);

/// D(N, N)(alpha) / N.
double pair_correlation(const IntegerSequence& seq, std::size_t n, const FixedPointAngle& alpha,
                        const WindowSpec& w);

struct FourierVariance {
  double value = 0.0;
  std::int64_t k_max = 0;
  /// Upper bound on |dropped terms| from the fhat envelope.
  double tail_bound = 0.0;
  std::vector<std::string> warnings;
};

struct VarianceReport {
  double mc_mean = 0.0;
  double mc_stderr = 0.0;      // of the mean
  double mc_variance = 0.0;    // unbiased
  double mc_var_stderr = 0.0;  // of the variance, by batching
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  unsigned bits = 0;
  std::optional<FourierVariance> fourier;
  double bound_rhs = 0.0;  // N^eps E / M
  double epsilon = 0.1;
};

struct MonteCarloOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned bits = 0;  // 0: default_bits(seq, N)
  std::size_t batches = 32;
  double epsilon = 0.1;
};

/// Mean and standard error of D over sampled angles.
VarianceReport d_mean_mc(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                         const WindowSpec& w, const MonteCarloOptions& opts);

/// Mean, unbiased variance, batched stderr of the variance, and bound_rhs.
/// Needs at least 100 samples.
VarianceReport d_variance_mc(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                             const WindowSpec& w, const MonteCarloOptions& opts);

inline constexpr std::size_t kMaxFourierVarianceLength = 64;

/// Var D as the Fourier-side double sum over differences
///   sum_{v1, v2 != 0} R(v1) R(v2) sum_{l != 0} c(l v2/g) c(l v1/g),
/// c(k) = fhat(k/M)/M, g = gcd(|v1|, |v2|), truncated at |k_i| <= k_max.
FourierVariance d_variance_fourier(const IntegerSequence& seq, std::size_t n, std::int64_t m,
                                   const WindowSpec& w, std::int64_t k_max);

inline constexpr std::size_t kMaxGcdSumKeys = 50'000;

/// sum_{v1, v2 != 0} R(v1) R(v2) gcd(v1, v2) / sqrt|v1 v2|.
double gcd_sum(const DifferenceHistogram& hist);

struct KernelCheck {
  double lhs = 0.0;  // truncated sum_{k1, k2 != 0} c(k1) c(k2) [k1 v1 = k2 v2]
  double rhs = 0.0;  // gcd(v1, v2) / (M sqrt|v1 v2|)
  double tail_bound = 0.0;
};

KernelCheck gcd_kernel_check(std::int64_t v1, std::int64_t v2, std::int64_t m, const WindowSpec& w,
                             std::int64_t k_max);

/// Frozen per-window constant C_w with lhs <= C_w * rhs over the reference grid.
double kernel_constant(WindowKind kind);

/// Frozen per-window constant with sum_{l != 0} fhat(a l)^2 <= C / a^2 for a >= 8.
double decay_constant(WindowKind kind);

/// Header `family,params,N,M,window,samples,mc_mean,mc_var,fourier_var,bound_rhs,seed`.
void write_variance_csv_header(std::ostream& out);
void write_variance_csv_row(std::ostream& out, const IntegerSequence& seq, std::size_t n,
                            std::int64_t m, WindowKind w, const VarianceReport& r);

} // namespace mingap
