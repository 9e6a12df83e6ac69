#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mingap/bigint.hpp"
#include "mingap/sequences.hpp"

namespace mingap {

inline constexpr std::size_t kMaxHistogramLength = 100'000;
inline constexpr std::size_t kMaxBruteforceEnergyLength = 40;

/// R(v) = #{(m, n): m != n, a(m) - a(n) = v} over the first N terms.
///
/// Only v > 0 is stored; R(-v) = R(v) always holds for ordered pairs, so
/// signed lookups fold onto the positive half.
class DifferenceHistogram {
public:
  using Entry = std::pair<BigInt, std::uint64_t>;

  DifferenceHistogram(std::size_t n, std::vector<Entry> positive);

  std::size_t length() const noexcept { return n_; }
  std::uint64_t total_pairs() const noexcept { return static_cast<std::uint64_t>(n_) * (n_ - 1); }

  /// Entries (v, R(v)) for v > 0, ascending in v.
  const std::vector<Entry>& positive() const noexcept { return positive_; }

  /// All nonzero keys, ascending, with both signs.
  std::vector<Entry> signed_entries() const;

  /// R(v); 0 for v == 0 or absent keys.
  std::uint64_t count(const BigInt& v) const;

  /// Sum over v != 0 of R(v)^2.
  BigInt diag_sum() const;

private:
  std::size_t n_;
  std::vector<Entry> positive_;
};

struct EnergyReport {
  std::size_t n = 0;
  BigInt energy;         // E(A, N)
  BigInt diag_sum;       // sum_{v != 0} R(v)^2
  BigInt trivial_count;  // 2N^2 - N
};

DifferenceHistogram difference_histogram(const IntegerSequence& seq, std::size_t n);

/// E = N^2 + sum_{v != 0} R(v)^2.
EnergyReport additive_energy(const DifferenceHistogram& hist);
EnergyReport additive_energy(const IntegerSequence& seq, std::size_t n);

/// Literal count of quadruples with a(n1) + a(n2) = a(n3) + a(n4). N <= 40.
BigInt additive_energy_bruteforce(const IntegerSequence& seq, std::size_t n);

struct EnergyRow {
  std::size_t n = 0;
  BigInt energy;
  BigInt diag_sum;
  double exponent = 0.0;  // log E / log N
};

std::vector<EnergyRow> energy_scan(const IntegerSequence& seq, std::span<const std::size_t> ns);

/// Header `family,params,N,energy,diag_sum,exponent`.
void write_energy_csv(std::ostream& out, const IntegerSequence& seq,
                      std::span<const EnergyRow> rows);

} // namespace mingap
