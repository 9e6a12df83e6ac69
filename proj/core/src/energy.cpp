#include "mingap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "mingap/errors.hpp"

namespace mingap {

DifferenceHistogram::DifferenceHistogram(std::size_t n, std::vector<Entry> positive)
    : n_(n), positive_(std::move(positive)) {}

std::vector<DifferenceHistogram::Entry> DifferenceHistogram::signed_entries() const {
  std::vector<Entry> out;
  out.reserve(2 * positive_.size());
  for (auto it = positive_.rbegin(); it != positive_.rend(); ++it) {
    out.emplace_back(-it->first, it->second);
  }
  out.insert(out.end(), positive_.begin(), positive_.end());
  return out;
}

std::uint64_t DifferenceHistogram::count(const BigInt& v) const {
  if (sgn(v) == 0) {
    return 0;
  }
  const BigInt key = abs(v);
  auto it = std::lower_bound(positive_.begin(), positive_.end(), key,
                             [](const Entry& e, const BigInt& k) { return e.first < k; });
  return (it != positive_.end() && it->first == key) ? it->second : 0;
}

BigInt DifferenceHistogram::diag_sum() const {
  BigInt sum = 0;
  for (const auto& [v, r] : positive_) {
    BigInt rr = static_cast<unsigned long>(r);
    sum += rr * rr;
  }
  return 2 * sum;  // both signs
}

namespace {

void check_histogram_length(const IntegerSequence& seq, std::size_t n) {
  if (n < 2 || n > seq.size()) {
    throw ArgumentError(fmt::format("N = {} outside 2..{}", n, seq.size()));
  }
  if (n > kMaxHistogramLength) {
    throw ResourceError(fmt::format(
        "difference histogram at N = {} exceeds the O(N^2) guard {}; use a smaller N", n,
        kMaxHistogramLength));
  }
}

template <class T>
std::vector<DifferenceHistogram::Entry> run_length(std::vector<T>& diffs) {
  std::sort(diffs.begin(), diffs.end());
  std::vector<DifferenceHistogram::Entry> out;
  for (std::size_t i = 0; i < diffs.size();) {
    std::size_t j = i;
    while (j < diffs.size() && diffs[j] == diffs[i]) {
      ++j;
    }
    if constexpr (std::is_same_v<T, BigInt>) {
      out.emplace_back(diffs[i], j - i);
    } else {
      BigInt v;
      const std::uint64_t u = static_cast<std::uint64_t>(diffs[i]);
      mpz_import(v.get_mpz_t(), 1, 1, sizeof(u), 0, 0, &u);
      out.emplace_back(std::move(v), j - i);
    }
    i = j;
  }
  return out;
}

} // namespace

DifferenceHistogram difference_histogram(const IntegerSequence& seq, std::size_t n) {
  check_histogram_length(seq, n);
  const auto& a = seq.values();
  const std::size_t pairs = n * (n - 1) / 2;

  // Each unordered pair gives one positive difference |a(m) - a(n)|; the
  // ordered count R(v) for v > 0 is its multiplicity.
  const auto [lo, hi] = std::minmax_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
  const BigInt spread = *hi - *lo;
  if (bit_length(spread) < 63 && lo->fits_slong_p() && hi->fits_slong_p()) {
    std::vector<std::int64_t> small(n);
    for (std::size_t i = 0; i < n; ++i) {
      small[i] = a[i].get_si();
    }
    std::vector<std::uint64_t> diffs;
    diffs.reserve(pairs);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::int64_t d = small[j] - small[i];
        diffs.push_back(static_cast<std::uint64_t>(d < 0 ? -d : d));
      }
    }
    return {n, run_length(diffs)};
  }

  std::vector<BigInt> diffs;
  diffs.reserve(pairs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      BigInt d = a[j] - a[i];
      mpz_abs(d.get_mpz_t(), d.get_mpz_t());
      diffs.push_back(std::move(d));
    }
  }
  return {n, run_length(diffs)};
}

EnergyReport additive_energy(const DifferenceHistogram& hist) {
  const std::size_t n = hist.length();
  BigInt nn = static_cast<unsigned long>(n);
  EnergyReport r;
  r.n = n;
  r.diag_sum = hist.diag_sum();
  r.energy = nn * nn + r.diag_sum;
  r.trivial_count = 2 * nn * nn - nn;
  if (r.energy < r.trivial_count || r.energy > nn * nn * nn) {
    throw std::logic_error(fmt::format("additive energy {} outside [2N^2 - N, N^3] at N = {}",
                                       to_decimal(r.energy), n));
  }
  return r;
}

EnergyReport additive_energy(const IntegerSequence& seq, std::size_t n) {
  return additive_energy(difference_histogram(seq, n));
}

BigInt additive_energy_bruteforce(const IntegerSequence& seq, std::size_t n) {
  if (n < 1 || n > seq.size()) {
    throw ArgumentError(fmt::format("N = {} outside 1..{}", n, seq.size()));
  }
  if (n > kMaxBruteforceEnergyLength) {
    throw ResourceError(fmt::format("brute-force energy at N = {} exceeds the O(N^4) guard {}", n,
                                    kMaxBruteforceEnergyLength));
  }
  const auto& a = seq.values();
  std::vector<BigInt> sums(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sums[i * n + j] = a[i] + a[j];
    }
  }
  unsigned long count = 0;
  for (std::size_t n1 = 0; n1 < n; ++n1) {
    for (std::size_t n2 = 0; n2 < n; ++n2) {
      const auto& lhs = sums[n1 * n + n2];
      for (std::size_t n3 = 0; n3 < n; ++n3) {
        for (std::size_t n4 = 0; n4 < n; ++n4) {
          if (mpz_cmp(lhs.get_mpz_t(), sums[n3 * n + n4].get_mpz_t()) == 0) {
            ++count;
          }
        }
      }
    }
  }
  return BigInt(count);
}

std::vector<EnergyRow> energy_scan(const IntegerSequence& seq, std::span<const std::size_t> ns) {
  std::vector<EnergyRow> rows;
  rows.reserve(ns.size());
  std::size_t prev = 0;
  for (std::size_t n : ns) {
    if (n <= prev) {
      throw ArgumentError("energy_scan: N values must be strictly ascending");
    }
    prev = n;
    const EnergyReport r = additive_energy(seq, n);
    rows.push_back({n, r.energy, r.diag_sum, log_abs(r.energy) / std::log(static_cast<double>(n))});
  }
  return rows;
}

void write_energy_csv(std::ostream& out, const IntegerSequence& seq,
                      std::span<const EnergyRow> rows) {
  out << "family,params,N,energy,diag_sum,exponent\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{:.17g}\n", seq.family().name(), seq.family().params(), r.n,
                       to_decimal(r.energy), to_decimal(r.diag_sum), r.exponent);
  }
}

} // namespace mingap
