#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mingap/bigint.hpp"

namespace mingap {

enum class Family { monomial, lacunary, primes, squarefree, naturals, custom };

/// A sequence family plus its single integer parameter (d for monomial,
/// q for lacunary; unused otherwise).
struct FamilySpec {
  Family kind = Family::naturals;
  int param = 0;

  /// "monomial", "lacunary", ...
  std::string name() const;
  /// "d=2", "q=3" or "" for parameterless families.
  std::string params() const;

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// A finite run a(1), ..., a(N) of pairwise-distinct integers.
///
/// Values are held 0-based: `values()[n - 1]` is a(n). The constructor
/// enforces distinctness and length >= 2, so every instance satisfies the
/// invariants downstream statistics rely on.
class IntegerSequence {
public:
  IntegerSequence(std::string label, FamilySpec family, std::vector<BigInt> values);

  const std::string& label() const noexcept { return label_; }
  const FamilySpec& family() const noexcept { return family_; }
  const std::vector<BigInt>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// a(n), 1-based.
  const BigInt& term(std::size_t n) const;

  /// Largest |a(n)| over the first `n` terms.
  BigInt max_abs(std::size_t n) const;

private:
  std::string label_;
  FamilySpec family_;
  std::vector<BigInt> values_;
};

inline constexpr int kMaxMonomialDegree = 16;
inline constexpr std::size_t kMaxLacunaryLength = 4096;
inline constexpr std::size_t kMaxDenseLength = 10'000'000;

IntegerSequence generate_monomial(int d, std::size_t n);
IntegerSequence generate_lacunary(int q, std::size_t n);
IntegerSequence generate_primes(std::size_t n);
IntegerSequence generate_squarefree(std::size_t n);
IntegerSequence generate_naturals(std::size_t n);

/// Dispatches on `spec`; `custom` is rejected (use load_sequence).
IntegerSequence generate(const FamilySpec& spec, std::size_t n);

/// Reads one decimal integer per line. Lines whose first non-blank
/// character is '#' and blank lines are skipped.
IntegerSequence load_sequence(const std::filesystem::path& path);
IntegerSequence parse_sequence(std::istream& in, std::string label);

void write_sequence(std::ostream& out, const IntegerSequence& seq);

/// Where a sequence comes from, as written on the command line:
/// `monomial:d=2`, `lacunary:q=2`, `primes`, `squarefree`, `naturals`,
/// `file:PATH`.
struct SequenceSource {
  FamilySpec family;
  std::optional<std::filesystem::path> file;

  static SequenceSource parse(std::string_view text);
  std::string to_string() const;
  IntegerSequence materialize(std::size_t n) const;
};

/// Throws ValidationError naming the first repeated value (by position).
void require_distinct(const std::vector<BigInt>& values);

} // namespace mingap
