#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mingap {

enum class WindowKind { triangle, bump };

std::string to_string(WindowKind kind);
WindowKind parse_window_kind(std::string_view text);

/// A non-negative, unit-mass window f supported in [-1/2, 1/2].
///
/// triangle: f(x) = 2 max(0, 1 - 2|x|), the self-convolution of
///           2 * 1[-1/4, 1/4]; fhat(y) = (sin(pi y / 2) / (pi y / 2))^2.
/// bump:     f(x) = c exp(-1 / (1 - 4x^2)) on |x| < 1/2, c fixing unit mass;
///           fhat by a periodic trapezoid rule on f.
///
/// Both kinds satisfy f >= 1 on |x| <= 1/4. Instances are immutable and the
/// quadrature-derived constants are computed once per process.
class WindowSpec {
public:
  explicit WindowSpec(WindowKind kind);

  WindowKind kind() const noexcept { return kind_; }
  double normalization() const noexcept { return normalization_; }
  bool threshold_ok() const noexcept { return threshold_ok_; }

  /// f(x).
  double operator()(double x) const;

  /// f at the point whose distance to the support edge is u = 1 - 2|x|,
  /// u in [0, 1]. Lets callers hand over an exactly computed complement.
  double from_edge(double u) const;

  /// F_M(x) = sum_j f(M (x + j)), x in [0, 1).
  double periodized(std::int64_t m, double x) const;

  /// fhat(y) = integral f(x) e(-xy) dx (real, even).
  double fourier(double y) const;

  /// |fhat(y)| <= min(1, total_curvature / (4 pi^2 y^2)) with
  /// total_curvature = integral |f''| (point masses included).
  double fourier_envelope(double y) const;

  /// integral f^2.
  double l2_norm_squared() const noexcept { return l2_norm_squared_; }

  double total_curvature() const noexcept { return total_curvature_; }

private:
  WindowKind kind_;
  double normalization_;
  double l2_norm_squared_;
  double total_curvature_;
  bool threshold_ok_;
};

/// Process-wide shared instance per kind.
const WindowSpec& window(WindowKind kind);

} // namespace mingap
