#include "mingap/window.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <vector>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "mingap/errors.hpp"

namespace mingap {

namespace {

using std::numbers::pi;

double bump_shape(double x) {
  const double s = 1.0 - 4.0 * x * x;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Adaptive Gauss-Kronrod over [0, 1/2], split into panels that each hold at
// most half an oscillation of cos(2 pi x y).
template <class F>
double integrate_half(F&& f, double y) {
  using boost::math::quadrature::gauss_kronrod;
  const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * std::fabs(y))));
  const double width = 0.5 / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    total += gauss_kronrod<double, 21>::integrate(f, p * width, (p + 1) * width, 12, 1e-14);
  }
  return total;
}

struct BumpConstants {
  double normalization;
  double l2_norm_squared;
  double total_curvature;
};

const BumpConstants& bump_constants() {
  static const BumpConstants k = [] {
    BumpConstants out{};
    const double mass = 2.0 * integrate_half(bump_shape, 0.0);
    out.normalization = 1.0 / mass;
    const double c = out.normalization;
    out.l2_norm_squared =
        2.0 * integrate_half([c](double x) { return c * c * bump_shape(x) * bump_shape(x); }, 0.0);
    // f' vanishes at 0 and 1/2 and has one extremum between, so the total
    // variation of f' over [-1/2, 1/2] is 4 max |f'|.
    auto neg_slope = [c](double x) {
      const double s = 1.0 - 4.0 * x * x;
      return -(c * bump_shape(x) * 8.0 * x / (s * s));
    };
    const auto [xmax, fmin] = boost::math::tools::brent_find_minima(
        [&](double x) { return -std::fabs(neg_slope(x)); }, 1e-6, 0.5 - 1e-6, 52);
    (void)xmax;
    out.total_curvature = 4.0 * -fmin;
    return out;
  }();
  return k;
}

constexpr double kAliasMargin = 256.0;
constexpr unsigned kMaxNodeLevel = 40;

// f(j / 2^level) for j = 0..2^level - 1 (only the first half is read), built
// once per level.
const std::vector<double>& bump_nodes(unsigned level) {
  static std::array<std::once_flag, kMaxNodeLevel> once;
  static std::array<std::vector<double>, kMaxNodeLevel> tables;
  if (level >= kMaxNodeLevel) {
    throw ArgumentError("window_fourier: node table level out of range");
  }
  std::call_once(once[level], [level] {
    const std::size_t p = std::size_t{1} << level;
    const double c = bump_constants().normalization;
    std::vector<double> t(p / 2);
    for (std::size_t j = 0; j < t.size(); ++j) {
      t[j] = c * bump_shape(static_cast<double>(j) / static_cast<double>(p));
    }
    t.resize(p, 0.0);
    tables[level] = std::move(t);
  });
  return tables[level];
}

} // namespace

std::string to_string(WindowKind kind) {
  return kind == WindowKind::triangle ? "triangle" : "bump";
}

WindowKind parse_window_kind(std::string_view text) {
  if (text == "triangle") {
    return WindowKind::triangle;
  }
  if (text == "bump") {
    return WindowKind::bump;
  }
  throw ConfigError("window must be 'triangle' or 'bump', got '" + std::string(text) + "'");
}

WindowSpec::WindowSpec(WindowKind kind) : kind_(kind) {
  if (kind_ == WindowKind::triangle) {
    normalization_ = 2.0;
    l2_norm_squared_ = 4.0 / 3.0;
    // |f''| has point masses 8 at 0 and 4 at each end of the support.
    total_curvature_ = 16.0;
  } else {
    const auto& k = bump_constants();
    normalization_ = k.normalization;
    l2_norm_squared_ = k.l2_norm_squared;
    total_curvature_ = k.total_curvature;
  }
  const double mass = 2.0 * integrate_half([this](double x) { return (*this)(x); }, 0.0);
  if (std::fabs(mass - 1.0) > 1e-12) {
    throw std::logic_error("window " + to_string(kind_) + " does not have unit mass");
  }
  // f is even and non-increasing in |x|, so checking the edge suffices.
  threshold_ok_ = (*this)(0.25) >= 1.0;
}

double WindowSpec::from_edge(double u) const {
  if (u <= 0.0) {
    return 0.0;
  }
  if (u > 1.0) {
    u = 1.0;
  }
  if (kind_ == WindowKind::triangle) {
    return 2.0 * u;
  }
  return normalization_ * std::exp(-1.0 / (u * (2.0 - u)));
}

double WindowSpec::operator()(double x) const {
  const double ax = std::fabs(x);
  if (ax >= 0.5) {
    return 0.0;
  }
  return from_edge(1.0 - 2.0 * ax);
}

double WindowSpec::periodized(std::int64_t m, double x) const {
  if (m < 1) {
    throw ArgumentError("periodized: M must be at least 1");
  }
  x -= std::floor(x);
  const double md = static_cast<double>(m);
  // Support width 1/M <= 1: only j = 0 and j = -1 can contribute.
  return (*this)(md * x) + (*this)(md * (x - 1.0));
}

double WindowSpec::fourier(double y) const {
  if (y == 0.0) {
    return 1.0;
  }
  if (kind_ == WindowKind::triangle) {
    const double t = pi * y / 2.0;
    const double s = std::sin(t) / t;
    return s * s;
  }
  // f is flat to all orders at +-1/2, so the P-point periodic trapezoid rule
  // equals sum_k fhat(y + kP). Keeping P - |y| >= 256 puts every alias where
  // |fhat| < 1e-14.
  const double ay = std::fabs(y);
  if (!(ay < 1e9)) {
    throw ArgumentError("window_fourier: |y| too large for the bump quadrature");
  }
  unsigned level = 9;
  while (static_cast<double>(std::size_t{1} << level) - ay < kAliasMargin) {
    ++level;
  }
  const auto& nodes = bump_nodes(level);
  const double p = static_cast<double>(nodes.size());
  const std::size_t half = nodes.size() / 2;
  double sum = nodes[0];
  for (std::size_t j = 1; j < half; ++j) {
    sum += 2.0 * nodes[j] * std::cos(2.0 * pi * static_cast<double>(j) * ay / p);
  }
  return sum / p;
}

double WindowSpec::fourier_envelope(double y) const {
  if (y == 0.0) {
    return 1.0;
  }
  return std::min(1.0, total_curvature_ / (4.0 * pi * pi * y * y));
}

const WindowSpec& window(WindowKind kind) {
  static const WindowSpec triangle(WindowKind::triangle);
  static const WindowSpec bump(WindowKind::bump);
  return kind == WindowKind::triangle ? triangle : bump;
}

} // namespace mingap
