#pragma once

#include <array>
#include <cmath>

namespace quasispec {

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  /// Largest singular value, closed form without cancellation.
  double norm() const {
    const double s1 = std::hypot(a + d, b - c);
    const double s2 = std::hypot(a - d, b + c);
    return 0.5 * (s1 + s2);
  }
  Mat2 adjugate() const { return {d, -b, -c, a}; }
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  Mat2 scaled(double s) const { return {a * s, b * s, c * s, d * s}; }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
inline Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }

using Vec2 = std::array<double, 2>;

inline Vec2 operator*(const Mat2& m, const Vec2& v) { return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]}; }
inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

}  // namespace quasispec
