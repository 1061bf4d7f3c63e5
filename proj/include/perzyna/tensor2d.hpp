#pragma once

#include <cmath>

#include <Eigen/Core>

namespace perzyna {

/// Components in (xx, yy, xy) order.
using Vec3 = Eigen::Vector3d;

/// Linear map on symmetric tensors acting on (xx, yy, xy) components.
/// The xy entry is always the tensor component, never the engineering shear.
using TensorMap = Eigen::Matrix3d;

/**
 * @brief Symmetric 2x2 tensor stored as (xx, yy, xy).
 *
 * `xy` is the tensor component. The factor 2 on the shear entry only shows
 * up in the Frobenius product (see inner()), so strain and stress share one
 * storage convention.
 */
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  static constexpr SymTensor2 zero() { return {}; }
  static constexpr SymTensor2 identity() { return {1.0, 1.0, 0.0}; }
  static constexpr SymTensor2 diag(double a, double b) { return {a, b, 0.0}; }
  static constexpr SymTensor2 offdiag(double s) { return {0.0, 0.0, s}; }
  static SymTensor2 from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }

  Vec3 vec() const { return {xx, yy, xy}; }

  constexpr double trace() const { return xx + yy; }

  /// A - (tr A / 2) Id; the trace of the result is exactly zero.
  constexpr SymTensor2 deviator() const {
    const double h = 0.5 * (xx - yy);
    return {h, -h, xy};
  }

  constexpr SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx;
    yy += o.yy;
    xy += o.xy;
    return *this;
  }
  constexpr SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx;
    yy -= o.yy;
    xy -= o.xy;
    return *this;
  }
  constexpr SymTensor2& operator*=(double s) {
    xx *= s;
    yy *= s;
    xy *= s;
    return *this;
  }

  friend constexpr SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend constexpr SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend constexpr SymTensor2 operator-(const SymTensor2& a) { return {-a.xx, -a.yy, -a.xy}; }
  friend constexpr SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend constexpr SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend constexpr SymTensor2 operator/(SymTensor2 a, double s) { return a *= (1.0 / s); }
  friend constexpr bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

struct TraceSplit {
  double tr;
  SymTensor2 dev;
};

constexpr TraceSplit split(const SymTensor2& a) { return {a.trace(), a.deviator()}; }

/// Frobenius product A:B.
constexpr double inner(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

constexpr double norm2(const SymTensor2& a) { return inner(a, a); }
inline double norm(const SymTensor2& a) { return std::sqrt(norm2(a)); }

/// Gram matrix of the Frobenius product in component coordinates.
inline TensorMap frobenius_metric() { return Vec3(1.0, 1.0, 2.0).asDiagonal(); }

inline SymTensor2 apply(const TensorMap& m, const SymTensor2& a) { return SymTensor2::from_vec(m * a.vec()); }

}  // namespace perzyna
