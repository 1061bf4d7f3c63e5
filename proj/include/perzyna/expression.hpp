#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "perzyna/fem2d.hpp"
#include "perzyna/tensor2d.hpp"

namespace perzyna {

/// Piecewise-linear function of time through (t, value) knots, constant
/// beyond the first and last knot. No knots means the constant 1.
class TimeProfile {
 public:
  TimeProfile() = default;
  explicit TimeProfile(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

/// (c0 + cx x + cy y + cxx x^2 + cxy xy + cyy y^2) * time(t).
struct FieldExpr {
  std::array<double, 6> coef{};
  TimeProfile time;

  double value(const Vec2& x, double t) const;
  Vec2 gradient(const Vec2& x, double t) const;
  bool is_zero() const;
};

struct VectorExpr {
  FieldExpr x, y;
  Vec2 operator()(const Vec2& pt, double t) const { return {x.value(pt, t), y.value(pt, t)}; }
  bool is_zero() const { return x.is_zero() && y.is_zero(); }
};

struct TensorExpr {
  FieldExpr xx, yy, xy;
  SymTensor2 operator()(const Vec2& pt, double t) const { return {xx.value(pt, t), yy.value(pt, t), xy.value(pt, t)}; }
  Vec2 divergence(const Vec2& pt, double t) const;
};

/// "c0 cx cy cxx cxy cyy" (missing trailing coefficients are zero).
/// Throws ScenarioError.
std::array<double, 6> parse_coefficients(std::string_view text);
/// "t0:v0 t1:v1 ..." with strictly increasing times. Throws ScenarioError.
TimeProfile parse_time_profile(std::string_view text);

/// Nodal and barycentric samplers.
NodalVectors sample_nodes(const Mesh& mesh, const VectorExpr& f, double t);
NodalVectors sample_barycenters(const Mesh& mesh, const VectorExpr& f, double t);

}  // namespace perzyna
