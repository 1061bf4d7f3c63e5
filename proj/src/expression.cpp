#include "perzyna/expression.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "perzyna/errors.hpp"

namespace perzyna {

TimeProfile::TimeProfile(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i].first > knots_[i - 1].first)) throw ScenarioError("time profile knots must be strictly increasing");
}

double TimeProfile::operator()(double t) const {
  if (knots_.empty()) return 1.0;
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  const auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto lo = hi - 1;
  const double s = (t - lo->first) / (hi->first - lo->first);
  return (1.0 - s) * lo->second + s * hi->second;
}

double FieldExpr::value(const Vec2& p, double t) const {
  const double x = p.x(), y = p.y();
  const double v = coef[0] + coef[1] * x + coef[2] * y + coef[3] * x * x + coef[4] * x * y + coef[5] * y * y;
  return v * time(t);
}

Vec2 FieldExpr::gradient(const Vec2& p, double t) const {
  const double x = p.x(), y = p.y();
  const double s = time(t);
  return {s * (coef[1] + 2.0 * coef[3] * x + coef[4] * y), s * (coef[2] + coef[4] * x + 2.0 * coef[5] * y)};
}

bool FieldExpr::is_zero() const {
  return std::all_of(coef.begin(), coef.end(), [](double c) { return c == 0.0; });
}

Vec2 TensorExpr::divergence(const Vec2& pt, double t) const {
  const Vec2 gxx = xx.gradient(pt, t), gyy = yy.gradient(pt, t), gxy = xy.gradient(pt, t);
  return {gxx.x() + gxy.y(), gxy.x() + gyy.y()};
}

std::array<double, 6> parse_coefficients(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::array<double, 6> c{};
  std::size_t n = 0;
  for (std::string tok; in >> tok;) {
    if (n >= 6) throw ScenarioError("expected at most 6 coefficients (1 x y x^2 xy y^2), got '" + std::string(text) + "'");
    try {
      std::size_t used = 0;
      c[n] = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ScenarioError("bad coefficient '" + tok + "'");
    }
    ++n;
  }
  return c;
}

TimeProfile parse_time_profile(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::pair<double, double>> knots;
  for (std::string tok; in >> tok;) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ScenarioError("time knot '" + tok + "' is not of the form t:value");
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string ts = tok.substr(0, colon), vs = tok.substr(colon + 1);
      const double t = std::stod(ts, &u1);
      const double v = std::stod(vs, &u2);
      if (u1 != ts.size() || u2 != vs.size()) throw std::invalid_argument(tok);
      knots.emplace_back(t, v);
    } catch (const std::exception&) {
      throw ScenarioError("bad time knot '" + tok + "'");
    }
  }
  if (knots.empty()) throw ScenarioError("empty time profile");
  return TimeProfile(std::move(knots));
}

NodalVectors sample_nodes(const Mesh& mesh, const VectorExpr& f, double t) {
  NodalVectors out(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) out[i] = f(mesh.nodes[i], t);
  return out;
}

NodalVectors sample_barycenters(const Mesh& mesh, const VectorExpr& f, double t) {
  NodalVectors out(mesh.num_triangles());
  for (int e = 0; e < mesh.num_triangles(); ++e) out[e] = f(mesh.barycenter(e), t);
  return out;
}

}  // namespace perzyna
