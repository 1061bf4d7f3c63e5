#include "perzyna/energy.hpp"

namespace perzyna {

ElementTensors StepState::stresses() const {
  ElementTensors s(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) s[i] = points[i].sigma;
  return s;
}

double dom_H_slack(const SymTensor2& q) { return 1e-8 * (1.0 + norm(q)); }

double elastic_energy(const Mesh& mesh, const std::vector<PointState>& points) {
  double q = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) q += 0.5 * mesh.areas[t] * inner(points[t].sigma, points[t].e);
  return q;
}

EnergyIncrement energy_increment(const Mesh& mesh, const MaterialParams& params, double eps, const StepState& prev,
                                 const StepState& next, bool include_viscous) {
  EnergyIncrement inc;
  const double dt = next.t - prev.t;

  NodalVectors dw(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) dw[i] = next.w[i] - prev.w[i];

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.areas[t];
    const SymTensor2& dp = next.dp[t];
    const ExtScalar h = support_H(dp, params, dom_H_slack(dp));
    if (h.is_infinite()) {
      inc.dissipation = h.value();
      if (inc.worst_element < 0) inc.worst_element = t;
    } else if (inc.worst_element < 0) {
      inc.dissipation += dt * area * h.value();
    }
    if (include_viscous) inc.viscous += eps * dt * area * norm2(dp);
    const SymTensor2 sigma_mid = 0.5 * (prev.points[t].sigma + next.points[t].sigma);
    inc.work += area * inner(sigma_mid, element_strain(mesh, t, dw));
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 v = (next.u[i] - prev.u[i]) - dw[i];
    inc.work += 0.5 * (prev.load[i] + next.load[i]).dot(v);
  }
  return inc;
}

}  // namespace perzyna
