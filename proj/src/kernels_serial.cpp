#include "perzyna/kernels.hpp"

namespace perzyna::kernels {

void update_point(int i, const PointBatch& in, const MaterialParams& params, PointResults& out) {
  PointUpdate& u = out.updates[i];
  switch (in.model) {
    case Constitutive::perzyna:
      u = viscoplastic_update(in.strain[i], in.p_old[i], in.dt, in.eps, params);
      out.tangents[i] = consistent_tangent(u.state, in.dt, in.eps, params);
      break;
    case Constitutive::rate_independent:
      u = PointUpdate{};
      u.state = rate_independent_update(in.strain[i], in.p_old[i], params);
      u.dp = (u.state.p - in.p_old[i]) / in.dt;
      u.kind = project_K(u.state.sigma, params).kind;
      out.tangents[i] = rate_independent_tangent(in.strain[i], in.p_old[i], params, in.damping);
      break;
    case Constitutive::frozen_plastic: {
      u = PointUpdate{};
      const SymTensor2 e = in.strain[i] - in.p_old[i];
      u.state = {e, in.p_old[i], apply_elastic(e, params)};
      out.tangents[i] = elastic_map(params);
      break;
    }
  }
}

namespace serial {

void update_points(const PointBatch& in, const MaterialParams& params, PointResults& out) {
  const int n = static_cast<int>(in.strain.size());
  out.updates.resize(n);
  out.tangents.resize(n);
  for (int i = 0; i < n; ++i) update_point(i, in, params, out);
}

void element_contributions(const Mesh& mesh, std::span<const SymTensor2> stress, std::span<const TensorMap> tangents,
                           std::span<ElementContribution> out) {
  for (int t = 0; t < mesh.num_triangles(); ++t) out[t] = element_contribution(mesh, t, stress[t], tangents[t]);
}

}  // namespace serial
}  // namespace perzyna::kernels
