#include "perzyna/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perzyna/driver.hpp"
#include "perzyna/energy.hpp"
#include "perzyna/errors.hpp"

namespace perzyna {

namespace {

SymTensor2 sym_product(const Vec2& a, const Vec2& b) {
  return {a.x() * b.x(), a.y() * b.y(), 0.5 * (a.x() * b.y() + a.y() * b.x())};
}

Vec2 barycentric_mean(const Mesh& mesh, int tri, std::span<const Vec2> v) {
  const auto& t = mesh.triangles[tri];
  return (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
}

SymTensor2 barycentric_mean(const Mesh& mesh, int tri, std::span<const SymTensor2> v) {
  const auto& t = mesh.triangles[tri];
  return (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
}

void add_knots(std::vector<double>& times, const FieldExpr& f, double T) {
  for (const auto& [t, v] : f.time.knots())
    if (t >= 0.0 && t <= T) times.push_back(t);
}

}  // namespace

bool DiagnosticsReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const DiagnosticEntry& e) { return e.pass; });
}

std::vector<std::string> DiagnosticsReport::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.pass && std::find(out.begin(), out.end(), e.check) == out.end()) out.push_back(e.check);
  return out;
}

EnergyBalance energy_balance_report(const Mesh& mesh, const MaterialParams& params, const Trajectory& traj,
                                    bool include_viscous) {
  EnergyBalance out;
  if (traj.steps.empty()) return out;
  const double q0 = elastic_energy(mesh, traj.steps.front().points);
  double d = 0.0, v = 0.0, w = 0.0;
  for (std::size_t n = 0; n < traj.steps.size(); ++n) {
    if (n > 0) {
      const auto inc = energy_increment(mesh, params, traj.eps, traj.steps[n - 1], traj.steps[n], include_viscous);
      if (inc.worst_element >= 0) {
        throw InfiniteDissipation("dp leaves dom H at step " + std::to_string(traj.steps[n].step) + ", element " +
                                  std::to_string(inc.worst_element));
      }
      d += inc.dissipation;
      v += inc.viscous;
      w += inc.work;
    }
    const double q = elastic_energy(mesh, traj.steps[n].points);
    const double abs_res = std::abs(q + d + v - q0 - w);
    const double scale = q0 + std::abs(w);
    out.elastic.push_back(q);
    out.dissipation.push_back(d);
    out.viscous.push_back(v);
    out.work.push_back(w);
    out.absolute.push_back(abs_res);
    out.relative.push_back(scale > 0.0 ? abs_res / scale : abs_res);
  }
  return out;
}

FlowRuleResidual flow_rule_residual(const StepState& state, const MaterialParams& params, double eps) {
  FlowRuleResidual r;
  const std::size_t n = state.points.size();
  r.hill.assign(n, 0.0);
  r.membership.assign(n, 0.0);
  r.dom_defect.assign(n, 0.0);
  double worst = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SymTensor2& dp = state.dp[i];
    const SymTensor2 tau = state.points[i].sigma - eps * dp;
    const double slack = dom_H_slack(dp);
    const ExtScalar h = support_H(dp, params, slack);
    if (h.is_finite()) {
      r.hill[i] = std::abs(h.value() - inner(tau, dp));
    } else {
      r.dom_defect[i] = norm(dp.deviator()) - dp.trace() / (2.0 * params.alpha) - slack;
    }
    r.membership[i] = std::max(0.0, yield_gap(tau, params));
    const double scaled = r.hill[i] / (1.0 + norm(dp));
    if (scaled > worst) {
      worst = scaled;
      r.worst_element = static_cast<int>(i);
    }
    r.hill_sup = std::max(r.hill_sup, r.hill[i]);
    r.hill_sup_scaled = std::max(r.hill_sup_scaled, scaled);
    r.membership_sup = std::max(r.membership_sup, r.membership[i]);
    r.dom_defect_sup = std::max(r.dom_defect_sup, r.dom_defect[i]);
  }
  return r;
}

double perzyna_identity_defect(const StepState& state, const MaterialParams& params, double eps) {
  double sup = 0.0;
  for (std::size_t i = 0; i < state.points.size(); ++i) {
    const SymTensor2& s = state.points[i].sigma;
    const SymTensor2 d = eps * state.dp[i] - (s - project_K(s, params).proj);
    sup = std::max(sup, norm(d) / (1.0 + norm(s)));
  }
  return sup;
}

double dirichlet_defect(const Mesh& mesh, const Trajectory& traj) {
  double sup = 0.0;
  for (const auto& s : traj.steps)
    for (int i : mesh.boundary_nodes) sup = std::max(sup, (s.u[i] - s.w[i]).lpNorm<Eigen::Infinity>());
  return sup;
}

double duality_pairing(const Mesh& mesh, std::span<const SymTensor2> sigma, std::span<const Vec2> u,
                       std::span<const SymTensor2> e, std::span<const Vec2> w, const FieldExpr& phi, double t) {
  const NodalTensors nodal = recover_nodal_stress(mesh, sigma);
  double total = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto grad = nodal_gradient(mesh, k, nodal);
    const Vec2 div{grad[0].xx + grad[1].xy, grad[0].xy + grad[1].yy};
    const Vec2 x = mesh.barycenter(k);
    const Vec2 v = barycentric_mean(mesh, k, w) - barycentric_mean(mesh, k, u);
    const double ph = phi.value(x, t);
    const SymTensor2 ew = element_strain(mesh, k, w);
    const double integrand = ph * v.dot(div) + inner(sigma[k], sym_product(v, phi.gradient(x, t))) +
                             ph * inner(sigma[k], ew - e[k]);
    total += mesh.areas[k] * integrand;
  }
  return total;
}

double duality_product(const Mesh& mesh, std::span<const SymTensor2> sigma, std::span<const Vec2> u,
                       std::span<const SymTensor2> e, std::span<const Vec2> w) {
  FieldExpr one;
  one.coef[0] = 1.0;
  return duality_pairing(mesh, sigma, u, e, w, one);
}

std::vector<DiagnosticEntry> safe_load_check(const TensorExpr& chi, const VectorExpr& f, double delta,
                                             const Mesh& mesh, const MaterialParams& params, double T,
                                             double div_tol) {
  std::vector<double> times{0.0, T};
  for (const FieldExpr* c : {&chi.xx, &chi.yy, &chi.xy, &f.x, &f.y}) add_knots(times, *c, T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const DofMap dofs = DofMap::all_boundary_fixed(mesh);
  std::vector<double> mass(mesh.num_nodes(), 0.0);
  for (int k = 0; k < mesh.num_triangles(); ++k)
    for (int a : mesh.triangles[k]) mass[a] += mesh.areas[k] / 3.0;

  DiagnosticEntry div{"safe_load_div", -1, 0.0, div_tol, true, -1};
  DiagnosticEntry margin{"safe_load_margin", -1, -std::numeric_limits<double>::infinity(), 0.0, true, -1};
  const std::vector<TensorMap> zero(mesh.num_triangles(), TensorMap::Zero());
  for (double t : times) {
    ElementTensors stress(mesh.num_triangles());
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      stress[k] = chi(mesh.barycenter(k), t);
      const double m = yield_gap(stress[k], params) + delta;
      if (m > margin.value) {
        margin.value = m;
        margin.element = k;
      }
    }
    const NodalVectors fb = sample_barycenters(mesh, f, t);
    const AssembledSystem sys = assemble(mesh, dofs, stress, zero, fb);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (mesh.on_boundary[i]) continue;
      div.value = std::max(div.value, sys.residual[i].lpNorm<Eigen::Infinity>() / mass[i]);
    }
  }
  div.pass = div.value <= div.tolerance;
  margin.pass = margin.value <= 0.0;
  return {div, margin};
}

SymTensor2 disc_average(const Mesh& mesh, std::span<const SymTensor2> nodal, const Vec2& x, double r, int self) {
  SymTensor2 sum;
  double area = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    if ((mesh.barycenter(k) - x).norm() > r) continue;
    sum += mesh.areas[k] * barycentric_mean(mesh, k, nodal);
    area += mesh.areas[k];
  }
  if (area == 0.0) return barycentric_mean(mesh, self, nodal);
  return sum / area;
}

ProbeReport strong_flow_rule_probe(const Mesh& mesh, const MaterialParams& params, const Trajectory& traj,
                                   std::span<const double> radii, double threshold) {
  ProbeReport rep;
  rep.radii.assign(radii.begin(), radii.end());
  int improving = 0;
  for (const auto& s : traj.steps) {
    double dp_max = 0.0;
    for (const auto& d : s.dp) dp_max = std::max(dp_max, norm(d));
    if (dp_max == 0.0) continue;
    ElementTensors tau = s.stresses();
    for (std::size_t k = 0; k < tau.size(); ++k) tau[k] -= traj.eps * s.dp[k];
    const NodalTensors nodal = recover_nodal_stress(mesh, tau);
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      const double m = norm(s.dp[k]);
      if (m < threshold * dp_max) continue;
      const SymTensor2 np = s.dp[k] / m;
      const double h = params.kappa * np.trace() / (2.0 * params.alpha);
      ProbeRow row{s.step, k, {}};
      for (double r : radii) {
        const SymTensor2 avg = disc_average(mesh, nodal, mesh.barycenter(k), r, k);
        row.residual.push_back(std::abs(h - inner(avg, np)));
      }
      if (!row.residual.empty() && row.residual.back() <= row.residual.front() + 1e-12 * (1.0 + h)) ++improving;
      rep.rows.push_back(std::move(row));
    }
  }
  if (rep.rows.empty()) throw EmptyProbeSet("no element reaches the probe threshold at any step");
  rep.fraction_improving = static_cast<double>(improving) / static_cast<double>(rep.rows.size());
  return rep;
}

DiagnosticsReport run_diagnostics(const Problem& problem, const Trajectory& traj) {
  DiagnosticsReport rep;
  const Scenario& sc = problem.scenario();
  const Mesh& mesh = problem.mesh();
  const MaterialParams& params = problem.params();
  const double eps = traj.eps;

  if (sc.diag.energy) {
    try {
      const EnergyBalance eb = energy_balance_report(mesh, params, traj);
      for (std::size_t n = 1; n < traj.steps.size(); ++n) {
        const double v = eb.relative[n];
        rep.entries.push_back({"energy_balance", traj.steps[n].step, v, sc.diag.energy_tol, v <= sc.diag.energy_tol, -1});
      }
    } catch (const InfiniteDissipation&) {
      rep.entries.push_back({"energy_balance", -1, std::numeric_limits<double>::infinity(), sc.diag.energy_tol, false,
                             -1});
    }
  }

  if (sc.diag.flow_rule) {
    for (std::size_t n = 1; n < traj.steps.size(); ++n) {
      const StepState& s = traj.steps[n];
      const FlowRuleResidual fr = flow_rule_residual(s, params, eps);
      rep.entries.push_back({"flow_rule_hill", s.step, fr.hill_sup_scaled, 1e-8, fr.hill_sup_scaled <= 1e-8,
                             fr.worst_element});
      rep.entries.push_back({"flow_rule_membership", s.step, fr.membership_sup, 1e-8, fr.membership_sup <= 1e-8, -1});
      rep.entries.push_back({"flow_rule_dom_H", s.step, fr.dom_defect_sup, 0.0, fr.dom_defect_sup <= 0.0, -1});
      if (eps > 0.0) {
        const double d = perzyna_identity_defect(s, params, eps);
        rep.entries.push_back({"perzyna_identity", s.step, d, 1e-9, d <= 1e-9, -1});
      }
    }
  }

  const double dd = dirichlet_defect(mesh, traj);
  rep.entries.push_back({"dirichlet", -1, dd, 0.0, dd <= 0.0, -1});

  if (sc.diag.safe_load && sc.chi) {
    for (auto& e : safe_load_check(*sc.chi, sc.f, sc.delta, mesh, params, sc.T, sc.div_tol))
      rep.entries.push_back(std::move(e));
  }

  if (sc.diag.duality_phi) {
    const StepState& s = traj.final();
    ElementTensors e(s.points.size()), p(s.points.size());
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      e[k] = s.points[k].e;
      p[k] = s.points[k].p;
    }
    const ElementTensors sigma = s.stresses();
    const double pairing = duality_pairing(mesh, sigma, s.u, e, s.w, *sc.diag.duality_phi, s.t);
    double direct = 0.0;
    for (int k = 0; k < mesh.num_triangles(); ++k)
      direct += mesh.areas[k] * sc.diag.duality_phi->value(mesh.barycenter(k), s.t) * inner(sigma[k], p[k]);
    rep.entries.push_back({"duality_gap", s.step, std::abs(pairing - direct),
                           std::numeric_limits<double>::infinity(), true, -1});
  }

  if (sc.diag.probe) {
    try {
      const ProbeReport pr = strong_flow_rule_probe(mesh, params, traj, sc.diag.probe_radii, sc.diag.probe_threshold);
      rep.entries.push_back({"strong_flow_rule_probe", -1, pr.fraction_improving, 0.8, pr.fraction_improving >= 0.8,
                             -1});
    } catch (const EmptyProbeSet&) {
      rep.entries.push_back({"strong_flow_rule_probe", -1, std::numeric_limits<double>::quiet_NaN(), 0.8, true, -1});
    }
  }
  return rep;
}

}  // namespace perzyna
