#include "perzyna/driver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perzyna/errors.hpp"

namespace perzyna {

namespace {

constexpr int kMaxHalvings = 8;

}  // namespace

Problem::Problem(Scenario scenario, Execution exec)
    : sc_(std::move(scenario)), mesh_(sc_.build_mesh()), dofs_(DofMap::all_boundary_fixed(mesh_)), exec_(exec) {
  sc_.validate();
}

double Problem::flow_eps() const { return sc_.solver == SolverKind::perzyna ? sc_.eps : 0.0; }

double Problem::load_scale(double t) const {
  double scale = 1.0;
  const NodalVectors f = sample_barycenters(mesh_, sc_.f, t);
  const NodalVectors w = sample_nodes(mesh_, sc_.w, t);
  for (int e = 0; e < mesh_.num_triangles(); ++e) {
    scale = std::max(scale, f[e].norm());
    scale = std::max(scale, norm(apply_elastic(element_strain(mesh_, e, w), sc_.params)));
  }
  return scale;
}

void Problem::evaluate(const NodalVectors& u, std::span<const SymTensor2> p_old, const NodalVectors& load, double dt,
                       kernels::Constitutive model, Equilibrium& out) const {
  const ElementTensors strain = element_strains(mesh_, u);
  kernels::PointBatch batch{strain, p_old, dt, sc_.eps, model, rate_independent_damping(sc_.params)};
  std::vector<ElementContribution> contrib(mesh_.num_triangles());
  ElementTensors stress(mesh_.num_triangles());
  if (exec_ == Execution::parallel) {
    kernels::omp::update_points(batch, sc_.params, out.points);
  } else {
    kernels::serial::update_points(batch, sc_.params, out.points);
  }
  for (int e = 0; e < mesh_.num_triangles(); ++e) stress[e] = out.points.updates[e].state.sigma;
  if (exec_ == Execution::parallel) {
    kernels::omp::element_contributions(mesh_, stress, out.points.tangents, contrib);
  } else {
    kernels::serial::element_contributions(mesh_, stress, out.points.tangents, contrib);
  }
  out.system = assemble(mesh_, dofs_, contrib, load);
}

Problem::Equilibrium Problem::solve_equilibrium(NodalVectors u, std::span<const SymTensor2> p_old, double t, double dt,
                                                kernels::Constitutive model, int step_index,
                                                const NodalVectors* predictor) const {
  const NodalVectors w = sample_nodes(mesh_, sc_.w, t);
  for (int i : mesh_.boundary_nodes) u[i] = w[i];
  const NodalVectors load = load_vector(mesh_, sample_barycenters(mesh_, sc_.f, t));
  const double tol = 1e-8 * (1.0 + load_scale(t));

  Equilibrium eq;
  eq.u = std::move(u);
  evaluate(eq.u, p_old, load, dt, model, eq);
  std::vector<double> trace{eq.system.residual_sup};

  while (eq.system.residual_sup > tol) {
    if (eq.iters >= sc_.max_newton) {
      std::ostringstream msg;
      msg << "step " << step_index << " (t = " << t << "): Newton did not converge in " << eq.iters
          << " iterations; residual trace:";
      for (double r : trace) msg << ' ' << r;
      msg << ". Try a smaller time step or a larger eps.";
      throw StepNonConvergence(msg.str(), eq.system.residual_sup, step_index);
    }
    Eigen::VectorXd du;
    if (predictor && eq.iters == 0) {
      // Residual and tangent linearized about the previous converged state.
      Equilibrium lin;
      evaluate(*predictor, p_old, load, dt, model, lin);
      const ElementTensors e_now = element_strains(mesh_, eq.u);
      const ElementTensors e_prev = element_strains(mesh_, *predictor);
      ElementTensors stress(mesh_.num_triangles());
      for (int e = 0; e < mesh_.num_triangles(); ++e)
        stress[e] = lin.points.updates[e].state.sigma + apply(lin.points.tangents[e], e_now[e] - e_prev[e]);
      std::vector<ElementContribution> contrib(mesh_.num_triangles());
      kernels::serial::element_contributions(mesh_, stress, lin.points.tangents, contrib);
      const AssembledSystem sys = assemble(mesh_, dofs_, contrib, load);
      du = solve_symmetric(sys.tangent, -sys.residual_free);
    } else {
      du = solve_symmetric(eq.system.tangent, -eq.system.residual_free);
    }
    const double r0 = eq.system.residual_free.norm();

    double lam = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, lam *= 0.5) {
      Equilibrium trial;
      trial.u = eq.u;
      for (int i = 0; i < mesh_.num_nodes(); ++i) {
        for (int c = 0; c < 2; ++c) {
          const int f = dofs_.free_index[2 * i + c];
          if (f >= 0) trial.u[i][c] += lam * du[f];
        }
      }
      try {
        evaluate(trial.u, p_old, load, dt, model, trial);
      } catch (const NonConvergence&) {
        if (h == kMaxHalvings) throw;
        continue;
      }
      if (trial.system.residual_free.norm() < r0 || h == kMaxHalvings) {
        trial.iters = eq.iters;
        eq = std::move(trial);
        break;
      }
    }
    ++eq.iters;
    trace.push_back(eq.system.residual_sup);
  }
  return eq;
}

StepState Problem::make_state(int step, double t, Equilibrium&& eq, const NodalVectors& w,
                              const NodalVectors& load) const {
  StepState s;
  s.step = step;
  s.t = t;
  s.u = std::move(eq.u);
  s.w = w;
  s.load = load;
  const int ne = mesh_.num_triangles();
  s.points.resize(ne);
  s.dp.resize(ne);
  for (int e = 0; e < ne; ++e) {
    s.points[e] = eq.points.updates[e].state;
    s.dp[e] = eq.points.updates[e].dp;
  }
  s.mon.newton_iters = eq.iters;
  s.mon.residual = eq.system.residual_sup;
  fill_monitors(s);
  return s;
}

void Problem::fill_monitors(StepState& s) const {
  s.mon.energy_elastic = elastic_energy(mesh_, s.points);
  double gap = -std::numeric_limits<double>::infinity();
  for (const auto& pt : s.points) gap = std::max(gap, yield_gap(pt.sigma, sc_.params));
  s.mon.max_yield_gap = gap;
  try {
    const NodalTensors nodal = recover_nodal_stress(mesh_, s.stresses());
    s.mon.h1_seminorm_interior = h1_seminorm_interior(mesh_, nodal, sc_.margin);
  } catch (const EmptyInterior&) {
    s.mon.h1_seminorm_interior = std::numeric_limits<double>::quiet_NaN();
  }
}

StepState Problem::init_state() const {
  const double t0 = 0.0;
  const ElementTensors p0(mesh_.num_triangles(), sc_.p0);
  Equilibrium eq = solve_equilibrium(NodalVectors(mesh_.num_nodes(), Vec2::Zero()), p0, t0, 1.0,
                                     kernels::Constitutive::frozen_plastic, 0);
  int worst = -1;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh_.num_triangles(); ++e) {
    const double g = yield_gap(eq.points.updates[e].state.sigma, sc_.params);
    if (g > worst_gap) {
      worst_gap = g;
      worst = e;
    }
  }
  if (worst_gap > kInitialGapTol) {
    throw InadmissibleInitialState("initial stress outside K: element " + std::to_string(worst) + " has yield gap " +
                                       std::to_string(worst_gap),
                                   worst, worst_gap);
  }
  const NodalVectors w = sample_nodes(mesh_, sc_.w, t0);
  const NodalVectors load = load_vector(mesh_, sample_barycenters(mesh_, sc_.f, t0));
  StepState s = make_state(0, t0, std::move(eq), w, load);
  std::fill(s.dp.begin(), s.dp.end(), SymTensor2::zero());
  return s;
}

StepState Problem::step(const StepState& prev, double t_next) const {
  const double dt = t_next - prev.t;
  if (!(dt > 0.0)) throw std::invalid_argument("step: t_next must exceed the current time");
  ElementTensors p_old(mesh_.num_triangles());
  for (int e = 0; e < mesh_.num_triangles(); ++e) p_old[e] = prev.points[e].p;
  const auto model =
      sc_.solver == SolverKind::perzyna ? kernels::Constitutive::perzyna : kernels::Constitutive::rate_independent;

  Equilibrium eq = solve_equilibrium(prev.u, p_old, t_next, dt, model, prev.step + 1, &prev.u);
  const NodalVectors w = sample_nodes(mesh_, sc_.w, t_next);
  const NodalVectors load = load_vector(mesh_, sample_barycenters(mesh_, sc_.f, t_next));
  StepState s = make_state(prev.step + 1, t_next, std::move(eq), w, load);

  const EnergyIncrement inc = energy_increment(mesh_, sc_.params, flow_eps(), prev, s);
  s.mon.dissipation_cum = prev.mon.dissipation_cum + inc.dissipation;
  s.mon.viscous_cum = prev.mon.viscous_cum + inc.viscous;
  s.mon.external_work_cum = prev.mon.external_work_cum + inc.work;
  s.mon.balance_signed = prev.mon.balance_signed + (s.mon.energy_elastic - prev.mon.energy_elastic) +
                         inc.dissipation + inc.viscous - inc.work;
  s.mon.balance_residual = std::abs(s.mon.balance_signed);
  return s;
}

Trajectory Problem::run() const {
  Trajectory traj;
  traj.eps = flow_eps();
  traj.steps.reserve(sc_.n_steps + 1);
  traj.steps.push_back(init_state());

  auto& est = traj.estimates;
  est.sup_e_l2 = 0.0;
  double dp_l2_sq = 0.0, sig_dot_sq = 0.0;
  auto e_norm = [&](const StepState& s) {
    double sum = 0.0;
    for (int e = 0; e < mesh_.num_triangles(); ++e) sum += mesh_.areas[e] * norm2(s.points[e].e);
    return std::sqrt(sum);
  };
  est.sup_e_l2 = e_norm(traj.steps.back());

  for (int n = 1; n <= sc_.n_steps; ++n) {
    StepState next = step(traj.steps.back(), sc_.time(n));
    const StepState& prev = traj.steps.back();
    const double dt = next.t - prev.t;
    est.sup_e_l2 = std::max(est.sup_e_l2, e_norm(next));
    for (int e = 0; e < mesh_.num_triangles(); ++e) {
      const double a = mesh_.areas[e];
      est.dp_l1_l1 += dt * a * norm(next.dp[e]);
      dp_l2_sq += dt * a * norm2(next.dp[e]);
      sig_dot_sq += dt * a * norm2((next.points[e].sigma - prev.points[e].sigma) / dt);
    }
    traj.steps.push_back(std::move(next));
  }
  est.sqrt_eps_dp_l2_l2 = std::sqrt(traj.eps * dp_l2_sq);
  est.sigma_dot_l2_l2 = std::sqrt(sig_dot_sq);
  return traj;
}

// Sweep -----------------------------------------------------------------------------

std::vector<double> SweepReport::h1_factor_per_step() const {
  std::vector<double> out;
  if (entries.empty()) return out;
  const std::size_t n = entries.front().h1_per_step.size();
  for (std::size_t k = 0; k < n; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& e : entries) {
      lo = std::min(lo, e.h1_per_step[k]);
      hi = std::max(hi, e.h1_per_step[k]);
    }
    if (hi == 0.0) out.push_back(1.0);
    else out.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
  }
  return out;
}

double SweepReport::h1_max_factor() const {
  const auto f = h1_factor_per_step();
  return f.empty() ? 1.0 : *std::max_element(f.begin(), f.end());
}

SweepReport sweep_epsilon(const Scenario& scenario, std::span<const double> eps_list, Execution exec) {
  if (eps_list.empty()) throw std::invalid_argument("sweep: eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("sweep: eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("sweep: eps list must be decreasing");
  }
  SweepReport report;
  for (double eps : eps_list) {
    Scenario sc = scenario;
    sc.eps = eps;
    const Problem prob(sc, exec);
    Trajectory traj;
    try {
      traj = prob.run();
    } catch (const StepNonConvergence& e) {
      throw StepNonConvergence("eps = " + std::to_string(eps) + ": " + e.what(), e.last_residual(), e.step());
    } catch (const Error& e) {
      throw Error("eps = " + std::to_string(eps) + ": " + e.what());
    }

    SweepEntry entry;
    entry.eps = eps;
    for (const auto& s : traj.steps) {
      entry.max_gap_pos = std::max(entry.max_gap_pos, s.mon.max_yield_gap);
      entry.h1_per_step.push_back(s.mon.h1_seminorm_interior);
    }
    entry.estimates = traj.estimates;
    entry.final_stress = traj.final().stresses();
    if (!report.entries.empty()) {
      const auto& prev = report.entries.back().final_stress;
      ElementTensors diff(prev.size());
      for (std::size_t e = 0; e < prev.size(); ++e) diff[e] = entry.final_stress[e] - prev[e];
      entry.stress_distance_prev = l2_norm(prob.mesh(), diff);
    }
    if (report.times.empty())
      for (const auto& s : traj.steps) report.times.push_back(s.t);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace perzyna
