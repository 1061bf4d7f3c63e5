#include "perzyna/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "perzyna/errors.hpp"

namespace perzyna::csv {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_monitors(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open(path);
  out << "step,t,newton_iters,residual,energy_elastic,dissipation_cum,viscous_cum,external_work_cum,"
         "balance_residual,max_yield_gap,h1_seminorm_interior\n";
  for (const auto& s : traj.steps) {
    const auto& m = s.mon;
    out << s.step << ',' << number(s.t) << ',' << m.newton_iters << ',' << number(m.residual) << ','
        << number(m.energy_elastic) << ',' << number(m.dissipation_cum) << ',' << number(m.viscous_cum) << ','
        << number(m.external_work_cum) << ',' << number(m.balance_residual) << ',' << number(m.max_yield_gap) << ','
        << number(m.h1_seminorm_interior) << '\n';
  }
}

void write_fields(const std::filesystem::path& path, const Mesh& mesh, const StepState& state) {
  auto out = open(path);
  out << "elem,x_bary,y_bary,sxx,syy,sxy,pxx,pyy,pxy,exx,eyy,exy\n";
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const Vec2 x = mesh.barycenter(k);
    const auto& pt = state.points[k];
    out << k << ',' << number(x.x()) << ',' << number(x.y());
    for (const SymTensor2* t : {&pt.sigma, &pt.p, &pt.e})
      out << ',' << number(t->xx) << ',' << number(t->yy) << ',' << number(t->xy);
    out << '\n';
  }
}

void write_estimates(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open(path);
  const auto& e = traj.estimates;
  out << "quantity,value\n";
  out << "eps," << number(traj.eps) << '\n';
  out << "sup_e_l2," << number(e.sup_e_l2) << '\n';
  out << "dp_l1_l1," << number(e.dp_l1_l1) << '\n';
  out << "sqrt_eps_dp_l2_l2," << number(e.sqrt_eps_dp_l2_l2) << '\n';
  out << "sigma_dot_l2_l2," << number(e.sigma_dot_l2_l2) << '\n';
}

void write_diagnostics(const std::filesystem::path& path, const DiagnosticsReport& report) {
  auto out = open(path);
  out << "check,step,value,tolerance,pass\n";
  for (const auto& e : report.entries) {
    out << e.check << ',' << e.step << ',' << number(e.value) << ',' << number(e.tolerance) << ','
        << (e.pass ? 1 : 0) << '\n';
  }
}

void write_run(const std::filesystem::path& dir, const Mesh& mesh, const Trajectory& traj, bool dump_fields) {
  std::filesystem::create_directories(dir);
  write_monitors(dir / "monitors.csv", traj);
  write_estimates(dir / "estimates.csv", traj);
  if (!dump_fields) return;
  for (const auto& s : traj.steps) write_fields(dir / ("fields_" + std::to_string(s.step) + ".csv"), mesh, s);
}

void write_sweep(const std::filesystem::path& dir, const SweepReport& report) {
  std::filesystem::create_directories(dir);
  {
    auto out = open(dir / "sweep_report.csv");
    out << "eps,max_gap_pos,stress_distance_prev,h1_max,sup_e_l2,dp_l1_l1,sqrt_eps_dp_l2_l2,sigma_dot_l2_l2\n";
    for (const auto& e : report.entries) {
      double h1 = 0.0;
      for (double v : e.h1_per_step)
        if (!std::isnan(v)) h1 = std::max(h1, v);
      out << number(e.eps) << ',' << number(e.max_gap_pos) << ','
          << (e.stress_distance_prev ? number(*e.stress_distance_prev) : std::string("nan")) << ',' << number(h1)
          << ',' << number(e.estimates.sup_e_l2) << ',' << number(e.estimates.dp_l1_l1) << ','
          << number(e.estimates.sqrt_eps_dp_l2_l2) << ',' << number(e.estimates.sigma_dot_l2_l2) << '\n';
    }
  }
  auto out = open(dir / "sweep_h1.csv");
  out << "step,t";
  for (const auto& e : report.entries) out << ",h1_eps_" << number(e.eps);
  out << ",factor\n";
  const auto factor = report.h1_factor_per_step();
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    out << k << ',' << number(report.times[k]);
    for (const auto& e : report.entries) out << ',' << number(e.h1_per_step[k]);
    out << ',' << number(factor[k]) << '\n';
  }
}

}  // namespace perzyna::csv
