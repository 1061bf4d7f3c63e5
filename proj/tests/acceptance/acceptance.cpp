// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "perzyna/diagnostics.hpp"
#include "perzyna/driver.hpp"
#include "perzyna/material_point.hpp"
#include "perzyna/scenario.hpp"
#include "perzyna/selftest.hpp"

using namespace perzyna;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario benchmark() { return load_scenario(fs::path(PERZYNA_SCENARIO_DIR) / "benchmark_shear.cfg"); }

// 1 -------------------------------------------------------------------------------
Outcome kernel_battery(double& limit) {
  limit = 30.0;
  const auto results = selftest::kernel_properties({42, 10000});
  Outcome o{true, ""};
  for (const auto& r : results) {
    if (!r.pass()) {
      o.pass = false;
      o.detail += r.name + " worst " + fmt("%.3g", r.worst) + "; ";
    }
  }
  if (o.pass) o.detail = fmt("%zu properties", results.size());
  return o;
}

// 2 -------------------------------------------------------------------------------
Outcome projection_oracle(double& limit) {
  limit = 60.0;
  std::mt19937_64 rng(42);
  double worst = 0.0;
  int n = 0;
  double alpha_closest = 1.0;
  for (const auto& p : selftest::parameter_sets()) {
    alpha_closest = std::min(alpha_closest, std::abs(p.alpha - 1.0 / std::sqrt(2.0)));
    const double scale = p.kappa / p.alpha;
    for (int i = 0; i < 1000; ++i, ++n) {
      const SymTensor2 s = selftest::random_tensor(rng, 1e-2 * scale, 10.0 * scale);
      const SymTensor2 a = project_K(s, p).proj;
      const SymTensor2 b = oracle::project_dual_ascent(s, p);
      worst = std::max(worst, norm(a - b) / std::max(1.0, norm(s)));
    }
  }
  return {worst <= 1e-8 && alpha_closest < 1e-6,
          fmt("%d stresses, worst %.3g, closest |alpha - 1/sqrt2| %.1g", n, worst, alpha_closest)};
}

// 3 -------------------------------------------------------------------------------
Outcome material_point_battery(double&) {
  std::mt19937_64 rng(42);
  const auto sets = selftest::parameter_sets();
  double form = 0.0, hill = 0.0, tangent = 0.0;
  int updates = 0, tangent_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const MaterialParams& p = sets[i % sets.size()];
    const double es = p.kappa / (2.0 * p.alpha * p.K0);
    const double eps = std::exp(std::uniform_real_distribution<double>(std::log(1e-3), 0.0)(rng));
    const double dt = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    SymTensor2 E, p_old;
    for (int k = 0; k < 5; ++k) {
      E += selftest::random_tensor(rng, 0.1 * es, 3.0 * es);
      const PointUpdate up = viscoplastic_update(E, p_old, dt, eps, p);
      const PointState& s = up.state;
      ++updates;
      const SymTensor2 lhs = s.sigma - eps * up.dp;
      const SymTensor2 xi = up.dp + s.e - eps * apply_compliance(up.dp, p);
      form = std::max(form, norm(lhs - g_eval(xi, p).grad) / (1.0 + norm(s.sigma)));
      const ExtScalar h = support_H(up.dp, p, 1e-8 * (1.0 + norm(up.dp)));
      hill = std::max(hill, h.is_finite() ? std::abs(h.value() - inner(lhs, up.dp)) / (1.0 + norm(up.dp)) : INFINITY);

      if (k == 2) {
        const TensorMap t = consistent_tangent(s, dt, eps, p);
        const double step = 1e-6 * (es + norm(E));
        TensorMap fd;
        bool same = true;
        for (int c = 0; c < 3; ++c) {
          SymTensor2 d;
          (c == 0 ? d.xx : c == 1 ? d.yy : d.xy) = 1.0;
          for (double f : {-1e3, 1e3}) same = same && viscoplastic_update(E + f * step * d, p_old, dt, eps, p).kind == up.kind;
          const SymTensor2 sp = viscoplastic_update(E + step * d, p_old, dt, eps, p).state.sigma;
          const SymTensor2 sm = viscoplastic_update(E - step * d, p_old, dt, eps, p).state.sigma;
          fd.col(c) = ((sp - sm) / (2.0 * step)).vec();
        }
        if (same) {
          ++tangent_checked;
          tangent = std::max(tangent, (fd - t).cwiseAbs().maxCoeff() / t.cwiseAbs().maxCoeff());
        }
      }
      p_old = s.p;
    }
  }
  return {form <= 1e-8 && hill <= 1e-8 && tangent <= 1e-4 && tangent_checked > 500,
          fmt("%d updates: form %.3g, Hill %.3g, tangent %.3g over %d paths", updates, form, hill, tangent,
              tangent_checked)};
}

// 4 -------------------------------------------------------------------------------
Outcome elastic_limit(double& limit) {
  limit = 10.0;
  Scenario sc = benchmark();
  sc.params = MaterialParams::make(sc.params.lambda, sc.params.mu, sc.params.alpha, 1e6);
  sc.n_steps = 10;
  sc.mesh = RectSpec{16, 16, 1.0, 1.0};
  const Problem pb(sc);
  const Trajectory tr = pb.run();
  double err_u = 0.0, err_s = 0.0;
  int yielded = 0;
  for (const auto& s : tr.steps) {
    const NodalVectors ref = oracle::solve_linear_elasticity(pb.mesh(), pb.params(), sample_nodes(pb.mesh(), sc.w, s.t),
                                                             sample_barycenters(pb.mesh(), sc.f, s.t));
    for (std::size_t i = 0; i < ref.size(); ++i) err_u = std::max(err_u, (ref[i] - s.u[i]).norm());
    const ElementTensors strain = element_strains(pb.mesh(), ref);
    for (int k = 0; k < pb.mesh().num_triangles(); ++k) {
      err_s = std::max(err_s, norm(apply_elastic(strain[k], pb.params()) - s.points[k].sigma));
      if (norm(s.dp[k]) != 0.0) ++yielded;
    }
  }
  return {err_u <= 1e-9 && err_s <= 1e-9 && yielded == 0,
          fmt("%zu states, max |u - u_ref| %.3g, max |sigma - sigma_ref| %.3g", tr.steps.size(), err_u, err_s)};
}

// 5 -------------------------------------------------------------------------------
Outcome energy_convergence(double& limit) {
  limit = 120.0;
  std::vector<double> res;
  for (int n : {10, 20, 40}) {
    Scenario sc = benchmark();
    sc.n_steps = n;
    const Problem pb(sc);
    const Trajectory tr = pb.run();
    res.push_back(energy_balance_report(pb.mesh(), pb.params(), tr).relative.back());
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  auto in = [](double r) { return r >= 1.5 && r <= 3.0; };
  return {in(r1) && in(r2), fmt("relative residual %.3g, %.3g, %.3g; ratios %.3f, %.3f", res[0], res[1], res[2], r1, r2)};
}

// 6, 7 ---------------------------------------------------------------------------
const SweepReport& benchmark_sweep(double& seconds) {
  static SweepReport rep;
  static double elapsed = -1.0;
  if (elapsed < 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario sc = benchmark();
    sc.margin = 0.15;
    rep = sweep_epsilon(sc, std::vector<double>{1e-1, 1e-2, 1e-3});
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  seconds = elapsed;
  return rep;
}

Outcome perzyna_limit(double& limit) {
  limit = 180.0;
  double sweep_time = 0.0;
  const SweepReport& rep = benchmark_sweep(sweep_time);
  const auto& e = rep.entries;
  const bool gap = e[0].max_gap_pos > e[1].max_gap_pos && e[1].max_gap_pos > e[2].max_gap_pos;
  const bool dist = *e[2].stress_distance_prev < *e[1].stress_distance_prev;
  return {gap && dist && sweep_time <= limit,
          fmt("gap+ %.3g > %.3g > %.3g; distance %.3g -> %.3g; sweep %.1f s", e[0].max_gap_pos, e[1].max_gap_pos,
              e[2].max_gap_pos, *e[1].stress_distance_prev, *e[2].stress_distance_prev, sweep_time)};
}

Outcome regularity_probe(double&) {
  double sweep_time = 0.0;
  const SweepReport& rep = benchmark_sweep(sweep_time);
  const auto factors = rep.h1_factor_per_step();
  double worst = 0.0;
  int worst_step = 0;
  for (std::size_t k = 0; k < factors.size(); ++k)
    if (factors[k] > worst) worst = factors[k], worst_step = static_cast<int>(k);
  return {worst <= 2.0, fmt("max H1 factor %.4f at step %d (margin 0.15)", worst, worst_step)};
}

// 8 -------------------------------------------------------------------------------
Outcome fault_injection(double&) {
  const Scenario sc = benchmark();
  const Problem pb(sc);
  const Trajectory tr = pb.run();
  StepState s = tr.final();
  double dp_max = 0.0;
  for (std::size_t k = 0; k < s.dp.size(); ++k) {
    const double m = norm(s.dp[k]);
    if (m == 0.0) continue;
    s.points[k].sigma += 1e-3 * s.dp[k] / m;
    dp_max = std::max(dp_max, m);
  }
  const FlowRuleResidual fr = flow_rule_residual(s, pb.params(), sc.eps);
  double lo = INFINITY, hi = 0.0;
  for (std::size_t k = 0; k < s.dp.size(); ++k) {
    const double m = norm(s.dp[k]);
    if (m == 0.0) continue;
    const double ratio = fr.hill[k] / (1e-3 * m);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double sup_ratio = fr.hill_sup / (1e-3 * dp_max);
  return {dp_max > 0.0 && lo >= 1.0 / 3.0 && hi <= 3.0 && sup_ratio >= 1.0 / 3.0 && sup_ratio <= 3.0,
          fmt("sup residual / (1e-3 |dp|) = %.4f; per element in [%.4f, %.4f]", sup_ratio, lo, hi)};
}

// 9 -------------------------------------------------------------------------------
Outcome duality_convergence(double&) {
  // Smooth fields on the unit square with u = w on the boundary.
  auto bubble = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  auto w_of = [](double x, double y) -> Vec2 { return Vec2(0.3 * x * x + 0.1 * y, 0.2 * x * y - 0.1 * x); };
  auto u_of = [&](double x, double y) -> Vec2 { return w_of(x, y) - bubble(x, y) * Vec2(1.0, 2.0); };
  auto p_of = [](double x, double y) { return SymTensor2{x * y, x * x - 0.5, 0.5 * y + 0.1}; };
  auto s_of = [](double x, double y) { return SymTensor2{1.0 + x * y, x - y * y, 0.3 * x * x}; };
  FieldExpr phi;
  phi.coef = {1.0, 1.0, 2.0};
  auto phi_of = [&](double x, double y) { return phi.value({x, y}, 0.0); };

  const double exact = oracle::integrate_rect(
      [&](double x, double y) { return phi_of(x, y) * inner(s_of(x, y), p_of(x, y)); }, 1.0, 1.0);

  std::vector<double> errors;
  for (int n : {8, 16}) {
    const Mesh m = build_rect_mesh({n, n, 1.0, 1.0});
    NodalVectors u(m.num_nodes()), w(m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i) {
      u[i] = u_of(m.nodes[i].x(), m.nodes[i].y());
      w[i] = w_of(m.nodes[i].x(), m.nodes[i].y());
    }
    const ElementTensors eu = element_strains(m, u);
    ElementTensors sigma, e;
    for (int k = 0; k < m.num_triangles(); ++k) {
      const Vec2 b = m.barycenter(k);
      sigma.push_back(s_of(b.x(), b.y()));
      e.push_back(eu[k] - p_of(b.x(), b.y()));
    }
    errors.push_back(std::abs(duality_pairing(m, sigma, u, e, w, phi) - exact));
  }
  const double ratio = errors[0] / errors[1];
  return {ratio >= 1.7, fmt("reference %.6f; error %.3g (8x8), %.3g (16x16); ratio %.3f", exact, errors[0], errors[1],
                            ratio)};
}

// 10 ------------------------------------------------------------------------------
Outcome determinism(double&) {
  const fs::path base = fs::temp_directory_path() / "perzyna_acceptance_determinism";
  fs::remove_all(base);
  const std::string cfg = (fs::path(PERZYNA_SCENARIO_DIR) / "benchmark_shear.cfg").string();
  std::vector<std::string> contents;
  for (const char* run : {"a", "b"}) {
    const fs::path out = base / run;
    const std::string cmd = std::string("\"") + PERZYNA_CLI + "\" run --config \"" + cfg + "\" --out \"" +
                            out.string() + "\" > \"" + (base / run).string() + ".log\" 2>&1";
    fs::create_directories(base);
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, fmt("run %s exited with status %d", run, rc)};
    std::ifstream in(out / "monitors.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    contents.push_back(ss.str());
  }
  const bool same = !contents[0].empty() && contents[0] == contents[1];
  fs::remove_all(base);
  return {same, fmt("monitors.csv %zu bytes, %s", contents[0].size(), same ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome(double&)> check;
  };
  const std::vector<Criterion> criteria = {
      {"kernel self-test battery (seed 42, 10^4 samples)", kernel_battery},
      {"projection vs dual-ascent oracle", projection_oracle},
      {"material point identities and tangent", material_point_battery},
      {"elastic limit vs linear elasticity", elastic_limit},
      {"energy balance first-order convergence", energy_convergence},
      {"eps sweep: yield gap and Cauchy trend", perzyna_limit},
      {"interior H1 seminorm across eps", regularity_probe},
      {"flow-rule fault injection", fault_injection},
      {"duality pairing mesh convergence", duality_convergence},
      {"determinism of monitors.csv", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    double limit = INFINITY;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].check(limit);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", limit);
    }
    std::printf("%s  %2zu  %-48s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
