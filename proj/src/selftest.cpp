#include "perzyna/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "perzyna/material_point.hpp"

namespace perzyna::selftest {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Strain at which the elastic branch of g ends along the pure-trace direction.
double strain_scale(const MaterialParams& p) { return p.kappa / (2.0 * p.alpha * p.K0); }
double stress_scale(const MaterialParams& p) { return p.kappa / p.alpha; }

class Tracker {
 public:
  Tracker(std::string name, double tol) { r_.name = std::move(name), r_.tol = tol; }
  void add(double err) {
    ++r_.samples;
    if (!(err <= r_.worst)) r_.worst = std::isnan(err) ? INFINITY : err;
  }
  void skip() { ++r_.skipped; }
  PropertyResult result() const { return r_; }

 private:
  PropertyResult r_;
};

SymTensor2 random_dev_unit(std::mt19937_64& rng) {
  const double th = uniform(rng, 0.0, 2.0 * M_PI);
  // |{c, -c, s}| = sqrt(2 c^2 + 2 s^2) = 1
  return {std::cos(th) / std::sqrt(2.0), -std::cos(th) / std::sqrt(2.0), std::sin(th) / std::sqrt(2.0)};
}

/// Random element of dom H: tr q >= 2 alpha |q_D|.
SymTensor2 random_dom_H(std::mt19937_64& rng, const MaterialParams& p) {
  const double d = uniform(rng, 0.0, 1.0);
  const double t = 2.0 * p.alpha * d * (1.0 + (uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 2.0)));
  return 0.5 * t * SymTensor2::identity() + d * random_dev_unit(rng);
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

std::string PropertyResult::summary() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s samples %6ld  skipped %5ld  worst %.3e  tol %.1e  %s", name.c_str(), samples,
                skipped, worst, tol, pass() ? "PASS" : "FAIL");
  return buf;
}

std::vector<MaterialParams> parameter_sets() {
  return {
      MaterialParams::make(2.0, 1.0, 0.3, 1.0),
      MaterialParams::make(1.0, 1.0, 1.0, 1.0),
      MaterialParams::make(0.5, 2.0, 0.7071067, 1.5),
      MaterialParams::make(-0.5, 1.0, 1.2, 2.0),
      MaterialParams::make(10.0, 0.5, 0.1, 0.3),
  };
}

SymTensor2 random_tensor(std::mt19937_64& rng, double lo, double hi) {
  const double s = log_uniform(rng, lo, hi);
  return {s * uniform(rng, -1.0, 1.0), s * uniform(rng, -1.0, 1.0), s * uniform(rng, -1.0, 1.0)};
}

SymTensor2 random_point_in_K(std::mt19937_64& rng, const MaterialParams& p) {
  // |dev| = d, tr = t with d + alpha t <= kappa; t is bounded below for sampling only.
  const double u = uniform(rng, 0.0, 1.0);
  const double d = 2.0 * p.kappa * u * u * u;
  const double t_max = (p.kappa - d) / p.alpha;
  const double t = uniform(rng, 0.0, 1.0) < 0.5 ? t_max : t_max - uniform(rng, 0.0, 4.0 * p.kappa / p.alpha);
  return 0.5 * t * SymTensor2::identity() + d * random_dev_unit(rng);
}

std::vector<PropertyResult> kernel_properties(const Options& opts) {
  std::mt19937_64 rng(opts.seed);
  const auto sets = parameter_sets();
  constexpr int kFeasible = 1000;

  Tracker in_K("projection_in_K", 1e-10);
  Tracker idem("projection_idempotent", 1e-13);
  Tracker nonexp("projection_nonexpansive", 1e-10);
  Tracker vi("projection_variational", 1e-10);
  Tracker sup_bound("support_upper_bound", 1e-10);
  Tracker sup_attained("support_attained", 1e-3);
  Tracker conj_fd("conjugate_gradient_fd", 1e-6);
  Tracker convex("g_convexity", 1e-12);
  Tracker c1("g_interface_c1", 1e-12);
  Tracker fy("g_fenchel_young", 1e-10);
  Tracker range("g_range_in_K", 1e-10);
  Tracker mono("g_gradient_monotone", 1e-12);
  Tracker coerc("g_coercivity", 1e-12);
  Tracker gform("G_closed_form", 1e-12);
  Tracker sym("calG_symmetry", 1e-10);
  Tracker psd("calG_bounds", 1e-10);
  Tracker cs("calG_cauchy_schwarz", 1e-10);
  Tracker fd("calG_finite_difference", 1e-4);

  for (long i = 0; i < opts.count; ++i) {
    const MaterialParams& p = sets[i % sets.size()];
    const double ss = stress_scale(p), es = strain_scale(p);

    // Projection.
    const SymTensor2 a = random_tensor(rng, 1e-2 * ss, 1e1 * ss);
    const SymTensor2 b = random_tensor(rng, 1e-2 * ss, 1e1 * ss);
    const SymTensor2 pa = project_K(a, p).proj;
    const SymTensor2 pb = project_K(b, p).proj;
    in_K.add(std::max(0.0, yield_gap(pa, p)) / (1.0 + norm(a)));
    idem.add(norm(project_K(pa, p).proj - pa) / (1.0 + norm(a)));
    nonexp.add(std::max(0.0, norm(pa - pb) - norm(a - b)) / (1.0 + norm(a - b)));
    double worst_vi = 0.0;
    for (int k = 0; k < kFeasible; ++k) {
      const SymTensor2 tau = random_point_in_K(rng, p);
      worst_vi = std::max(worst_vi, inner(a - pa, tau - pa) / ((1.0 + norm(a)) * (1.0 + norm(tau))));
    }
    vi.add(worst_vi);

    // Support function.
    const SymTensor2 q = random_dom_H(rng, p);
    const ExtScalar h = support_H(q, p);
    if (h.is_finite()) {
      double best = -INFINITY, worst_gap = 0.0;
      for (int k = 0; k < kFeasible; ++k) {
        const double v = inner(random_point_in_K(rng, p), q);
        best = std::max(best, v);
        worst_gap = std::max(worst_gap, (v - h.value()) / (1.0 + ss * norm(q)));
      }
      sup_bound.add(worst_gap);
      sup_attained.add(std::max(0.0, h.value() - best) / (1.0 + ss * norm(q)));
    } else {
      sup_bound.skip();
      sup_attained.skip();
    }

    // Perzyna conjugate: central differences of the value against the gradient.
    {
      const double eps = log_uniform(rng, 1e-3, 1.0);
      const ConjugateEval ce = perzyna_conjugate(a, eps, p);
      const SymTensor2 dir = random_tensor(rng, 1.0, 1.0);
      const double step = 1e-6 * (1.0 + norm(a));
      const double fdv = (perzyna_conjugate(a + step * dir, eps, p).value -
                          perzyna_conjugate(a - step * dir, eps, p).value) /
                         (2.0 * step);
      conj_fd.add(std::abs(fdv - inner(ce.grad, dir)) / (1.0 + norm(ce.grad) * norm(dir)));
    }

    // Reduced potential.
    const SymTensor2 x1 = random_tensor(rng, 1e-2 * es, 1e1 * es);
    const SymTensor2 x2 = random_tensor(rng, 1e-2 * es, 1e1 * es);
    const GEval g1 = g_eval(x1, p), g2 = g_eval(x2, p);
    const GEval gm = g_eval(0.5 * (x1 + x2), p);
    convex.add(std::max(0.0, gm.value - 0.5 * (g1.value + g2.value)) /
               (1.0 + std::abs(g1.value) + std::abs(g2.value)));
    fy.add(std::abs(g1.value + 0.5 * inner(apply_compliance(g1.grad, p), g1.grad) - inner(x1, g1.grad)) /
           (1.0 + norm(x1) * norm(g1.grad)));
    range.add(std::max(0.0, yield_gap(g1.grad, p)));
    mono.add(std::max(0.0, -inner(g1.grad - g2.grad, x1 - x2)) / (1.0 + norm(g1.grad - g2.grad) * norm(x1 - x2)));
    if (g1.branch == GBranch::elastic) {
      coerc.add(std::max(0.0, p.a0 * norm2(x1) - g1.value) / (1.0 + g1.value));
    } else {
      coerc.skip();
    }

    // Threshold surface 2 mu |xi_D| + 2 alpha K0 tr xi = kappa.
    {
      const double tr = uniform(rng, -4.0, 1.0) * p.kappa / (2.0 * p.alpha * p.K0);
      const double d = (p.kappa - 2.0 * p.alpha * p.K0 * tr) / (2.0 * p.mu);
      const SymTensor2 xs = 0.5 * tr * SymTensor2::identity() + d * random_dev_unit(rng);
      const GEval ge = detail::g_elastic_branch(xs, p), gp = detail::g_plastic_branch(xs, p);
      c1.add(std::max(rel(ge.value, gp.value), norm(ge.grad - gp.grad) / (1.0 + norm(ge.grad))));
    }

    // G and its derivative.
    const SymTensor2 xi = random_tensor(rng, 1e-2 * es, 1e1 * es);
    const SymTensor2 G = G_map(xi, p);
    gform.add(norm(G - g_eval(xi + g_shift(p) * SymTensor2::identity(), p).grad) / (1.0 + norm(G)));
    const SymTensor2 e1 = random_tensor(rng, 1e-1, 1e1), e2 = random_tensor(rng, 1e-1, 1e1);
    const SymTensor2 c11 = calG(xi, e1, p), c12 = calG(xi, e2, p);
    const double g11 = inner(c11, e1), g22 = inner(c12, e2), g12 = inner(c11, e2), g21 = inner(c12, e1);
    const double scale = 1.0 + p.Cstar * norm(e1) * norm(e2);
    sym.add(std::abs(g12 - g21) / scale);
    psd.add(std::max(-g11, g11 - p.Cstar * norm2(e1)) / (1.0 + p.Cstar * norm2(e1)));
    cs.add(std::max(0.0, g12 * g21 - g11 * g22) / (scale * scale));

    const double step = 1e-6 * (es + norm(xi)) / norm(e1);
    const RegionTag region = classify_region(xi, p);
    if (classify_region(xi + 1e3 * step * e1, p) == region && classify_region(xi - 1e3 * step * e1, p) == region) {
      const SymTensor2 fdv = (G_map(xi + step * e1, p) - G_map(xi - step * e1, p)) / (2.0 * step);
      fd.add(norm(fdv - c11) / (norm(c11) + 1e-6 * p.Cstar * norm(e1)));
    } else {
      fd.skip();
    }
  }

  std::vector<PropertyResult> out;
  for (const Tracker* t : {&in_K, &idem, &nonexp, &vi, &sup_bound, &sup_attained, &conj_fd, &convex, &c1, &fy, &range,
                           &mono, &coerc, &gform, &sym, &psd, &cs, &fd})
    out.push_back(t->result());
  return out;
}

std::vector<PropertyResult> material_point_properties(const Options& opts) {
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto sets = parameter_sets();
  constexpr int kPathLength = 4;

  Tracker form("mp_form_sigma", 1e-8);
  Tracker hill("mp_hill_identity", 1e-8);
  Tracker perz("mp_perzyna_identity", 1e-9);
  Tracker kin("mp_state_consistency", 1e-12);
  Tracker tangent("mp_tangent_fd", 1e-4);
  Tracker monotone("mp_monotone_loading", 1e-12);
  Tracker ri("mp_rate_independent_in_K", 1e-10);

  for (long i = 0; i < opts.count; ++i) {
    const MaterialParams& p = sets[i % sets.size()];
    const double es = strain_scale(p);
    const double eps = log_uniform(rng, 1e-3, 1.0);
    const double dt = log_uniform(rng, 0.1, 1.0);

    SymTensor2 E, p_old;
    for (int k = 0; k < kPathLength; ++k) {
      E += random_tensor(rng, 1e-1 * es, 3.0 * es);
      const PointUpdate up = viscoplastic_update(E, p_old, dt, eps, p);
      const PointState& s = up.state;
      const SymTensor2 cinv_dp = apply_compliance(up.dp, p);
      const SymTensor2 lhs = s.sigma - eps * up.dp;
      const SymTensor2 rhs = g_eval(up.dp + s.e - eps * cinv_dp, p).grad;
      form.add(norm(lhs - rhs) / (1.0 + norm(s.sigma)));

      const ExtScalar h = support_H(up.dp, p, 1e-8 * (1.0 + norm(up.dp)));
      if (h.is_finite()) {
        hill.add(std::abs(inner(lhs, up.dp) - h.value()) / (1.0 + norm(up.dp)));
      } else {
        hill.add(INFINITY);
      }
      perz.add(norm(eps * up.dp - (s.sigma - project_K(s.sigma, p).proj)) / (1.0 + norm(s.sigma)));
      kin.add(std::max(norm(s.sigma - apply_elastic(s.e, p)) / (1.0 + norm(s.sigma)),
                       norm(s.e + s.p - E) / (1.0 + norm(E))));

      if (k == 0) {
        const TensorMap t = consistent_tangent(s, dt, eps, p);
        const double hstep = 1e-6 * (es + norm(E));
        bool same_case = true;
        TensorMap fdm;
        for (int c = 0; c < 3; ++c) {
          SymTensor2 dir;
          (c == 0 ? dir.xx : c == 1 ? dir.yy : dir.xy) = 1.0;
          for (double f : {1e3, -1e3})
            same_case = same_case && viscoplastic_update(E + f * hstep * dir, p_old, dt, eps, p).kind == up.kind;
          const SymTensor2 sp = viscoplastic_update(E + hstep * dir, p_old, dt, eps, p).state.sigma;
          const SymTensor2 sm = viscoplastic_update(E - hstep * dir, p_old, dt, eps, p).state.sigma;
          fdm.col(c) = ((sp - sm) / (2.0 * hstep)).vec();
        }
        if (same_case) {
          tangent.add((fdm - t).cwiseAbs().maxCoeff() / t.cwiseAbs().maxCoeff());
        } else {
          tangent.skip();
        }
      }
      p_old = s.p;
    }

    // Proportional stretch from a virgin state.
    {
      const SymTensor2 dir = random_tensor(rng, 1.0, 1.0);
      const double top = log_uniform(rng, 0.5, 5.0) * es / norm(dir);
      SymTensor2 pp;
      double prev = 0.0, worst = 0.0;
      for (int k = 1; k <= 20; ++k) {
        const PointUpdate up = viscoplastic_update((top * k / 20.0) * dir, pp, dt, eps, p);
        pp = up.state.p;
        worst = std::max(worst, (prev - norm(pp)) / (1.0 + norm(pp)));
        prev = norm(pp);
      }
      monotone.add(worst);
    }

    const PointState rs = rate_independent_update(random_tensor(rng, 1e-2 * es, 1e1 * es), SymTensor2{}, p);
    ri.add(std::max(0.0, yield_gap(rs.sigma, p)));
  }

  std::vector<PropertyResult> out;
  for (const Tracker* t : {&form, &hill, &perz, &kin, &tangent, &monotone, &ri}) out.push_back(t->result());
  return out;
}

}  // namespace perzyna::selftest
