#include "perzyna/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace perzyna {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

/// Applies a linear tensor-valued function to the three component basis
/// tensors and stacks the results as columns.
template <class F>
TensorMap map_from_columns(F&& f) {
  TensorMap m;
  m.col(0) = f(SymTensor2{1.0, 0.0, 0.0}).vec();
  m.col(1) = f(SymTensor2{0.0, 1.0, 0.0}).vec();
  m.col(2) = f(SymTensor2{0.0, 0.0, 1.0}).vec();
  return m;
}

/// Unit-norm tensor with tr = sqrt(2) cos(theta), |dev| = sin(theta).
SymTensor2 unit_direction(double theta) {
  const double c = std::cos(theta) * kSqrtHalf;
  const double s = std::sin(theta) * kSqrtHalf;
  return {c + s, c - s, 0.0};
}

/// Maximizes (or minimizes, via sign) a scalar function of theta on [0, pi]:
/// uniform grid followed by golden-section refinement around the best node.
double extremum_over_directions(const std::function<double(double)>& f, bool maximize) {
  constexpr int kGrid = 4000;
  const double sign = maximize ? 1.0 : -1.0;
  const double dtheta = M_PI / kGrid;
  int best_i = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = sign * f(i * dtheta);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo = std::max(0.0, (best_i - 1) * dtheta);
  double hi = std::min(M_PI, (best_i + 1) * dtheta);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = sign * f(x1);
  double f2 = sign * f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = sign * f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = sign * f(x1);
    }
  }
  best = std::max({best, f1, f2});
  return sign * best;
}

}  // namespace

// MaterialParams ----------------------------------------------------------------

MaterialParams MaterialParams::make(double lambda, double mu, double alpha, double kappa) {
  if (!(mu > 0.0)) throw std::invalid_argument("material: mu must be > 0");
  if (!(lambda + mu > 0.0)) throw std::invalid_argument("material: lambda + mu must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("material: alpha must be > 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("material: kappa must be > 0");
  if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(alpha) || !std::isfinite(kappa))
    throw std::invalid_argument("material: parameters must be finite");

  MaterialParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.K0 = lambda + mu;
  p.alpha = alpha;
  p.kappa = kappa;
  p.beta = 1.0 / (1.0 / mu + 1.0 / (2.0 * alpha * alpha * p.K0));
  p.a0 = detail::compute_a0(p);
  p.Cstar = detail::compute_Cstar(p);
  return p;
}

bool MaterialParams::regularity_warning() const { return std::abs(alpha - kSqrtHalf) <= 1e-12; }

// Elasticity ----------------------------------------------------------------------

SymTensor2 apply_elastic(const SymTensor2& e, const MaterialParams& p) {
  return p.lambda * e.trace() * SymTensor2::identity() + 2.0 * p.mu * e;
}

SymTensor2 apply_compliance(const SymTensor2& sigma, const MaterialParams& p) {
  return sigma.trace() / (4.0 * p.K0) * SymTensor2::identity() + sigma.deviator() / (2.0 * p.mu);
}

TensorMap elastic_map(const MaterialParams& p) {
  return map_from_columns([&](const SymTensor2& h) { return apply_elastic(h, p); });
}

TensorMap compliance_map(const MaterialParams& p) {
  return map_from_columns([&](const SymTensor2& h) { return apply_compliance(h, p); });
}

// Cone ------------------------------------------------------------------------------

double yield_gap(const SymTensor2& sigma, const MaterialParams& p) {
  return norm(sigma.deviator()) + p.alpha * sigma.trace() - p.kappa;
}

Projection project_K(const SymTensor2& sigma, const MaterialParams& p) {
  const double t = sigma.trace();
  const SymTensor2 dev = sigma.deviator();
  const double d = norm(dev);
  const double gap = d + p.alpha * t - p.kappa;
  if (gap <= 0.0) return {sigma, ProjectionCase::interior};

  // Lateral return along n + alpha Id, whose squared norm is 1 + 2 alpha^2.
  const double gamma = gap / (1.0 + 2.0 * p.alpha * p.alpha);
  if (d > 0.0 && d - gamma >= 0.0) {
    const SymTensor2 n = dev / d;
    return {sigma - gamma * (n + p.alpha * SymTensor2::identity()), ProjectionCase::lateral};
  }
  return {p.kappa / (2.0 * p.alpha) * SymTensor2::identity(), ProjectionCase::apex};
}

TensorMap dproject_K(const SymTensor2& sigma, const MaterialParams& p) {
  const double t = sigma.trace();
  const SymTensor2 dev = sigma.deviator();
  const double d = norm(dev);
  const double gap = d + p.alpha * t - p.kappa;
  if (gap < 0.0) return TensorMap::Identity();

  const double c = 1.0 + 2.0 * p.alpha * p.alpha;
  const double gamma = gap / c;
  if (!(d > 0.0 && d - gamma >= 0.0)) return TensorMap::Zero();

  const SymTensor2 n = dev / d;
  const SymTensor2 normal = n + p.alpha * SymTensor2::identity();
  return map_from_columns([&](const SymTensor2& h) {
    const double nh = inner(n, h);
    const double dgamma = (nh + p.alpha * h.trace()) / c;
    const SymTensor2 dn = (h.deviator() - nh * n) / d;
    return h - dgamma * normal - gamma * dn;
  });
}

ExtScalar support_H(const SymTensor2& q, const MaterialParams& p, double slack) {
  const double t = q.trace();
  if (norm(q.deviator()) <= t / (2.0 * p.alpha) + slack) {
    return ExtScalar::finite(p.kappa * t / (2.0 * p.alpha));
  }
  return ExtScalar::infinity();
}

ConjugateEval perzyna_conjugate(const SymTensor2& tau, double eps, const MaterialParams& p) {
  if (!(eps > 0.0)) throw std::invalid_argument("perzyna_conjugate: eps must be > 0");
  const SymTensor2 r = tau - project_K(tau, p).proj;
  return {norm2(r) / (2.0 * eps), r / eps};
}

// Reduced potential --------------------------------------------------------------

namespace detail {

GEval g_elastic_branch(const SymTensor2& xi, const MaterialParams& p) {
  const double t = xi.trace();
  const SymTensor2 dev = xi.deviator();
  return {0.5 * p.K0 * t * t + p.mu * norm2(dev),
          p.K0 * t * SymTensor2::identity() + 2.0 * p.mu * dev, GBranch::elastic};
}

GEval g_plastic_branch(const SymTensor2& xi, const MaterialParams& p) {
  const double a = p.alpha;
  const double t = xi.trace();
  const SymTensor2 dev = xi.deviator();
  const double d = norm(dev);
  const double s = std::max(0.0, d - t / (2.0 * a) + p.kappa / (4.0 * a * a * p.K0));
  const double value = p.kappa * t / (2.0 * a) - p.kappa * p.kappa / (8.0 * a * a * p.K0) + p.beta * s * s;
  SymTensor2 grad = p.kappa / (2.0 * a) * SymTensor2::identity();
  if (s > 0.0) grad += 2.0 * p.beta * s * (dev / d - 1.0 / (2.0 * a) * SymTensor2::identity());
  return {value, grad, GBranch::plastic};
}

double compute_a0(const MaterialParams& p) {
  // g(xi)/|xi|^2 over the elastic-branch region. Every direction enters the
  // region after scaling down, so sample each unit direction at a scale that
  // lies inside it.
  return extremum_over_directions(
      [&](double theta) {
        const SymTensor2 u = unit_direction(theta);
        const double lhs = 2.0 * p.mu * norm(u.deviator()) + 2.0 * p.alpha * p.K0 * u.trace();
        const double r = lhs > 0.0 ? std::min(1.0, 0.5 * p.kappa / lhs) : 1.0;
        return g_eval(r * u, p).value / (r * r);
      },
      /*maximize=*/false);
}

double compute_Cstar(const MaterialParams& p) {
  // calG(xi, .) only depends on the direction of xi, and the largest
  // eigenvalue of the bilinear form is invariant under rotating xi_D.
  const SymTensor2 basis[3] = {SymTensor2{kSqrtHalf, kSqrtHalf, 0.0}, SymTensor2{kSqrtHalf, -kSqrtHalf, 0.0},
                               SymTensor2{0.0, 0.0, kSqrtHalf}};
  return extremum_over_directions(
      [&](double theta) {
        const SymTensor2 xi = unit_direction(theta);
        Eigen::Matrix3d form;
        for (int j = 0; j < 3; ++j) {
          const SymTensor2 g = calG(xi, basis[j], p);
          for (int i = 0; i < 3; ++i) form(i, j) = inner(g, basis[i]);
        }
        const Eigen::Matrix3d sym = 0.5 * (form + form.transpose());
        return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      },
      /*maximize=*/true);
}

}  // namespace detail

GEval g_eval(const SymTensor2& xi, const MaterialParams& p) {
  const double threshold = 2.0 * p.mu * norm(xi.deviator()) + 2.0 * p.alpha * p.K0 * xi.trace();
  if (threshold <= p.kappa) return detail::g_elastic_branch(xi, p);
  return detail::g_plastic_branch(xi, p);
}

double g_shift(const MaterialParams& p) { return p.kappa / (4.0 * p.alpha * p.K0); }

RegionTag classify_region(const SymTensor2& xi, const MaterialParams& p) {
  if (xi == SymTensor2::zero()) return RegionTag::A2;
  const double t = xi.trace();
  const double d = norm(xi.deviator());
  if (p.mu * d + p.alpha * p.K0 * t < 0.0) return RegionTag::A1;
  if (d < t / (2.0 * p.alpha)) return RegionTag::A2;
  return RegionTag::A3;
}

SymTensor2 G_map(const SymTensor2& xi, const MaterialParams& p) {
  const SymTensor2 vertex = p.kappa / (2.0 * p.alpha) * SymTensor2::identity();
  switch (classify_region(xi, p)) {
    case RegionTag::A1:
      return vertex + p.K0 * xi.trace() * SymTensor2::identity() + 2.0 * p.mu * xi.deviator();
    case RegionTag::A2:
      return vertex;
    case RegionTag::A3: {
      const SymTensor2 dev = xi.deviator();
      const double d = norm(dev);
      const double s = d - xi.trace() / (2.0 * p.alpha);
      return vertex + 2.0 * p.beta * s * (dev / d - 1.0 / (2.0 * p.alpha) * SymTensor2::identity());
    }
  }
  return vertex;
}

SymTensor2 calG(const SymTensor2& xi, const SymTensor2& eta, const MaterialParams& p) {
  switch (classify_region(xi, p)) {
    case RegionTag::A1:
      return p.K0 * eta.trace() * SymTensor2::identity() + 2.0 * p.mu * eta.deviator();
    case RegionTag::A2:
      return SymTensor2::zero();
    case RegionTag::A3: {
      const double a = p.alpha;
      const SymTensor2 dev = xi.deviator();
      const SymTensor2 eta_dev = eta.deviator();
      const double d = norm(dev);
      const SymTensor2 n = dev / d;
      const double ne = inner(dev, eta_dev) / d;
      const double s = d - xi.trace() / (2.0 * a);
      return 2.0 * p.beta * (ne - eta.trace() / (2.0 * a)) * (n - 1.0 / (2.0 * a) * SymTensor2::identity()) +
             2.0 * p.beta * s / d * (eta_dev - ne / d * dev);
    }
  }
  return SymTensor2::zero();
}

TensorMap calG_map(const SymTensor2& xi, const MaterialParams& p) {
  return map_from_columns([&](const SymTensor2& h) { return calG(xi, h, p); });
}

}  // namespace perzyna
