#pragma once

// Independent reference computations used only by the tests. None of these
// call the closed forms they are compared against.

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "perzyna/convex_kernel.hpp"
#include "perzyna/fem2d.hpp"

namespace oracle {

using perzyna::MaterialParams;
using perzyna::SymTensor2;

/// Projection onto K by projected-gradient ascent on the dual multiplier of
/// the single constraint |s_D| + alpha tr s <= kappa.
inline SymTensor2 project_dual_ascent(const SymTensor2& sigma, const MaterialParams& p, int max_iter = 200000) {
  const SymTensor2 dev = sigma.deviator();
  const double d = perzyna::norm(dev);
  const double tr = sigma.trace();
  auto primal = [&](double lam) {
    const double shrink = d > 0.0 ? std::max(0.0, 1.0 - lam / d) : 0.0;
    return 0.5 * (tr - 2.0 * p.alpha * lam) * SymTensor2::identity() + shrink * dev;
  };
  auto constraint = [&](const SymTensor2& t) {
    return perzyna::norm(t.deviator()) + p.alpha * t.trace() - p.kappa;
  };
  const double step = 1.0 / (1.0 + 2.0 * p.alpha * p.alpha);
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double next = std::max(0.0, lam + step * constraint(primal(lam)));
    if (std::abs(next - lam) <= 1e-15 * (1.0 + lam)) {
      lam = next;
      break;
    }
    lam = next;
  }
  return primal(lam);
}

/// Golden-section minimizer of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

/// g(xi) = inf_q C(xi - q):(xi - q)/2 + H(q) by nested golden-section search
/// over q = (t/2) Id + d xi_D/|xi_D| with t >= 2 alpha d >= 0.
inline double g_inf_convolution(const SymTensor2& xi, const MaterialParams& p) {
  const double tr = xi.trace();
  const double dev = perzyna::norm(xi.deviator());
  auto objective = [&](double t, double d) {
    return 0.5 * p.K0 * (tr - t) * (tr - t) + p.mu * (dev - d) * (dev - d) + p.kappa * t / (2.0 * p.alpha);
  };
  const double span = 10.0 * (std::abs(tr) + dev + p.kappa / (p.alpha * p.K0) + 1.0);
  auto inner_min = [&](double d) {
    const double lo = 2.0 * p.alpha * d;
    const double t = golden_min([&](double tt) { return objective(tt, d); }, lo, lo + span);
    return objective(t, d);
  };
  const double d = golden_min(inner_min, 0.0, dev + span);
  return inner_min(d);
}

/// Backward-Euler Perzyna step by damped fixed-point iteration on p:
/// p <- p - w (p - p_old - dt (s - P s)/eps), s = C(E - p).
inline SymTensor2 perzyna_fixed_point(const SymTensor2& E, const SymTensor2& p_old, double dt, double eps,
                                      const MaterialParams& params, int max_iter = 2000000) {
  const double cmax = std::max(2.0 * params.K0, 2.0 * params.mu);
  const double w = 1.0 / (1.0 + dt / eps * cmax);
  SymTensor2 p = p_old;
  for (int it = 0; it < max_iter; ++it) {
    const SymTensor2 s = perzyna::apply_elastic(E - p, params);
    const SymTensor2 r = p - p_old - (dt / eps) * (s - project_dual_ascent(s, params));
    p -= w * r;
    if (perzyna::norm(r) < 1e-14) break;
  }
  return p;
}

/// Linear elasticity on a mesh with every boundary node prescribed, assembled
/// and solved from scratch (dense 3x3 algebra, sparse LU).
inline perzyna::NodalVectors solve_linear_elasticity(const perzyna::Mesh& mesh, const MaterialParams& p,
                                                     const perzyna::NodalVectors& w,
                                                     const perzyna::NodalVectors& f_bary) {
  const int n = mesh.num_nodes();
  std::vector<int> id(2 * n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!mesh.on_boundary[i]) id[2 * i] = nf++, id[2 * i + 1] = nf++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    // B maps (u0x,u0y,u1x,u1y,u2x,u2y) to engineering strain (exx, eyy, 2exy).
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int k = 0; k < 3; ++k) {
      const auto& g = mesh.grads[t][k];
      B(0, 2 * k) = g.x();
      B(1, 2 * k + 1) = g.y();
      B(2, 2 * k) = g.y();
      B(2, 2 * k + 1) = g.x();
    }
    Eigen::Matrix3d D;
    D << p.lambda + 2 * p.mu, p.lambda, 0, p.lambda, p.lambda + 2 * p.mu, 0, 0, 0, p.mu;
    const Eigen::Matrix<double, 6, 6> k = mesh.areas[t] * B.transpose() * D * B;
    for (int a = 0; a < 6; ++a) {
      const int ga = id[2 * tri[a / 2] + a % 2];
      if (ga < 0) continue;
      rhs[ga] += mesh.areas[t] * f_bary[t][a % 2] / 3.0;
      for (int b = 0; b < 6; ++b) {
        const int gb = id[2 * tri[b / 2] + b % 2];
        if (gb >= 0) {
          trip.emplace_back(ga, gb, k(a, b));
        } else {
          rhs[ga] -= k(a, b) * w[tri[b / 2]][b % 2];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> K(nf, nf);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
  const Eigen::VectorXd x = lu.solve(rhs);

  perzyna::NodalVectors u(n);
  for (int i = 0; i < n; ++i)
    u[i] = mesh.on_boundary[i] ? w[i] : perzyna::Vec2(x[id[2 * i]], x[id[2 * i + 1]]);
  return u;
}

/// Tensor-product Gauss-Legendre quadrature (n points per direction) of f on
/// the rectangle [0,lx]x[0,ly].
inline double integrate_rect(const std::function<double(double, double)>& f, double lx, double ly, int cells = 16) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double hx = lx / cells, hy = ly / cells;
  double sum = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
          const double x = (i + 0.5 * (1.0 + gx[a])) * hx;
          const double y = (j + 0.5 * (1.0 + gx[b])) * hy;
          sum += 0.25 * hx * hy * gw[a] * gw[b] * f(x, y);
        }
  return sum;
}

}  // namespace oracle
