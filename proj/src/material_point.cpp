#include "perzyna/material_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace perzyna {

namespace {

struct LocalProblem {
  const MaterialParams& params;
  SymTensor2 sigma_trial;
  double rate;  // dt / eps

  // Gradient of sigma -> C^{-1}sigma:sigma/2 + dt H*_eps(sigma) - C^{-1}sigma_trial:sigma.
  SymTensor2 residual(const SymTensor2& sigma) const {
    const SymTensor2 excess = sigma - project_K(sigma, params).proj;
    return apply_compliance(sigma - sigma_trial, params) + rate * excess;
  }

  TensorMap jacobian(const SymTensor2& sigma) const {
    return compliance_map(params) + rate * (TensorMap::Identity() - dproject_K(sigma, params));
  }
};

}  // namespace

PointUpdate viscoplastic_update(const SymTensor2& E_total, const SymTensor2& p_old, double dt, double eps,
                                const MaterialParams& params, const LocalSolverOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("viscoplastic_update: dt must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("viscoplastic_update: eps must be > 0");

  const SymTensor2 sigma_trial = apply_elastic(E_total - p_old, params);
  PointUpdate out;
  if (yield_gap(sigma_trial, params) <= 0.0) {
    out.state = {E_total - p_old, p_old, sigma_trial};
    return out;
  }

  const LocalProblem prob{params, sigma_trial, dt / eps};
  const double tol = opts.tol * (1.0 + norm(p_old));

  SymTensor2 sigma = sigma_trial;
  SymTensor2 r = prob.residual(sigma);
  double rnorm = norm(r);
  int it = 0;
  bool newton = true;
  while (rnorm > tol) {
    if (it >= opts.max_iters) {
      throw NonConvergence("viscoplastic_update: no convergence after " + std::to_string(it) +
                               " iterations, residual " + std::to_string(rnorm),
                           rnorm);
    }
    if (newton && it >= opts.newton_iters) newton = false;
    ++it;

    if (newton) {
      const Eigen::PartialPivLU<TensorMap> lu(prob.jacobian(sigma));
      const SymTensor2 step = SymTensor2::from_vec(lu.solve(-r.vec()));
      double lam = 1.0;
      bool accepted = false;
      for (int k = 0; k < 30; ++k, lam *= 0.5) {
        const SymTensor2 trial = sigma + lam * step;
        const SymTensor2 rt = prob.residual(trial);
        const double rtn = norm(rt);
        if (rtn < rnorm) {
          sigma = trial;
          r = rt;
          rnorm = rtn;
          accepted = true;
          break;
        }
      }
      if (!accepted) newton = false;
    } else {
      // Gradient step with 1/L, L the Lipschitz constant of the residual.
      const double lip = std::max(1.0 / (2.0 * params.K0), 1.0 / (2.0 * params.mu)) + prob.rate;
      sigma -= r / lip;
      r = prob.residual(sigma);
      rnorm = norm(r);
    }
  }

  // Rebuild a consistent triple from the converged stress.
  const SymTensor2 p_new = p_old + apply_compliance(sigma_trial - sigma, params);
  const SymTensor2 e = E_total - p_new;
  const SymTensor2 sig = apply_elastic(e, params);
  out.state = {e, p_new, sig};
  out.dp = (p_new - p_old) / dt;
  out.iters = it;
  out.kind = project_K(sig, params).kind;
  out.residual = norm(p_new - p_old - dt * perzyna_conjugate(sig, eps, params).grad);
  return out;
}

TensorMap consistent_tangent(const PointState& state, double dt, double eps, const MaterialParams& params) {
  const TensorMap C = elastic_map(params);
  if (yield_gap(state.sigma, params) < 0.0) return C;
  const TensorMap A =
      TensorMap::Identity() + (dt / eps) * (TensorMap::Identity() - dproject_K(state.sigma, params)) * C;
  const Eigen::FullPivLU<TensorMap> lu(A);
  if (!lu.isInvertible()) throw SingularTangent("consistent_tangent: singular local Jacobian");
  return C * lu.inverse();
}

PointState rate_independent_update(const SymTensor2& E_total, const SymTensor2& p_old, const MaterialParams& params) {
  const SymTensor2 sigma = g_eval(E_total - p_old, params).grad;
  const SymTensor2 e = apply_compliance(sigma, params);
  return {e, E_total - e, sigma};
}

TensorMap rate_independent_tangent(const SymTensor2& E_total, const SymTensor2& p_old, const MaterialParams& params,
                                   double damping) {
  const SymTensor2 xi = E_total - p_old - g_shift(params) * SymTensor2::identity();
  return calG_map(xi, params) + damping * TensorMap::Identity();
}

double rate_independent_damping(const MaterialParams& params) { return 1e-8 * elastic_map(params).trace(); }

}  // namespace perzyna
