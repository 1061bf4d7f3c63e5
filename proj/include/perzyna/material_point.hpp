#pragma once

#include "perzyna/convex_kernel.hpp"
#include "perzyna/errors.hpp"
#include "perzyna/tensor2d.hpp"

namespace perzyna {

/// Elastic strain, plastic strain and stress at one quadrature point.
/// sigma = C e and e + p equals the total strain of the last update.
struct PointState {
  SymTensor2 e;
  SymTensor2 p;
  SymTensor2 sigma;
};

struct PointUpdate {
  PointState state;
  SymTensor2 dp;  ///< plastic strain rate (p_new - p_old) / dt
  int iters = 0;
  ProjectionCase kind = ProjectionCase::interior;
  double residual = 0.0;  ///< |p_new - p_old - dt DH*_eps(sigma)|
};

struct LocalSolverOptions {
  double tol = 1e-10;
  int newton_iters = 25;
  int max_iters = 200;
};

/**
 * @brief Backward-Euler step of the Perzyna flow rule dp/dt = DH*_eps(sigma).
 *
 * Solves p_new = p_old + dt (sigma - P_K sigma)/eps with sigma = C(E - p_new).
 * The unknown is sigma: the residual C^{-1}(sigma - sigma_trial) +
 * (dt/eps)(sigma - P_K sigma) is the gradient of a strongly convex function,
 * so semismooth Newton with step halving is used, backed by damped gradient
 * iterations if Newton stalls.
 *
 * Throws std::invalid_argument when dt <= 0 or eps <= 0, NonConvergence when
 * the iteration budget runs out.
 */
PointUpdate viscoplastic_update(const SymTensor2& E_total, const SymTensor2& p_old, double dt, double eps,
                                const MaterialParams& params, const LocalSolverOptions& opts = {});

/// d sigma / d E_total = C (I + (dt/eps)(I - DP_K(sigma)) C)^{-1}.
/// Throws SingularTangent if the 3x3 system cannot be inverted.
TensorMap consistent_tangent(const PointState& state, double dt, double eps, const MaterialParams& params);

/// Rate-independent incremental update: sigma = Dg(E_total - p_old).
PointState rate_independent_update(const SymTensor2& E_total, const SymTensor2& p_old, const MaterialParams& params);

/// D^2 g(E_total - p_old) plus `damping` times the identity. The Hessian
/// vanishes on the apex region, hence the damping.
TensorMap rate_independent_tangent(const SymTensor2& E_total, const SymTensor2& p_old, const MaterialParams& params,
                                   double damping);

/// Default Levenberg damping for rate_independent_tangent: 1e-8 tr(C).
double rate_independent_damping(const MaterialParams& params);

}  // namespace perzyna
