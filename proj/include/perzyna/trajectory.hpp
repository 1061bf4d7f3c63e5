#pragma once

#include <limits>
#include <vector>

#include "perzyna/fem2d.hpp"
#include "perzyna/material_point.hpp"

namespace perzyna {

struct StepMonitors {
  int newton_iters = 0;
  double residual = 0.0;  ///< sup norm of the free-node equilibrium residual
  double energy_elastic = 0.0;
  double dissipation_cum = 0.0;
  double viscous_cum = 0.0;
  double external_work_cum = 0.0;
  double balance_residual = 0.0;  ///< |Q(e) + D + V - Q(e0) - W|
  double balance_signed = 0.0;    ///< Q(e) + D + V - Q(e0) - W
  double max_yield_gap = 0.0;     ///< max over elements of yield_gap(sigma)
  double h1_seminorm_interior = std::numeric_limits<double>::quiet_NaN();
};

/// Solution at one time level.
struct StepState {
  int step = 0;
  double t = 0.0;
  NodalVectors u;
  std::vector<PointState> points;  ///< per element
  ElementTensors dp;               ///< plastic strain rate over the last step
  NodalVectors w;                  ///< nodal boundary datum w(t)
  NodalVectors load;               ///< assembled load vector at t
  StepMonitors mon;

  ElementTensors stresses() const;
};

/// Discrete counterparts of the a priori estimates, accumulated over a run.
struct EstimateMonitors {
  double sup_e_l2 = 0.0;           ///< max_t ||e||_{L2}
  double dp_l1_l1 = 0.0;           ///< sum dt ||dp||_{L1}
  double sqrt_eps_dp_l2_l2 = 0.0;  ///< sqrt(eps) ||dp||_{L2(L2)}
  double sigma_dot_l2_l2 = 0.0;    ///< ||d sigma/dt||_{L2(L2)}
};

struct Trajectory {
  double eps = 0.0;  ///< 0 for the rate-independent solver
  std::vector<StepState> steps;
  EstimateMonitors estimates;

  const StepState& final() const { return steps.back(); }
};

}  // namespace perzyna
