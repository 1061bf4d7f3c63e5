#pragma once

#include "perzyna/convex_kernel.hpp"
#include "perzyna/fem2d.hpp"
#include "perzyna/trajectory.hpp"

namespace perzyna {

/// Membership slack for dom H used by every diagnostic: |q_D| <= tr q/(2 alpha) + 1e-8 (1 + |q|).
double dom_H_slack(const SymTensor2& q);

/// Q(e) = sum over elements of area C e : e / 2.
double elastic_energy(const Mesh& mesh, const std::vector<PointState>& points);

struct EnergyIncrement {
  double dissipation = 0.0;  ///< dt sum area H(dp); +inf if some dp leaves dom H
  double viscous = 0.0;      ///< eps dt sum area |dp|^2
  double work = 0.0;         ///< int sigma:E dw + int f.(du - dw), endpoint-averaged sigma and f
  int worst_element = -1;    ///< element with dp outside dom H, if any
};

/**
 * Increments of the energy-balance terms from `prev` to `next`. Dissipation
 * and viscous terms use the backward-Euler rate dp of `next`, so they match
 * the discrete flow rule exactly. The power terms use the average of the
 * endpoint stresses and loads, which makes the quadratic elastic energy
 * identity exact for linear steps.
 */
EnergyIncrement energy_increment(const Mesh& mesh, const MaterialParams& params, double eps, const StepState& prev,
                                 const StepState& next, bool include_viscous = true);

}  // namespace perzyna
