#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perzyna/convex_kernel.hpp"
#include "perzyna/expression.hpp"
#include "perzyna/fem2d.hpp"
#include "perzyna/trajectory.hpp"

namespace perzyna {

class Problem;

struct DiagnosticEntry {
  std::string check;
  int step = -1;  ///< -1 for checks that are not tied to a step
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int element = -1;  ///< worst element, if meaningful
};

struct DiagnosticsReport {
  std::vector<DiagnosticEntry> entries;

  bool all_pass() const;
  /// Names of failed checks, each listed once.
  std::vector<std::string> failed_checks() const;
};

// Energy balance ------------------------------------------------------------------

struct EnergyBalance {
  std::vector<double> absolute;  ///< |Q(e) + D + V - Q(e0) - W| per step
  std::vector<double> relative;  ///< absolute / (Q(e0) + |W|), or absolute when that vanishes
  std::vector<double> elastic, dissipation, viscous, work;
};

/// Recomputes every term from the recorded states. Throws InfiniteDissipation
/// if some dp leaves dom H beyond the diagnostics slack.
EnergyBalance energy_balance_report(const Mesh& mesh, const MaterialParams& params, const Trajectory& traj,
                                    bool include_viscous = true);

// Flow rule -----------------------------------------------------------------------

struct FlowRuleResidual {
  ElementScalars hill;        ///< |H(dp) - (sigma - eps dp):dp|, 0 where H(dp) is infinite
  ElementScalars membership;  ///< yield_gap(sigma - eps dp)_+
  ElementScalars dom_defect;  ///< (|dp_D| - tr dp/(2 alpha) - slack)_+
  double hill_sup = 0.0;
  double hill_sup_scaled = 0.0;  ///< sup of hill / (1 + |dp|)
  double membership_sup = 0.0;
  double dom_defect_sup = 0.0;
  int worst_element = -1;  ///< argmax of the scaled Hill residual
};

FlowRuleResidual flow_rule_residual(const StepState& state, const MaterialParams& params, double eps);

/// sup over elements of |eps dp - (sigma - P_K sigma)| / (1 + |sigma|).
double perzyna_identity_defect(const StepState& state, const MaterialParams& params, double eps);

/// sup over boundary nodes and steps of |u - w|.
double dirichlet_defect(const Mesh& mesh, const Trajectory& traj);

// Duality ---------------------------------------------------------------------------

/**
 * <[sigma:p], phi> = int phi (w - u).div sigma + int sigma:((w - u) sym grad phi)
 *                  + int sigma:(E w - e) phi
 * with div sigma taken from the nodal recovery of the element stress and
 * one-point quadrature on each triangle. phi is evaluated at time t.
 */
double duality_pairing(const Mesh& mesh, std::span<const SymTensor2> sigma, std::span<const Vec2> u,
                       std::span<const SymTensor2> e, std::span<const Vec2> w, const FieldExpr& phi, double t = 0.0);

/// The pairing with phi = 1.
double duality_product(const Mesh& mesh, std::span<const SymTensor2> sigma, std::span<const Vec2> u,
                       std::span<const SymTensor2> e, std::span<const Vec2> w);

// Safe load -------------------------------------------------------------------------

/**
 * Two entries: "safe_load_div" (sup over free nodes and times of the weak
 * residual of -div chi = f divided by the lumped nodal mass, against div_tol)
 * and "safe_load_margin" (max over barycenters and times of
 * |chi_D| + alpha tr chi - (kappa - delta), pass when <= 0). Times are 0, T
 * and every knot of the time profiles.
 */
std::vector<DiagnosticEntry> safe_load_check(const TensorExpr& chi, const VectorExpr& f, double delta,
                                             const Mesh& mesh, const MaterialParams& params, double T,
                                             double div_tol = 1e-8);

// Strong flow rule probe ---------------------------------------------------------------

struct ProbeRow {
  int step = 0;
  int element = 0;
  std::vector<double> residual;  ///< one per radius, in the given order
};

struct ProbeReport {
  std::vector<double> radii;
  std::vector<ProbeRow> rows;
  /// Share of probed elements whose residual at the smallest radius does not
  /// exceed the one at the largest radius.
  double fraction_improving = 0.0;
};

/// Area-weighted average of the recovered stress over the elements whose
/// barycenter lies within r of x. Falls back to `self` when none does.
SymTensor2 disc_average(const Mesh& mesh, std::span<const SymTensor2> nodal, const Vec2& x, double r, int self);

/// Probes every element with |dp| >= threshold max|dp| at each step. The
/// averaged field is the recovered sigma - eps dp, which lies in K.
/// Throws EmptyProbeSet when no element qualifies at any step.
ProbeReport strong_flow_rule_probe(const Mesh& mesh, const MaterialParams& params, const Trajectory& traj,
                                   std::span<const double> radii, double threshold);

// Full run ------------------------------------------------------------------------------

/// Runs every check enabled in the scenario on a finished trajectory.
DiagnosticsReport run_diagnostics(const Problem& problem, const Trajectory& traj);

}  // namespace perzyna
