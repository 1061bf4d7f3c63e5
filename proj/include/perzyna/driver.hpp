#pragma once

#include <optional>
#include <span>
#include <vector>

#include "perzyna/energy.hpp"
#include "perzyna/fem2d.hpp"
#include "perzyna/kernels.hpp"
#include "perzyna/scenario.hpp"
#include "perzyna/trajectory.hpp"

namespace perzyna {

enum class Execution { serial, parallel };

/**
 * @brief Quasi-static evolution on a fixed mesh.
 *
 * Each time step solves global equilibrium for the nodal displacements by
 * Newton's method: every iteration runs the local constitutive update on all
 * elements, assembles residual and consistent tangent, solves, and halves the
 * step until the residual norm drops (at most 8 halvings). Boundary nodes
 * carry w(t) exactly.
 */
class Problem {
 public:
  explicit Problem(Scenario scenario, Execution exec = Execution::parallel);

  const Scenario& scenario() const { return sc_; }
  const Mesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const MaterialParams& params() const { return sc_.params; }
  /// Viscosity seen by the flow rule: eps, or 0 for the rate-independent solver.
  double flow_eps() const;

  /// Linear elastic solve at t = 0 with p = p0. Throws InadmissibleInitialState
  /// if some element stress lies outside K by more than 1e-9.
  StepState init_state() const;

  /// Advances a converged state to t_next. Throws StepNonConvergence.
  StepState step(const StepState& prev, double t_next) const;

  Trajectory run() const;

  /// max(1, sup|f(t)|, sup|C E w(t)|), the scale of the Newton stopping rule.
  double load_scale(double t) const;

 private:
  struct Equilibrium {
    NodalVectors u;
    kernels::PointResults points;
    AssembledSystem system;
    int iters = 0;
  };

  /// `predictor`, when given, is the previous converged displacement; the
  /// first iteration then uses the tangent linearized there.
  Equilibrium solve_equilibrium(NodalVectors u, std::span<const SymTensor2> p_old, double t, double dt,
                                kernels::Constitutive model, int step_index,
                                const NodalVectors* predictor = nullptr) const;
  void evaluate(const NodalVectors& u, std::span<const SymTensor2> p_old, const NodalVectors& load, double dt,
                kernels::Constitutive model, Equilibrium& out) const;
  StepState make_state(int step, double t, Equilibrium&& eq, const NodalVectors& w, const NodalVectors& load) const;
  void fill_monitors(StepState& state) const;

  Scenario sc_;
  Mesh mesh_;
  DofMap dofs_;
  Execution exec_;
};

/// Yield-gap tolerance for the initial stress.
inline constexpr double kInitialGapTol = 1e-9;

struct SweepEntry {
  double eps = 0.0;
  double max_gap_pos = 0.0;                    ///< sup_t sup_elem yield_gap(sigma)_+
  std::optional<double> stress_distance_prev;  ///< ||sigma_eps(T) - sigma_prev(T)||_{L2}
  std::vector<double> h1_per_step;
  EstimateMonitors estimates;
  ElementTensors final_stress;
};

struct SweepReport {
  std::vector<double> times;
  std::vector<SweepEntry> entries;

  /// max/min of the interior H1 seminorm across the eps list at each step
  /// (1 where all values vanish).
  std::vector<double> h1_factor_per_step() const;
  double h1_max_factor() const;
};

/// Runs the scenario once per eps. The list must be nonempty, positive and
/// strictly decreasing (std::invalid_argument otherwise).
SweepReport sweep_epsilon(const Scenario& scenario, std::span<const double> eps_list,
                          Execution exec = Execution::parallel);

}  // namespace perzyna
