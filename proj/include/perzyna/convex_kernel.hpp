#pragma once

#include <limits>

#include "perzyna/tensor2d.hpp"

/**
 * @file convex_kernel.hpp
 * @brief Closed-form convex analysis for isotropic elasticity and the
 * Drucker-Prager cone K = {s : |s_D| + alpha tr s <= kappa} in 2D.
 *
 * Everything here is a pure function of MaterialParams. The reduced
 * potential g is the convex conjugate of s -> C^{-1}s:s/2 + I_K(s), so
 * Dg(xi) is the C^{-1}-metric projection of C xi onto K. G is Dg shifted so
 * that the cone vertex sits at the origin, and calG is its derivative.
 */

namespace perzyna {

struct MaterialParams {
  double lambda = 0.0;
  double mu = 0.0;
  double K0 = 0.0;     ///< lambda + mu
  double alpha = 0.0;  ///< friction coefficient
  double kappa = 0.0;  ///< cohesion threshold
  double beta = 0.0;   ///< (1/mu + 1/(2 alpha^2 K0))^{-1}
  double a0 = 0.0;     ///< g(xi) >= a0 |xi|^2 on the elastic branch
  double Cstar = 0.0;  ///< calG(xi, eta):eta <= Cstar |eta|^2

  /// Validates mu > 0, lambda + mu > 0, alpha > 0, kappa > 0 and computes the
  /// derived constants (a0 and Cstar numerically). Throws std::invalid_argument.
  static MaterialParams make(double lambda, double mu, double alpha, double kappa);

  /// True when alpha = 1/sqrt(2), the value excluded by the stress regularity
  /// result. All kernel formulas stay valid; only the diagnostics care.
  bool regularity_warning() const;
};

enum class RegionTag { A1, A2, A3 };

/// Value in [0, +inf] with an explicit infinity tag.
class ExtScalar {
 public:
  static ExtScalar finite(double v) { return ExtScalar(v, false); }
  static ExtScalar infinity() { return ExtScalar(0.0, true); }

  bool is_finite() const { return !inf_; }
  bool is_infinite() const { return inf_; }
  /// Finite value, or +inf as a double for printing.
  double value() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

 private:
  ExtScalar(double v, bool inf) : v_(v), inf_(inf) {}
  double v_;
  bool inf_;
};

enum class ProjectionCase { interior, lateral, apex };

struct Projection {
  SymTensor2 proj;
  ProjectionCase kind;
};

struct ConjugateEval {
  double value;
  SymTensor2 grad;
};

enum class GBranch { elastic, plastic };

struct GEval {
  double value;
  SymTensor2 grad;
  GBranch branch;
};

// Elasticity -----------------------------------------------------------------

/// C e = lambda (tr e) Id + 2 mu e.
SymTensor2 apply_elastic(const SymTensor2& e, const MaterialParams& p);
/// C^{-1} s = (tr s)/(4 K0) Id + s_D/(2 mu).
SymTensor2 apply_compliance(const SymTensor2& sigma, const MaterialParams& p);
TensorMap elastic_map(const MaterialParams& p);
TensorMap compliance_map(const MaterialParams& p);

// The cone K -------------------------------------------------------------------

/// |s_D| + alpha tr s - kappa; s is in K iff the result is <= 0.
double yield_gap(const SymTensor2& sigma, const MaterialParams& p);

/// Euclidean (Frobenius) projection onto K.
Projection project_K(const SymTensor2& sigma, const MaterialParams& p);

/// Generalized Jacobian of project_K. On the yield surface the lateral
/// branch is used.
TensorMap dproject_K(const SymTensor2& sigma, const MaterialParams& p);

/// Support function H(q) = sup_{s in K} s:q = kappa tr q / (2 alpha) when
/// |q_D| <= tr q / (2 alpha), +inf otherwise. `slack` widens the membership
/// test to |q_D| <= tr q/(2 alpha) + slack; the kernel itself uses 0.
ExtScalar support_H(const SymTensor2& q, const MaterialParams& p, double slack = 0.0);

/// H*_eps(tau) = |tau - P_K tau|^2 / (2 eps) and its gradient (tau - P_K tau)/eps.
/// Throws std::invalid_argument for eps <= 0.
ConjugateEval perzyna_conjugate(const SymTensor2& tau, double eps, const MaterialParams& p);

// Reduced potential -------------------------------------------------------------

GEval g_eval(const SymTensor2& xi, const MaterialParams& p);

/// Shift that moves the vertex of the plastic branch of g to the origin.
double g_shift(const MaterialParams& p);

RegionTag classify_region(const SymTensor2& xi, const MaterialParams& p);

/// G(xi) = Dg(xi + kappa/(4 alpha K0) Id), evaluated by its three-branch form.
SymTensor2 G_map(const SymTensor2& xi, const MaterialParams& p);

/// calG(xi, eta): the branchwise derivative of G at xi applied to eta.
SymTensor2 calG(const SymTensor2& xi, const SymTensor2& eta, const MaterialParams& p);
TensorMap calG_map(const SymTensor2& xi, const MaterialParams& p);

namespace detail {
// Individual branches of g, exposed for interface-matching checks.
GEval g_elastic_branch(const SymTensor2& xi, const MaterialParams& p);
GEval g_plastic_branch(const SymTensor2& xi, const MaterialParams& p);
double compute_a0(const MaterialParams& p);
double compute_Cstar(const MaterialParams& p);
}  // namespace detail

}  // namespace perzyna
