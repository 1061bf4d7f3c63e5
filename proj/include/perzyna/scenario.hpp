#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "perzyna/convex_kernel.hpp"
#include "perzyna/expression.hpp"
#include "perzyna/fem2d.hpp"

namespace perzyna {

enum class SolverKind { perzyna, rate_independent };

struct DiagnosticToggles {
  bool energy = true;
  bool flow_rule = true;
  bool safe_load = true;  ///< only runs when a safe-load field is given
  bool probe = false;
  double energy_tol = 0.05;  ///< relative balance residual accepted at the final step
  std::vector<double> probe_radii{0.2, 0.1, 0.05};
  double probe_threshold = 0.5;
  std::optional<FieldExpr> duality_phi;
};

/**
 * Full problem description, read from a key = value file with sections
 * [mesh] [material] [time] [bc] [load] [safeload] [output]. See README for
 * the key list; unknown sections or keys are rejected.
 */
struct Scenario {
  std::variant<RectSpec, std::filesystem::path> mesh = RectSpec{};
  MaterialParams params;
  double eps = 1.0;
  double T = 1.0;
  int n_steps = 1;
  SolverKind solver = SolverKind::perzyna;
  int max_newton = 50;

  VectorExpr w;  ///< boundary displacement
  VectorExpr f;  ///< body load
  std::optional<TensorExpr> chi;  ///< safe-load stress field
  double delta = 0.0;
  double div_tol = 1e-8;
  SymTensor2 p0;

  std::filesystem::path out_dir = "out";
  bool dump_fields = true;
  double margin = 0.15;
  DiagnosticToggles diag;

  double dt() const { return T / n_steps; }
  double time(int step) const { return T * step / n_steps; }
  Mesh build_mesh() const;
  /// Throws ScenarioError on the first violated invariant.
  void validate() const;
};

/// `base_dir` resolves a relative mesh file path.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace perzyna
