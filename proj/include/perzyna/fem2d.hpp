#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "perzyna/errors.hpp"
#include "perzyna/tensor2d.hpp"

namespace perzyna {

using Vec2 = Eigen::Vector2d;
using NodalVectors = std::vector<Vec2>;
using NodalTensors = std::vector<SymTensor2>;
using ElementTensors = std::vector<SymTensor2>;
using ElementScalars = std::vector<double>;

/// P1 triangulation. Triangles are counterclockwise; shape-function
/// gradients and areas are cached per triangle.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> on_boundary;  ///< per node
  std::vector<int> boundary_nodes;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<double> areas;
  std::vector<std::array<Vec2, 3>> grads;  ///< gradient of each local hat function

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  Vec2 barycenter(int tri) const;
  /// Distance from x to the polygonal boundary.
  double distance_to_boundary(const Vec2& x) const;
};

struct RectSpec {
  int nx = 1;
  int ny = 1;
  double lx = 1.0;
  double ly = 1.0;
};

/// Structured mesh of [0,lx]x[0,ly]; each cell is cut along its
/// lower-left/upper-right diagonal.
Mesh build_rect_mesh(const RectSpec& spec);

/// Validates the topology and fills derived data. Throws MeshInvalid naming
/// the first violated invariant.
Mesh make_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles, std::vector<char> boundary_flags);

/// Line-oriented mesh format:
///   nodes N
///   x y flag      (N lines, flag 1 on the boundary)
///   tris M
///   i j k         (M lines, 0-based, counterclockwise)
/// '#' starts a comment.
Mesh parse_mesh(std::istream& in);
Mesh read_mesh_file(const std::filesystem::path& path);

// Kinematics ------------------------------------------------------------------

/// Symmetric gradient of the P1 interpolant on one triangle.
SymTensor2 element_strain(const Mesh& mesh, int tri, std::span<const Vec2> u);
ElementTensors element_strains(const Mesh& mesh, std::span<const Vec2> u);

/// 3x6 map from local nodal displacements (u0x,u0y,u1x,...) to strain components.
Eigen::Matrix<double, 3, 6> strain_matrix(const Mesh& mesh, int tri);

// Assembly ------------------------------------------------------------------------

/// Numbering of unconstrained degrees of freedom. Every boundary node is
/// constrained in both directions.
struct DofMap {
  std::vector<int> free_index;  ///< 2 entries per node, -1 if constrained
  int num_free = 0;

  static DofMap all_boundary_fixed(const Mesh& mesh);
};

/// Per-element residual and stiffness in local (6-dof) numbering.
struct ElementContribution {
  Eigen::Matrix<double, 6, 1> residual;
  Eigen::Matrix<double, 6, 6> stiffness;
};

struct AssembledSystem {
  NodalVectors residual;                 ///< full nodal residual, constrained rows included
  Eigen::VectorXd residual_free;         ///< restriction to free dofs
  Eigen::SparseMatrix<double> tangent;   ///< free x free
  double residual_sup = 0.0;             ///< sup norm over free dofs
};

/// area * B^T W sigma and area * B^T W D B, with W the Frobenius metric.
ElementContribution element_contribution(const Mesh& mesh, int tri, const SymTensor2& sigma, const TensorMap& tangent);

/// One-point-quadrature load vector: each node of a triangle receives area f(bary)/3.
NodalVectors load_vector(const Mesh& mesh, std::span<const Vec2> f_bary);

/**
 * Scatters element contributions: residual_i = sum_e area sigma:E(phi_i) -
 * int f phi_i, tangent restricted to free dofs (symmetric elimination of the
 * Dirichlet rows and columns). The scatter runs serially in element order so
 * the result does not depend on how the contributions were computed.
 */
AssembledSystem assemble(const Mesh& mesh, const DofMap& dofs, std::span<const ElementContribution> contributions,
                         std::span<const Vec2> load);

/// Convenience wrapper computing element contributions serially.
AssembledSystem assemble(const Mesh& mesh, const DofMap& dofs, std::span<const SymTensor2> stress,
                         std::span<const TensorMap> tangents, std::span<const Vec2> f_bary);

/// Sparse LDL^T solve. Throws SingularTangent if the factorization fails.
Eigen::VectorXd solve_symmetric(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs);

// Post-processing -----------------------------------------------------------------

/// Area-weighted average of the adjacent element values (lumped L2 projection).
NodalTensors recover_nodal_stress(const Mesh& mesh, std::span<const SymTensor2> element_values);

/// Gradient of the P1 interpolant of a nodal tensor field on one triangle:
/// (d/dx, d/dy).
std::array<SymTensor2, 2> nodal_gradient(const Mesh& mesh, int tri, std::span<const SymTensor2> nodal);

/// sqrt(sum area |grad sigma_h|^2) over triangles whose barycenter lies at
/// least `margin` from the boundary. Throws EmptyInterior if none qualify.
double h1_seminorm_interior(const Mesh& mesh, std::span<const SymTensor2> nodal, double margin);

/// L2 norm of an element-constant tensor field.
double l2_norm(const Mesh& mesh, std::span<const SymTensor2> values);

}  // namespace perzyna
