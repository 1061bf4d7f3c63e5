#pragma once

#include <span>
#include <vector>

#include "perzyna/convex_kernel.hpp"
#include "perzyna/fem2d.hpp"
#include "perzyna/material_point.hpp"

/**
 * @file kernels.hpp
 * @brief Element loops of the global Newton iteration.
 *
 * Each kernel has a serial reference version and an OpenMP version. Both call
 * the same per-element routine, so their outputs are bitwise identical; the
 * serial one is kept for testing and benchmarking.
 */

namespace perzyna::kernels {

enum class Constitutive {
  perzyna,           ///< backward-Euler Perzyna update with consistent tangent
  rate_independent,  ///< sigma = Dg(E - p_old), damped Hessian of g
  frozen_plastic,    ///< linear elasticity with p held at p_old
};

struct PointBatch {
  std::span<const SymTensor2> strain;
  std::span<const SymTensor2> p_old;
  double dt = 1.0;
  double eps = 1.0;
  Constitutive model = Constitutive::perzyna;
  double damping = 0.0;  ///< only used by rate_independent
};

struct PointResults {
  std::vector<PointUpdate> updates;
  std::vector<TensorMap> tangents;
};

/// The per-element routine shared by both variants.
void update_point(int i, const PointBatch& in, const MaterialParams& params, PointResults& out);

namespace serial {
void update_points(const PointBatch& in, const MaterialParams& params, PointResults& out);
void element_contributions(const Mesh& mesh, std::span<const SymTensor2> stress, std::span<const TensorMap> tangents,
                           std::span<ElementContribution> out);
}  // namespace serial

namespace omp {
void update_points(const PointBatch& in, const MaterialParams& params, PointResults& out);
void element_contributions(const Mesh& mesh, std::span<const SymTensor2> stress, std::span<const TensorMap> tangents,
                           std::span<ElementContribution> out);
int max_threads();
}  // namespace omp

}  // namespace perzyna::kernels
