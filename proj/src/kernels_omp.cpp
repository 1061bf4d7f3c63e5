#include <exception>
#include <vector>

#include <omp.h>

#include "perzyna/kernels.hpp"

namespace perzyna::kernels::omp {

namespace {

/// Rethrows the parked exception with the lowest element index.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

void update_points(const PointBatch& in, const MaterialParams& params, PointResults& out) {
  const int n = static_cast<int>(in.strain.size());
  out.updates.resize(n);
  out.tangents.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      update_point(i, in, params, out);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
}

void element_contributions(const Mesh& mesh, std::span<const SymTensor2> stress, std::span<const TensorMap> tangents,
                           std::span<ElementContribution> out) {
  const int n = mesh.num_triangles();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n; ++t) out[t] = element_contribution(mesh, t, stress[t], tangents[t]);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace perzyna::kernels::omp
