#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "perzyna/convex_kernel.hpp"

namespace perzyna::selftest {

/// Outcome of one randomized property over all samples. `worst` is the
/// largest normalized error seen; the property holds when worst <= tol.
struct PropertyResult {
  std::string name;
  long samples = 0;
  long skipped = 0;  ///< samples rejected by the property's precondition
  double worst = 0.0;
  double tol = 0.0;
  bool pass() const { return worst <= tol; }
  std::string summary() const;
};

struct Options {
  std::uint64_t seed = 42;
  long count = 10000;
};

/// Material parameter sets cycled through by the battery; the third one has
/// alpha just below 1/sqrt(2).
std::vector<MaterialParams> parameter_sets();

/// Random tensor with entries uniform in [-1, 1] times a log-uniform scale in [lo, hi].
SymTensor2 random_tensor(std::mt19937_64& rng, double lo, double hi);
/// Random point of K, biased toward the yield surface.
SymTensor2 random_point_in_K(std::mt19937_64& rng, const MaterialParams& p);

std::vector<PropertyResult> kernel_properties(const Options& opts);
std::vector<PropertyResult> material_point_properties(const Options& opts);

}  // namespace perzyna::selftest
