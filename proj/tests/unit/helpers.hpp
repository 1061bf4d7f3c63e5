#pragma once

#include <sstream>
#include <string>

#include "perzyna/scenario.hpp"

namespace testing_support {

inline perzyna::Scenario scenario_from(const std::string& text, const std::filesystem::path& base = ".") {
  std::istringstream in(text);
  return perzyna::parse_scenario(in, base);
}

/// Unit square, w_x = amp * s(t) y^2 with s ramping 0 -> 1 over [0, T].
inline perzyna::Scenario shear(int n, double T, int n_steps, double eps, double amp = 1.0, double kappa = 1.0) {
  perzyna::Scenario sc;
  sc.mesh = perzyna::RectSpec{n, n, 1.0, 1.0};
  sc.params = perzyna::MaterialParams::make(2.0, 1.0, 0.3, kappa);
  sc.eps = eps;
  sc.T = T;
  sc.n_steps = n_steps;
  sc.w.x.coef = {0, 0, 0, 0, 0, amp};
  sc.w.x.time = perzyna::TimeProfile({{0.0, 0.0}, {T, 1.0}});
  sc.delta = 0.5 * kappa;
  sc.out_dir = "unit_out";
  sc.validate();
  return sc;
}

}  // namespace testing_support
