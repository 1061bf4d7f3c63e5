#pragma once

#include <stdexcept>
#include <string>

namespace perzyna {

/// Base of every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonlinear solve exhausted its iteration budget.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Global equilibrium iteration failed within one time step.
class StepNonConvergence : public NonConvergence {
 public:
  StepNonConvergence(const std::string& what, double last_residual, int step)
      : NonConvergence(what, last_residual), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// The initial stress violates the yield condition.
class InadmissibleInitialState : public Error {
 public:
  InadmissibleInitialState(const std::string& what, int element, double gap)
      : Error(what), element_(element), gap_(gap) {}
  int element() const { return element_; }
  double gap() const { return gap_; }

 private:
  int element_;
  double gap_;
};

class SingularTangent : public Error {
 public:
  using Error::Error;
};

class MeshInvalid : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

class EmptyInterior : public Error {
 public:
  using Error::Error;
};

class EmptyProbeSet : public Error {
 public:
  using Error::Error;
};

class InfiniteDissipation : public Error {
 public:
  using Error::Error;
};

}  // namespace perzyna
