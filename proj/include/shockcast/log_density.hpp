#pragma once

#include <Eigen/Core>

namespace shockcast {

// A differentiable unnormalized log density over an unconstrained vector.
class LogDensity {
 public:
  virtual ~LogDensity() = default;
  virtual int dim() const = 0;
  // Returns false for a divergent (non-finite) evaluation; lp is then -inf
  // and the caller must treat the proposal as rejected.
  virtual bool value_and_gradient(const Eigen::VectorXd& theta, double& lp,
                                  Eigen::VectorXd& grad) const = 0;
};

}  // namespace shockcast
