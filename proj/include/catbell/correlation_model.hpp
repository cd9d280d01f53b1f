#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

#include "catbell/types.hpp"

namespace catbell {

/// Uniform "C(beta, theta) at dynamical parameter t" interface shared by every channel.
///
/// Every model is linear in sigma(theta), so it is enough to expose the two spin components
/// (<sigma_x (x) Pi(beta)>, <sigma_z (x) Pi(beta)>); the correlation is then
/// sin(theta) * x + cos(theta) * z. Implementations must be safe to call concurrently.
class CorrelationModel {
 public:
  virtual ~CorrelationModel() = default;

  virtual Eigen::Vector2d spin_components(cdouble beta, double t) const = 0;

  /// Channel name and parameters, e.g. "spinstar(n_spins=5, D=2)".
  virtual std::string describe() const = 0;

  double correlation(const MeasurementSetting& s, double t) const {
    const Eigen::Vector2d v = spin_components(s.beta, t);
    return std::sin(s.theta) * v(0) + std::cos(s.theta) * v(1);
  }
};

/// Adapts a callable to the model interface; handy for synthetic families in tests.
class FunctionModel final : public CorrelationModel {
 public:
  using Components = std::function<Eigen::Vector2d(cdouble, double)>;

  FunctionModel(Components f, std::string name) : f_(std::move(f)), name_(std::move(name)) {}

  Eigen::Vector2d spin_components(cdouble beta, double t) const override { return f_(beta, t); }
  std::string describe() const override { return name_; }

 private:
  Components f_;
  std::string name_;
};

}  // namespace catbell
