#pragma once

// Quantum Brownian motion of the oscillator (weak coupling, Ohmic bath with cutoff, high
// temperature, r(t) dropped). Units: omega_O sets the clock, tau = omega_c t = x omega_O t.

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include "catbell/correlation_model.hpp"
#include "catbell/phase_space.hpp"
#include "catbell/types.hpp"

namespace catbell {

struct BrownianParams {
  double g = 0.3;
  /// omega_c / omega_O
  double x = 10.0;
  /// k_B T / (hbar omega_c)
  double kT = 25.0;
  double omega_O = 1.0;
  /// Keep exp(-Gamma) factors instead of the short-time setting exp(+-Gamma) = 1.
  bool include_gamma_integral = false;

  double omega_c() const { return x * omega_O; }
  void validate() const;
};

/// (Delta, Xi, gamma) at a given tau.
struct BrownianCoefficients {
  double delta = 0.0;
  double xi = 0.0;
  double gamma = 0.0;
};

BrownianCoefficients coefficients(double tau, const BrownianParams& p);

struct QuadratureConfig {
  /// Absolute tolerance per entry of the integrated matrix.
  double tolerance = 1e-10;
  /// Width of the fixed panels handed to the adaptive rule, in units of 1/omega_O.
  double panel_width = 1.0;
  int max_depth = 20;
};

struct PropagatedState {
  double time = 0.0;
  /// omega_O t; R(t) = [[cos, sin], [-sin, cos]].
  double angle = 0.0;
  Eigen::Matrix2d wbar = Eigen::Matrix2d::Zero();
  double big_gamma = 0.0;

  Eigen::Matrix2d rotation() const;
};

/// Diffusion matrix M(s) = [[2 Delta, -Xi], [-Xi, 0]] at physical time s.
Eigen::Matrix2d diffusion_matrix(double s, const BrownianParams& p);

/// Gamma(t) = 2 int_0^t gamma(s) ds at physical time t.
double gamma_integral(double t, const BrownianParams& p, const QuadratureConfig& q = {});

/// R(t), W-bar(t) and Gamma(t) at physical time t.
PropagatedState propagate(double t, const BrownianParams& p, const QuadratureConfig& q = {});

/// Weyl kernel of the evolved block |xi_i><xi_j|.
Kernel evolved_block_kernel(Spin i, Spin j, const PropagatedState& st, const CatState& cat);

/// Correlation model with t = tau = omega_c t_phys.
class BrownianModel final : public CorrelationModel {
 public:
  BrownianModel(BrownianParams p, CatState cat, QuadratureConfig q = {});

  Eigen::Vector2d spin_components(cdouble beta, double tau) const override;
  std::string describe() const override;

  const BrownianParams& params() const { return params_; }

 private:
  struct Blocks {
    Kernel up_up;
    Kernel down_down;
    Kernel up_down;
  };

  std::shared_ptr<const Blocks> blocks_at(double tau) const;

  BrownianParams params_;
  CatState cat_;
  QuadratureConfig quadrature_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, std::shared_ptr<const Blocks>> cache_;
};

}  // namespace catbell
