#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "catbell/phase_space.hpp"

namespace catbell {

using cdouble = std::complex<double>;

enum class Spin : int { up = 0, down = 1 };

/// (|up, D> + |down, -D>)/sqrt(2) with real amplitude D.
struct CatState {
  double amplitude = 2.0;

  cdouble xi(Spin s) const { return s == Spin::up ? cdouble(amplitude) : cdouble(-amplitude); }
  cdouble xi(int s) const { return xi(static_cast<Spin>(s)); }
  double overlap() const { return std::exp(-2.0 * amplitude * amplitude); }
};

/// Spin direction theta in the x-z plane and displacement beta of the parity probe.
struct MeasurementSetting {
  double theta = 0.0;
  cdouble beta{0.0, 0.0};
};

/// The quadruple {beta, theta; beta', theta'} entering the CHSH combination.
struct BellSettings {
  MeasurementSetting unprimed;
  MeasurementSetting primed;
};

/// sigma(theta) = sin(theta) sigma_x + cos(theta) sigma_z in the (up, down) basis.
inline Eigen::Matrix2d sigma_theta(double theta) {
  Eigen::Matrix2d s;
  s << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return s;
}

}  // namespace catbell
