#include "catbell/spinstar.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "catbell/bell.hpp"
#include "catbell/error.hpp"

namespace catbell {

void SpinStarParams::validate() const {
  if (n_spins < 1) throw Error(ErrorCode::invalid_argument, "SpinStarParams: n_spins must be >= 1");
}

double decoherence_factor(double tau_s, int n_spins) {
  SpinStarParams{n_spins}.validate();
  const double c = std::cos(2.0 * tau_s);
  if (c == 0.0) return 0.0;
  const double magnitude = std::exp(n_spins * std::log(std::abs(c)));
  return (c < 0.0 && n_spins % 2 == 1) ? -magnitude : magnitude;
}

double corr_spinstar(double theta, cdouble beta, double tau_s, const SpinStarParams& p, double amplitude) {
  const double d = amplitude;
  return std::exp(-2.0 * std::norm(beta)) *
         (std::sin(theta) * std::cos(4.0 * d * beta.imag()) * decoherence_factor(tau_s, p.n_spins) +
          kCanonicalSign * std::exp(-2.0 * d * d) * std::cos(theta) * std::sinh(4.0 * d * beta.real()));
}

double trace_distance(double tau_s, int n_spins) { return std::abs(decoherence_factor(tau_s, n_spins)); }

SpinStarModel::SpinStarModel(SpinStarParams p, CatState cat) : params_(p), cat_(cat) { params_.validate(); }

Eigen::Vector2d SpinStarModel::spin_components(cdouble beta, double tau_s) const {
  return {corr_spinstar(0.5 * std::numbers::pi, beta, tau_s, params_, cat_.amplitude),
          corr_spinstar(0.0, beta, tau_s, params_, cat_.amplitude)};
}

std::string SpinStarModel::describe() const {
  std::ostringstream os;
  os << "spinstar(n_spins=" << params_.n_spins << ", D=" << cat_.amplitude << ")";
  return os.str();
}

}  // namespace catbell
