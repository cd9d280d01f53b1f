#pragma once

// Central qubit dephased by a star of N_s spins, H = A sum_k sigma_z (x) sigma_z,k, star prepared
// maximally mixed. tau_s = A t.

#include <string>

#include "catbell/correlation_model.hpp"
#include "catbell/types.hpp"

namespace catbell {

struct SpinStarParams {
  int n_spins = 2;

  void validate() const;
};

/// [cos 2 tau_s]^{N_s}, evaluated in the log domain.
double decoherence_factor(double tau_s, int n_spins);

double corr_spinstar(double theta, cdouble beta, double tau_s, const SpinStarParams& p, double amplitude);

/// |cos 2 tau_s|^{N_s}: trace distance of the evolved equatorial pair |+>, |->.
double trace_distance(double tau_s, int n_spins);

/// Correlation model with t = tau_s.
class SpinStarModel final : public CorrelationModel {
 public:
  SpinStarModel(SpinStarParams p, CatState cat);

  Eigen::Vector2d spin_components(cdouble beta, double tau_s) const override;
  std::string describe() const override;

 private:
  SpinStarParams params_;
  CatState cat_;
};

}  // namespace catbell
