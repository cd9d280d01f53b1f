#pragma once

// Markovian amplitude- and phase-damping benchmarks acting on the spin or on the oscillator.
//
// The closed forms below are written for the canonical orientation (|up> carries +D, see
// kCanonicalSign). They accept complex beta; for real beta they reduce to the usual
// "D, beta real" expressions with beta -> -beta.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "catbell/correlation_model.hpp"
#include "catbell/types.hpp"

namespace catbell {

/// eta = exp(-gamma t); the probability of losing an excitation is P_AD = sqrt(1 - eta).
struct AdParams {
  double eta = 1.0;

  static AdParams from_probability(double p_ad);
  double probability() const;
};

/// tau_pd = mu t; the scattering probability is P_PD = sqrt(1 - exp(-tau_pd^2)).
struct PdParams {
  double tau_pd = 0.0;

  static PdParams from_probability(double p_pd);
  double probability() const;
  /// exp(-tau_pd^2 / 2), robust at P_PD = 1.
  double coherence_factor() const;
};

/// Truncation of the phase-damped oscillator triple sums.
struct PdCvTruncation {
  int n_max = 40;
  /// Kraus-index cutoff; 0 picks one from n_max and tau_pd.
  int k_max = 0;
  double tolerance = 1e-9;
};

/// k-th amplitude-damping Kraus operator on a d-level system.
Eigen::MatrixXd ad_kraus(int d, int k, double eta);

/// k-th phase-damping Kraus operator (diagonal) on a d-level system.
Eigen::MatrixXd pd_kraus(int d, int k, double tau_pd);

/// Smallest Kraus cutoff K with || sum_{k<=K} A_k^T A_k - 1 ||_max <= tolerance for phase damping.
int pd_kraus_cutoff(int d, double tau_pd, double tolerance = 1e-12);

/// || sum_k A_k^dag A_k - 1 ||_max.
double kraus_completeness_residual(const std::vector<Eigen::MatrixXd>& kraus);

double corr_ad_spin(cdouble beta, double theta, double eta, double amplitude);
double corr_ad_cv(cdouble beta, double theta, double eta, double amplitude);
double corr_pd_spin(cdouble beta, double theta, double tau_pd, double amplitude);

/// One term of the parity-eigenbasis expansion of <m| D(b) (-1)^n D^dag(b) |n>: the pair
/// (2k, 2k+1) contribution <m|D|2k><2k|D^dag|n> - <m|D|2k+1><2k+1|D^dag|n>, evaluated with
/// the closed Laguerre product selected by the ordering of m, n relative to 2k.
cdouble parity_pair_term(int m, int n, int k, cdouble beta);

/// <m| Pi(beta) |n> summed pairwise over parity_pair_term.
cdouble parity_matrix_element_pairwise(int m, int n, cdouble beta, double tolerance = 1e-12);

/// Phase-damped oscillator correlation from the Kraus-index / Fock triple sum.
double corr_pd_cv(cdouble beta, double theta, double tau_pd, double amplitude, const PdCvTruncation& trunc = {});

/// Same quantity via the phase-averaged coherent mixture: Fock dephasing by
/// exp(-(n-m)^2 tau^2/2) is a Gaussian average over oscillator phase rotations.
Eigen::Vector2d pd_cv_components_phase_average(cdouble beta, double tau_pd, double amplitude);
double corr_pd_cv_phase_average(cdouble beta, double theta, double tau_pd, double amplitude);

/// Channel-on-target models; the dynamical parameter t is the channel probability P in [0, 1].
class AdSpinModel final : public CorrelationModel {
 public:
  explicit AdSpinModel(CatState cat) : cat_(cat) {}
  Eigen::Vector2d spin_components(cdouble beta, double p_ad) const override;
  std::string describe() const override;

 private:
  CatState cat_;
};

class AdCvModel final : public CorrelationModel {
 public:
  explicit AdCvModel(CatState cat) : cat_(cat) {}
  Eigen::Vector2d spin_components(cdouble beta, double p_ad) const override;
  std::string describe() const override;

 private:
  CatState cat_;
};

class PdSpinModel final : public CorrelationModel {
 public:
  explicit PdSpinModel(CatState cat) : cat_(cat) {}
  Eigen::Vector2d spin_components(cdouble beta, double p_pd) const override;
  std::string describe() const override;

 private:
  CatState cat_;
};

class PdCvModel final : public CorrelationModel {
 public:
  explicit PdCvModel(CatState cat) : cat_(cat) {}
  Eigen::Vector2d spin_components(cdouble beta, double p_pd) const override;
  std::string describe() const override;

 private:
  CatState cat_;
};

}  // namespace catbell
