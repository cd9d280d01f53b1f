#pragma once

// Brute-force reference calculations in truncated Fock space. Deliberately simple and slow;
// nothing here reuses the closed forms it is meant to check.

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "catbell/brownian.hpp"
#include "catbell/postmarkov.hpp"
#include "catbell/types.hpp"

namespace catbell {

/// Joint spin (x) oscillator operator; row/column index = spin * cutoff + n with spin 0 = up.
struct FockOperator {
  Eigen::MatrixXcd m;
  int cutoff = 0;

  Eigen::MatrixXcd block(int i, int j) const { return m.block(i * cutoff, j * cutoff, cutoff, cutoff); }
};

/// Health of a density matrix.
struct StateCheck {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

StateCheck check_state(const FockOperator& rho);

/// Annihilation operator on the first n Fock states.
Eigen::MatrixXcd annihilation(int n);

/// Truncated, renormalized cat state; requires n > D^2 + 10 D.
FockOperator truncated_cat(double amplitude, int cutoff);

/// Dense <m| Pi(beta) |n> on the first n Fock states.
Eigen::MatrixXcd parity_operator(cdouble beta, int cutoff);

/// Tr[(sigma(theta) (x) Pi(beta)) rho].
double expectation_sigma_parity(const FockOperator& rho, double theta, cdouble beta);

/// Same, with a precomputed dense parity operator.
double expectation_sigma_parity(const FockOperator& rho, double theta, const Eigen::MatrixXcd& parity);

enum class KrausChannel { amplitude_damping, phase_damping };
enum class KrausTarget { spin, cv };

/// Operator-sum application. param is eta for amplitude damping and tau_pd for phase damping.
FockOperator evolve_kraus(const FockOperator& rho, KrausChannel channel, KrausTarget target, double param);

/// Classic RK4 of the Brownian master equation (r(t) dropped) on the oscillator factor from t = 0
/// to physical time t_end. The run is repeated with half the steps and must agree to 1e-7.
FockOperator evolve_brownian_rk4(const FockOperator& rho, const BrownianParams& p, double t_end, int steps);

/// States at each of the nondecreasing physical times, from one RK4 run whose step is halved
/// from `initial_step` until every snapshot moves by less than 1e-7.
std::vector<FockOperator> evolve_brownian_snapshots(const FockOperator& rho, const BrownianParams& p,
                                                    const std::vector<double>& times, double initial_step = 0.02,
                                                    double min_step = 1e-5);

FockOperator evolve_brownian_converged(const FockOperator& rho, const BrownianParams& p, double t_end);

/// Trapezoidal solution of the four memory-kernel equations d alpha_k/dt = int_0^t k(s) lambda_k
/// e^{lambda_k s} alpha_k(t - s) ds with a fixed step.
Eigen::Vector4cd evolve_volterra(const Eigen::Vector4cd& alpha0, const PostMarkovParams& p, double t_end,
                                 double step);

/// Halves the step from 1/(20 x fastest rate) and Richardson-combines successive halvings until
/// two extrapolants agree to `tolerance`.
Eigen::Vector4cd evolve_volterra_converged(const Eigen::Vector4cd& alpha0, const PostMarkovParams& p,
                                           double t_end, double tolerance = 1e-8);

/// Post-Markovian map on a 2x2 operator from the equivalent Markovian embedding
/// d rho/dt = L y, dy/dt = gamma rho + (L - gamma) y, integrated by matrix exponential.
Eigen::Matrix2cd postmarkov_embedding_evolve(const Eigen::Matrix2cd& x, double t, const PostMarkovParams& p);

/// Applies a spin map (given on the four unit blocks) to the spin factor of a joint operator.
FockOperator apply_spin_map(const FockOperator& rho, const std::array<Eigen::Matrix2cd, 4>& images);

/// Reduced spin state after joint evolution with the star, H = sum_k sigma_z (x) sigma_z,k,
/// star maximally mixed; exact matrix exponential over 2^{n_spins + 1} dimensions (n_spins <= 8).
Eigen::Matrix2cd spinstar_reduced_map(const Eigen::Matrix2cd& x, double tau_s, int n_spins);

/// Trace distance of |+>, |-> after spin-star dephasing, from eigenvalues of the difference.
double trace_distance_oracle(double tau_s, int n_spins);

/// <s| D(beta) |r> from exp(beta a^dag - conj(beta) a) truncated at `cutoff` levels.
Eigen::MatrixXcd displacement_expm(cdouble beta, int cutoff);

}  // namespace catbell
