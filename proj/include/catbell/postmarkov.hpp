#pragma once

// Post-Markovian (memory-kernel) thermal dissipation of the qubit with k(t) = gamma e^{-gamma t}.
// |up> is the sigma_z = +1 excited state and sigma_- = |down><up|.

#include <Eigen/Dense>

#include <array>
#include <string>

#include "catbell/correlation_model.hpp"
#include "catbell/types.hpp"

namespace catbell {

struct PostMarkovParams {
  /// Markovian dissipation rate.
  double gamma0 = 1.0;
  /// Memory-kernel rate.
  double gamma = 0.1;
  double nbar = 0.0;

  void validate() const;
};

struct DampingBasis {
  std::array<Eigen::Matrix2cd, 4> q;
  std::array<double, 4> lambda{};
};

DampingBasis damping_basis(const PostMarkovParams& p);

/// Markovian Liouvillian applied to a 2x2 operator.
Eigen::Matrix2cd liouvillian(const Eigen::Matrix2cd& rho, const PostMarkovParams& p);

/// The same map as a 4x4 matrix acting on column-major vec(rho).
Eigen::Matrix4cd liouvillian_superoperator(const PostMarkovParams& p);

/// Coefficients of x in the damping basis: x = sum_k alpha_k Q_k.
Eigen::Vector4cd damping_coordinates(const Eigen::Matrix2cd& x, const PostMarkovParams& p);

/// alpha_k(t) / alpha_k(0) for basis index k in 0..3 at physical time t.
double kernel_coefficient(int k, double t, const PostMarkovParams& p);

/// Lambda_t(x) for an arbitrary 2x2 operator.
Eigen::Matrix2cd evolve_operator(const Eigen::Matrix2cd& x, double t, const PostMarkovParams& p);

/// Lambda_t(|i><j|).
Eigen::Matrix2cd evolve_spin_block(Spin i, Spin j, double t, const PostMarkovParams& p);

/// sum_ij |i><j| (x) Lambda_t(|i><j|) in the (up, down) x (up, down) basis.
Eigen::Matrix4cd choi_matrix(double t, const PostMarkovParams& p);

/// Correlation model with t = tau_sl = gamma0 t_phys.
class PostMarkovModel final : public CorrelationModel {
 public:
  PostMarkovModel(PostMarkovParams p, CatState cat);

  Eigen::Vector2d spin_components(cdouble beta, double tau_sl) const override;
  std::string describe() const override;

 private:
  PostMarkovParams params_;
  CatState cat_;
};

}  // namespace catbell
