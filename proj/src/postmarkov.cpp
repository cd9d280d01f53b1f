#include "catbell/postmarkov.hpp"

#include <cmath>
#include <sstream>

#include "catbell/error.hpp"
#include "catbell/phase_space.hpp"

namespace catbell {

namespace {

Eigen::Matrix2cd sigma_plus() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(0, 1) = 1.0;
  return s;
}

Eigen::Matrix2cd sigma_minus() { return sigma_plus().transpose(); }

Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(0, 0) = 1.0;
  s(1, 1) = -1.0;
  return s;
}

Eigen::Matrix2cd unit_block(Spin i, Spin j) {
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
  e(static_cast<int>(i), static_cast<int>(j)) = 1.0;
  return e;
}

}  // namespace

void PostMarkovParams::validate() const {
  if (!(gamma0 > 0.0) || !(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "PostMarkovParams: rates must be > 0");
  if (!(nbar >= 0.0)) throw Error(ErrorCode::invalid_argument, "PostMarkovParams: nbar must be >= 0");
}

DampingBasis damping_basis(const PostMarkovParams& p) {
  p.validate();
  DampingBasis b;
  b.q[0] = 0.5 * (Eigen::Matrix2cd::Identity() - sigma_z() / (2.0 * p.nbar + 1.0));
  b.q[1] = sigma_z();
  b.q[2] = sigma_plus();
  b.q[3] = sigma_minus();
  const double half_rate = p.gamma0 * (p.nbar + 0.5);
  b.lambda = {0.0, -2.0 * half_rate, -half_rate, -half_rate};
  return b;
}

Eigen::Matrix2cd liouvillian(const Eigen::Matrix2cd& rho, const PostMarkovParams& p) {
  const Eigen::Matrix2cd sp = sigma_plus();
  const Eigen::Matrix2cd sm = sigma_minus();
  const Eigen::Matrix2cd pm = sp * sm;
  const Eigen::Matrix2cd mp = sm * sp;
  return p.gamma0 * (p.nbar + 1.0) * (sm * rho * sp - 0.5 * (pm * rho + rho * pm)) +
         p.gamma0 * p.nbar * (sp * rho * sm - 0.5 * (mp * rho + rho * mp));
}

Eigen::Matrix4cd liouvillian_superoperator(const PostMarkovParams& p) {
  Eigen::Matrix4cd l;
  for (int col = 0; col < 4; ++col) {
    Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
    e(col % 2, col / 2) = 1.0;
    const Eigen::Matrix2cd image = liouvillian(e, p);
    l.col(col) = Eigen::Map<const Eigen::Vector4cd>(image.data());
  }
  return l;
}

Eigen::Vector4cd damping_coordinates(const Eigen::Matrix2cd& x, const PostMarkovParams& p) {
  const cdouble trace = x.trace();
  const cdouble z = (sigma_z() * x).trace();
  return {trace, 0.5 * z + trace / (2.0 * (2.0 * p.nbar + 1.0)), x(0, 1), x(1, 0)};
}

double kernel_coefficient(int k, double t, const PostMarkovParams& p) {
  if (k < 0 || k > 3) throw Error(ErrorCode::invalid_index, "kernel_coefficient: basis index outside 0..3");
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "kernel_coefficient: t must be >= 0");
  const double lambda = damping_basis(p).lambda[k];
  const double g = p.gamma;
  // Inverse Laplace transform of (s - lambda + g) / ((s - lambda)(s + g)).
  const double sum = g + lambda;
  if (std::abs(sum) <= 1e-12 * std::max(g, std::abs(lambda))) return (1.0 + g * t) * std::exp(-g * t);
  return (g * std::exp(lambda * t) + lambda * std::exp(-g * t)) / sum;
}

Eigen::Matrix2cd evolve_operator(const Eigen::Matrix2cd& x, double t, const PostMarkovParams& p) {
  const DampingBasis basis = damping_basis(p);
  const Eigen::Vector4cd alpha = damping_coordinates(x, p);
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int k = 0; k < 4; ++k) out += alpha(k) * kernel_coefficient(k, t, p) * basis.q[k];
  return out;
}

Eigen::Matrix2cd evolve_spin_block(Spin i, Spin j, double t, const PostMarkovParams& p) {
  return evolve_operator(unit_block(i, j), t, p);
}

Eigen::Matrix4cd choi_matrix(double t, const PostMarkovParams& p) {
  Eigen::Matrix4cd choi = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      choi.block<2, 2>(2 * i, 2 * j) = evolve_spin_block(static_cast<Spin>(i), static_cast<Spin>(j), t, p);
    }
  }
  return choi;
}

PostMarkovModel::PostMarkovModel(PostMarkovParams p, CatState cat) : params_(p), cat_(cat) { params_.validate(); }

Eigen::Vector2d PostMarkovModel::spin_components(cdouble beta, double tau_sl) const {
  const double t = tau_sl / params_.gamma0;
  Eigen::Matrix2cd sx;
  sx << 0.0, 1.0, 1.0, 0.0;
  const Eigen::Matrix2cd sz = sigma_z();
  cdouble x = 0.0;
  cdouble z = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Spin si = static_cast<Spin>(i);
      const Spin sj = static_cast<Spin>(j);
      const Eigen::Matrix2cd block = evolve_spin_block(si, sj, t, params_);
      const cdouble parity = displaced_parity_coherent(beta, cat_.xi(si), cat_.xi(sj));
      x += 0.5 * (sx * block).trace() * parity;
      z += 0.5 * (sz * block).trace() * parity;
    }
  }
  return {x.real(), z.real()};
}

std::string PostMarkovModel::describe() const {
  std::ostringstream os;
  os << "postmarkov(gamma0=" << params_.gamma0 << ", gamma=" << params_.gamma << ", nbar=" << params_.nbar
     << ", D=" << cat_.amplitude << ")";
  return os.str();
}

}  // namespace catbell
