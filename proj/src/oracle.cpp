#include "catbell/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "catbell/error.hpp"
#include "catbell/markov.hpp"
#include "catbell/phase_space.hpp"

namespace catbell {

namespace {

using Matrix = Eigen::MatrixXcd;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Banded products with a and a^dag in O(n^2).
Matrix a_left(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix out = Matrix::Zero(n, x.cols());
  for (Eigen::Index m = 0; m + 1 < n; ++m) out.row(m) = std::sqrt(double(m + 1)) * x.row(m + 1);
  return out;
}

Matrix adag_left(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix out = Matrix::Zero(n, x.cols());
  for (Eigen::Index m = 1; m < n; ++m) out.row(m) = std::sqrt(double(m)) * x.row(m - 1);
  return out;
}

Matrix a_right(const Matrix& x) {
  const Eigen::Index n = x.cols();
  Matrix out = Matrix::Zero(x.rows(), n);
  for (Eigen::Index k = 1; k < n; ++k) out.col(k) = std::sqrt(double(k)) * x.col(k - 1);
  return out;
}

Matrix adag_right(const Matrix& x) {
  const Eigen::Index n = x.cols();
  Matrix out = Matrix::Zero(x.rows(), n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) out.col(k) = std::sqrt(double(k + 1)) * x.col(k + 1);
  return out;
}

const double kRootHalf = std::sqrt(0.5);
const cdouble kI(0.0, 1.0);

Matrix q_left(const Matrix& x) { return kRootHalf * (a_left(x) + adag_left(x)); }
Matrix q_right(const Matrix& x) { return kRootHalf * (a_right(x) + adag_right(x)); }
Matrix p_left(const Matrix& x) { return -kI * kRootHalf * (a_left(x) - adag_left(x)); }
Matrix p_right(const Matrix& x) { return -kI * kRootHalf * (a_right(x) - adag_right(x)); }

/// Brownian generator on one oscillator block at physical time t.
Matrix brownian_generator(const Matrix& x, double t, const BrownianParams& p) {
  const BrownianCoefficients v = coefficients(p.omega_c() * t, p);
  const Eigen::Index n = x.rows();
  Matrix out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < n; ++m) out(m, k) = -kI * p.omega_O * double(m - k) * x(m, k);
  }
  const Matrix qx = q_left(x) - q_right(x);
  out -= v.delta * (q_left(qx) - q_right(qx));
  const Matrix px = p_left(x) - p_right(x);
  out += v.xi * (q_left(px) - q_right(px));
  if (p.include_gamma_integral) {
    const Matrix anti = p_left(x) + p_right(x);
    out -= kI * v.gamma * (q_left(anti) - q_right(anti));
  }
  return out;
}

Matrix brownian_joint_generator(const Matrix& rho, int cutoff, double t, const BrownianParams& p) {
  Matrix out(rho.rows(), rho.cols());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block(i * cutoff, j * cutoff, cutoff, cutoff) =
          brownian_generator(rho.block(i * cutoff, j * cutoff, cutoff, cutoff), t, p);
    }
  }
  return out;
}

void rk4_advance(FockOperator& state, const BrownianParams& p, double t_start, double t_stop, int steps) {
  const double h = (t_stop - t_start) / steps;
  const int n = state.cutoff;
  for (int s = 0; s < steps; ++s) {
    const double t = t_start + s * h;
    const Matrix k1 = brownian_joint_generator(state.m, n, t, p);
    const Matrix k2 = brownian_joint_generator(state.m + 0.5 * h * k1, n, t + 0.5 * h, p);
    const Matrix k3 = brownian_joint_generator(state.m + 0.5 * h * k2, n, t + 0.5 * h, p);
    const Matrix k4 = brownian_joint_generator(state.m + h * k3, n, t + h, p);
    state.m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    state.m = (0.5 * (state.m + state.m.adjoint())).eval();
  }
}

std::vector<FockOperator> rk4_snapshots(const FockOperator& rho, const BrownianParams& p,
                                        const std::vector<double>& times, double max_step) {
  std::vector<FockOperator> out;
  FockOperator state = rho;
  double now = 0.0;
  for (double t : times) {
    if (t > now) {
      rk4_advance(state, p, now, t, std::max(1, static_cast<int>(std::ceil((t - now) / max_step))));
      now = t;
    }
    out.push_back(state);
  }
  return out;
}

void require_completeness(const std::vector<Eigen::MatrixXd>& kraus) {
  const double residual = kraus_completeness_residual(kraus);
  if (!(residual < 1e-10)) {
    std::ostringstream os;
    os << "evolve_kraus: completeness residual " << residual;
    throw Error(ErrorCode::completeness_violated, os.str());
  }
}

}  // namespace

StateCheck check_state(const FockOperator& rho) {
  StateCheck c;
  c.trace_error = std::abs(rho.m.trace() - 1.0);
  c.hermiticity_error = (rho.m - rho.m.adjoint()).cwiseAbs().maxCoeff();
  const Matrix hermitian = 0.5 * (rho.m + rho.m.adjoint());
  c.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(hermitian, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return c;
}

Eigen::MatrixXcd annihilation(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

FockOperator truncated_cat(double amplitude, int cutoff) {
  const double d = amplitude;
  if (!(cutoff > d * d + 10.0 * std::abs(d))) {
    throw Error(ErrorCode::cutoff_too_small, "truncated_cat: cutoff must exceed D^2 + 10 D");
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * cutoff);
  double kept = 0.0;
  for (int n = 0; n < cutoff; ++n) {
    double c = 0.0;
    if (n == 0) {
      c = std::exp(-0.5 * d * d);
    } else if (d != 0.0) {
      c = std::exp(-0.5 * d * d + n * std::log(std::abs(d)) - 0.5 * std::lgamma(n + 1.0));
    }
    kept += c * c;
    psi(n) = c;                                        // |up, D>
    psi(cutoff + n) = (n % 2 == 0 || d == 0.0) ? c : -c;  // |down, -D>
  }
  if (!(1.0 - kept < 1e-10)) throw Error(ErrorCode::cutoff_too_small, "truncated_cat: coherent tail above 1e-10");
  psi /= psi.norm();
  return FockOperator{psi * psi.adjoint(), cutoff};
}

Eigen::MatrixXcd parity_operator(cdouble beta, int cutoff) {
  Matrix pi(cutoff, cutoff);
  for (int m = 0; m < cutoff; ++m) {
    for (int n = m; n < cutoff; ++n) {
      pi(m, n) = displaced_parity_fock<double>(m, n, beta);
      pi(n, m) = std::conj(pi(m, n));
    }
  }
  return pi;
}

double expectation_sigma_parity(const FockOperator& rho, double theta, const Eigen::MatrixXcd& parity) {
  const Eigen::Matrix2d sigma = sigma_theta(theta);
  cdouble total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (sigma(i, j) == 0.0) continue;
      total += sigma(i, j) * (parity * rho.block(j, i)).trace();
    }
  }
  return total.real();
}

double expectation_sigma_parity(const FockOperator& rho, double theta, cdouble beta) {
  return expectation_sigma_parity(rho, theta, parity_operator(beta, rho.cutoff));
}

FockOperator evolve_kraus(const FockOperator& rho, KrausChannel channel, KrausTarget target, double param) {
  const int n = rho.cutoff;
  const int d = target == KrausTarget::spin ? 2 : n;
  std::vector<Eigen::MatrixXd> kraus;
  if (channel == KrausChannel::amplitude_damping) {
    for (int k = 0; k < d; ++k) kraus.push_back(ad_kraus(d, k, param));
  } else {
    const int k_max = pd_kraus_cutoff(d, param, 1e-13);
    for (int k = 0; k <= k_max; ++k) kraus.push_back(pd_kraus(d, k, param));
  }
  require_completeness(kraus);

  FockOperator out{Matrix::Zero(2 * n, 2 * n), n};
  if (target == KrausTarget::spin) {
    // The Kraus sets are written with level 0 as ground; the spin ground state is |down> (index 1).
    Eigen::Matrix2d swap;
    swap << 0.0, 1.0, 1.0, 0.0;
    for (const auto& a : kraus) {
      const Matrix joint = kron((swap * a * swap).cast<cdouble>(), Matrix::Identity(n, n));
      out.m += joint * rho.m * joint.adjoint();
    }
  } else if (channel == KrausChannel::phase_damping) {
    // Diagonal Kraus operators: A rho A^dag is a Hadamard product with the outer product of diag(A).
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : kraus) weights += a.diagonal() * a.diagonal().transpose();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        out.m.block(i * n, j * n, n, n) = rho.block(i, j).cwiseProduct(weights.cast<cdouble>());
      }
    }
  } else {
    for (const auto& a : kraus) {
      const Matrix joint = kron(Matrix::Identity(2, 2), a.cast<cdouble>());
      out.m += joint * rho.m * joint.adjoint();
    }
  }
  const double drift = std::abs(out.m.trace() - rho.m.trace());
  if (!(drift < 1e-9)) throw Error(ErrorCode::completeness_violated, "evolve_kraus: trace not preserved");
  return out;
}

FockOperator evolve_brownian_rk4(const FockOperator& rho, const BrownianParams& p, double t_end, int steps) {
  p.validate();
  if (!(t_end >= 0.0)) throw Error(ErrorCode::invalid_argument, "evolve_brownian_rk4: t_end must be >= 0");
  if (t_end == 0.0) return rho;
  if (steps < 2) throw Error(ErrorCode::step_count_insufficient, "evolve_brownian_rk4: need at least 2 steps");
  FockOperator fine = rho;
  rk4_advance(fine, p, 0.0, t_end, steps);
  FockOperator coarse = rho;
  rk4_advance(coarse, p, 0.0, t_end, steps / 2);
  const double change = (fine.m - coarse.m).cwiseAbs().maxCoeff();
  if (!(change < 1e-7)) {
    std::ostringstream os;
    os << "evolve_brownian_rk4: halving the step count moves the state by " << change;
    throw Error(ErrorCode::step_count_insufficient, os.str());
  }
  return fine;
}

std::vector<FockOperator> evolve_brownian_snapshots(const FockOperator& rho, const BrownianParams& p,
                                                    const std::vector<double>& times, double initial_step,
                                                    double min_step) {
  p.validate();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || (k > 0 && !(times[k] >= times[k - 1]))) {
      throw Error(ErrorCode::invalid_argument, "evolve_brownian_snapshots: times must be >= 0 and nondecreasing");
    }
  }
  double step = initial_step;
  std::vector<FockOperator> coarse = rk4_snapshots(rho, p, times, step);
  while (step > min_step) {
    step *= 0.5;
    std::vector<FockOperator> fine = rk4_snapshots(rho, p, times, step);
    double change = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) change = std::max(change, (fine[k].m - coarse[k].m).cwiseAbs().maxCoeff());
    if (change < 1e-7) return fine;
    coarse = std::move(fine);
  }
  throw Error(ErrorCode::step_count_insufficient, "evolve_brownian_snapshots: no stable step found");
}

FockOperator evolve_brownian_converged(const FockOperator& rho, const BrownianParams& p, double t_end) {
  return evolve_brownian_snapshots(rho, p, {t_end}).front();
}

Eigen::Vector4cd evolve_volterra(const Eigen::Vector4cd& alpha0, const PostMarkovParams& p, double t_end,
                                 double step) {
  p.validate();
  if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "evolve_volterra: step must be > 0");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::invalid_argument, "evolve_volterra: t_end must be >= 0");
  if (t_end == 0.0) return alpha0;
  const int steps = static_cast<int>(std::ceil(t_end / step));
  const double h = t_end / steps;
  const double half_rate = p.gamma0 * (p.nbar + 0.5);
  const double lambdas[4] = {0.0, -2.0 * half_rate, -half_rate, -half_rate};

  Eigen::Vector4cd result;
  for (int c = 0; c < 4; ++c) {
    const double lambda = lambdas[c];
    if (lambda == 0.0) {
      result(c) = alpha0(c);
      continue;
    }
    // K(s) = gamma e^{-gamma s} lambda e^{lambda s}, dropped where it underflows relative to K(0).
    const double rate = lambda - p.gamma;
    const int window = std::min(steps, static_cast<int>(std::ceil(45.0 / (-rate * h))) + 1);
    std::vector<double> kernel(window + 1);
    for (int m = 0; m <= window; ++m) kernel[m] = p.gamma * lambda * std::exp(rate * m * h);
    const auto k_at = [&](int m) { return m <= window ? kernel[m] : 0.0; };

    std::vector<cdouble> alpha(steps + 1);
    alpha[0] = alpha0(c);
    cdouble beta_prev = 0.0;
    for (int n = 0; n < steps; ++n) {
      // beta_{n+1} = h [K_0 alpha_{n+1}/2 + sum_{m=1}^{n} K_m alpha_{n+1-m} + K_{n+1} alpha_0 / 2]
      cdouble known = 0.5 * k_at(n + 1) * alpha[0];
      const int upper = std::min(n, window);
      for (int m = 1; m <= upper; ++m) known += k_at(m) * alpha[n + 1 - m];
      known *= h;
      const double implicit = 0.5 * h * kernel[0];
      alpha[n + 1] = (alpha[n] + 0.5 * h * (beta_prev + known)) / (1.0 - 0.5 * h * implicit);
      beta_prev = known + implicit * alpha[n + 1];
    }
    result(c) = alpha[steps];
  }
  return result;
}

Eigen::Vector4cd evolve_volterra_converged(const Eigen::Vector4cd& alpha0, const PostMarkovParams& p,
                                           double t_end, double tolerance) {
  // The trapezoidal error is a series in h^2, so successive step halvings are Richardson-combined.
  const double fastest = std::max({p.gamma, p.gamma0, p.gamma0 * (2.0 * p.nbar + 1.0)});
  double step = 1.0 / (20.0 * fastest);
  Eigen::Vector4cd coarse = evolve_volterra(alpha0, p, t_end, step);
  Eigen::Vector4cd previous = coarse;
  for (int halving = 0; halving < 12; ++halving) {
    step *= 0.5;
    const Eigen::Vector4cd fine = evolve_volterra(alpha0, p, t_end, step);
    const Eigen::Vector4cd extrapolated = (4.0 * fine - coarse) / 3.0;
    if (halving > 0 && (extrapolated - previous).cwiseAbs().maxCoeff() < tolerance) return extrapolated;
    previous = extrapolated;
    coarse = fine;
  }
  throw Error(ErrorCode::not_converged, "evolve_volterra_converged: step halving did not settle");
}

Eigen::Matrix2cd postmarkov_embedding_evolve(const Eigen::Matrix2cd& x, double t, const PostMarkovParams& p) {
  p.validate();
  // Superoperator of the thermal dissipator from vec(A X B) = (B^T (x) A) vec(X).
  Matrix sm = Matrix::Zero(2, 2);
  sm(1, 0) = 1.0;  // |down><up|
  const Matrix sp = sm.adjoint();
  const Matrix id = Matrix::Identity(2, 2);
  const auto dissipator = [&](const Matrix& jump) {
    const Matrix jj = jump.adjoint() * jump;
    return Matrix(kron(jump.conjugate(), jump) - 0.5 * kron(id, jj) - 0.5 * kron(jj.transpose(), id));
  };
  const Matrix l = p.gamma0 * (p.nbar + 1.0) * dissipator(sm) + p.gamma0 * p.nbar * dissipator(sp);

  Matrix generator = Matrix::Zero(8, 8);
  generator.block(0, 4, 4, 4) = l;
  generator.block(4, 0, 4, 4) = p.gamma * Matrix::Identity(4, 4);
  generator.block(4, 4, 4, 4) = l - p.gamma * Matrix::Identity(4, 4);
  const Matrix propagator = (generator * t).exp();

  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(8);
  state.head(4) = Eigen::Map<const Eigen::Vector4cd>(x.data());
  const Eigen::VectorXcd evolved = propagator * state;
  Eigen::Matrix2cd out;
  out << evolved(0), evolved(2), evolved(1), evolved(3);
  return out;
}

FockOperator apply_spin_map(const FockOperator& rho, const std::array<Eigen::Matrix2cd, 4>& images) {
  // images[2 i + j] = Lambda(|i><j|)
  const int n = rho.cutoff;
  FockOperator out{Matrix::Zero(2 * n, 2 * n), n};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix block = rho.block(i, j);
      const Eigen::Matrix2cd& image = images[2 * i + j];
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          if (image(k, l) != 0.0) out.m.block(k * n, l * n, n, n) += image(k, l) * block;
        }
      }
    }
  }
  return out;
}

Eigen::Matrix2cd spinstar_reduced_map(const Eigen::Matrix2cd& x, double tau_s, int n_spins) {
  if (n_spins < 1 || n_spins > 8) throw Error(ErrorCode::invalid_argument, "spinstar_reduced_map: need 1 <= n_spins <= 8");
  const int star = 1 << n_spins;
  const int dim = 2 * star;
  Matrix h = Matrix::Zero(dim, dim);
  for (int s = 0; s < 2; ++s) {
    const double central = s == 0 ? 1.0 : -1.0;
    for (int b = 0; b < star; ++b) {
      double total = 0.0;
      for (int k = 0; k < n_spins; ++k) total += ((b >> k) & 1) ? -1.0 : 1.0;
      h(s * star + b, s * star + b) = central * total;
    }
  }
  // H is diagonal in the product basis, so its exponential is taken entrywise.
  const Eigen::VectorXcd u = (-kI * tau_s * h.diagonal()).array().exp();
  const Matrix initial = kron(x, Matrix::Identity(star, star) / double(star));
  const Matrix evolved = u.asDiagonal() * initial * u.conjugate().asDiagonal();
  Eigen::Matrix2cd reduced;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) reduced(i, j) = evolved.block(i * star, j * star, star, star).trace();
  }
  return reduced;
}

double trace_distance_oracle(double tau_s, int n_spins) {
  Eigen::Matrix2cd plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  Eigen::Matrix2cd minus;
  minus << 0.5, -0.5, -0.5, 0.5;
  Eigen::Matrix2cd diff;
  if (n_spins <= 8) {
    diff = spinstar_reduced_map(plus, tau_s, n_spins) - spinstar_reduced_map(minus, tau_s, n_spins);
  } else {
    const double factor = std::pow(std::cos(2.0 * tau_s), n_spins);
    const auto dephase = [&](Eigen::Matrix2cd r) {
      r(0, 1) *= factor;
      r(1, 0) *= factor;
      return r;
    };
    diff = dephase(plus) - dephase(minus);
  }
  const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(diff, Eigen::EigenvaluesOnly).eigenvalues();
  return 0.5 * eig.cwiseAbs().sum();
}

Eigen::MatrixXcd displacement_expm(cdouble beta, int cutoff) {
  const Matrix a = annihilation(cutoff);
  const Matrix generator = beta * a.adjoint() - std::conj(beta) * a;
  return generator.exp();
}

}  // namespace catbell
