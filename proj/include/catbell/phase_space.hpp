#pragma once

// Coherent-state, Fock-state and displaced-parity primitives.
//
// Conventions: D(beta) = exp(beta a^dag - conj(beta) a), Pi(beta) = D(beta) (-1)^n D^dag(beta),
// quadratures q = (a + a^dag)/sqrt(2), p = -i (a - a^dag)/sqrt(2). Weyl functions are taken as
// chi(z) = Tr[rho exp(i (q p_hat - p q_hat))] over z = (q, p), and the Wigner function has unit
// integral over the complex plane so that <Pi(beta)> = (pi/2) W(beta).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "catbell/error.hpp"

namespace catbell {

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// <xi1|xi2> for coherent states.
template <typename Scalar>
Complex<Scalar> coherent_overlap(Complex<Scalar> xi1, Complex<Scalar> xi2) {
  return std::exp(-std::norm(xi1) / Scalar(2) - std::norm(xi2) / Scalar(2) + std::conj(xi1) * xi2);
}

/// Tr[Pi(beta) |xi1><xi2|] = <xi2| Pi(beta) |xi1>.
template <typename Scalar>
Complex<Scalar> displaced_parity_coherent(Complex<Scalar> beta, Complex<Scalar> xi1,
                                          Complex<Scalar> xi2) {
  // D^dag(beta)|xi> = exp((conj(beta) xi - beta conj(xi))/2) |xi - beta>, parity maps |a> -> |-a>.
  const Complex<Scalar> phase1 = (std::conj(beta) * xi1 - beta * std::conj(xi1)) / Scalar(2);
  const Complex<Scalar> phase2 = (beta * std::conj(xi2) - std::conj(beta) * xi2) / Scalar(2);
  return std::exp(phase1 + phase2) * coherent_overlap(xi2 - beta, beta - xi1);
}

/// Associated Laguerre polynomial L_p^{(l)}(x) by the three-term recurrence in p.
template <typename Scalar>
Scalar laguerre(int p, int l, Scalar x) {
  if (p < 0) throw Error(ErrorCode::invalid_argument, "laguerre: negative degree");
  Scalar previous = Scalar(1);
  if (p == 0) return previous;
  Scalar current = Scalar(1 + l) - x;
  for (int k = 1; k < p; ++k) {
    const Scalar next = ((Scalar(2 * k + l + 1) - x) * current - Scalar(k + l) * previous) / Scalar(k + 1);
    previous = current;
    current = next;
  }
  return current;
}

/// <s| D(beta) |r>. The s >= r branch is the Laguerre form; s < r goes through the adjoint.
template <typename Scalar>
Complex<Scalar> displaced_fock_element(int s, int r, Complex<Scalar> beta) {
  if (s < 0 || r < 0) throw Error(ErrorCode::invalid_index, "displaced_fock_element: negative index");
  if (s < r) return std::conj(displaced_fock_element<Scalar>(r, s, -beta));

  const Scalar x = std::norm(beta);
  const int shift = s - r;
  if (x == Scalar(0)) return shift == 0 ? Complex<Scalar>(1) : Complex<Scalar>(0);

  // sqrt(r!/s!) |beta|^(s-r) exp(-|beta|^2/2) in the log domain.
  const Scalar log_mag = (std::lgamma(Scalar(r + 1)) - std::lgamma(Scalar(s + 1))) / Scalar(2) +
                         Scalar(shift) * std::log(std::abs(beta)) - x / Scalar(2);
  const Complex<Scalar> phase = std::polar(Scalar(1), Scalar(shift) * std::arg(beta));
  return std::exp(log_mag) * laguerre<Scalar>(r, shift, x) * phase;
}

/// Truncation policy of the parity-eigenbasis sum.
struct ParitySumControl {
  double tolerance = 1e-12;
  int max_terms = 500;
};

/// <m| D(beta) (-1)^n D^dag(beta) |n> = sum_j (-1)^j <m|D|j> conj(<n|D|j>).
template <typename Scalar>
Complex<Scalar> displaced_parity_fock(int m, int n, Complex<Scalar> beta,
                                      const ParitySumControl& control = {}) {
  if (m < 0 || n < 0) throw Error(ErrorCode::invalid_index, "displaced_parity_fock: negative index");
  // Increments before the peak of the displaced-Fock distributions can vanish, so convergence
  // is only tested past max(m, n) + |beta|^2.
  const int check_from = std::max(m, n) + static_cast<int>(std::ceil(std::norm(beta))) + 1;
  Complex<Scalar> sum(0);
  Scalar last_increment = std::numeric_limits<Scalar>::infinity();
  for (int j = 0; j < control.max_terms; ++j) {
    const Complex<Scalar> term = displaced_fock_element<Scalar>(m, j, beta) *
                                 std::conj(displaced_fock_element<Scalar>(n, j, beta));
    const Complex<Scalar> increment = (j % 2 == 0) ? term : -term;
    sum += increment;
    const Scalar modulus = std::abs(increment);
    if (j >= check_from && modulus < control.tolerance && last_increment < control.tolerance) {
      return sum;
    }
    last_increment = modulus;
  }
  throw Error(ErrorCode::truncation_not_converged, "displaced_parity_fock: parity sum did not converge");
}

/// scale * exp(-z^T quad z + lin . z) over the phase-space point z = (q, p).
template <typename Scalar>
struct GaussianKernel {
  using RealMatrix = Eigen::Matrix<Scalar, 2, 2>;
  using ComplexVector = Eigen::Matrix<Complex<Scalar>, 2, 1>;

  RealMatrix quad = RealMatrix::Zero();
  ComplexVector lin = ComplexVector::Zero();
  Complex<Scalar> scale{1};

  Complex<Scalar> operator()(const Eigen::Matrix<Scalar, 2, 1>& z) const {
    const Scalar quadratic = z.dot(quad * z);
    const Complex<Scalar> linear = lin(0) * z(0) + lin(1) * z(1);
    return scale * std::exp(-quadratic + linear);
  }
};

using Kernel = GaussianKernel<double>;

/// Weyl kernel of the coherent block |xi_i><xi_j|.
template <typename Scalar>
GaussianKernel<Scalar> coherent_block_kernel(Complex<Scalar> xi_i, Complex<Scalar> xi_j) {
  GaussianKernel<Scalar> k;
  k.quad = GaussianKernel<Scalar>::RealMatrix::Identity() / Scalar(4);
  const Scalar root_half = std::sqrt(Scalar(0.5));
  const Complex<Scalar> i(0, 1);
  k.lin(0) = -root_half * (std::conj(xi_j) - xi_i);
  k.lin(1) = -root_half * i * (std::conj(xi_j) + xi_i);
  k.scale = coherent_overlap(xi_j, xi_i);
  return k;
}

/// Wigner function W(beta): closed-form Fourier transform of a Gaussian Weyl kernel.
template <typename Scalar>
Complex<Scalar> wigner_from_kernel(const GaussianKernel<Scalar>& k, Complex<Scalar> beta) {
  const Eigen::LLT<typename GaussianKernel<Scalar>::RealMatrix> llt(k.quad);
  if (llt.info() != Eigen::Success || !(k.quad.determinant() > Scalar(0))) {
    throw Error(ErrorCode::nonintegrable_kernel, "wigner_from_kernel: quadratic form is not positive definite");
  }
  // <Pi(beta)> = (1/4pi) int dq dp chi(z) exp(-i sqrt2 (Im(beta) q - Re(beta) p)).
  const Complex<Scalar> i(0, 1);
  const Scalar root_two = std::sqrt(Scalar(2));
  typename GaussianKernel<Scalar>::ComplexVector b = k.lin;
  b(0) += -i * root_two * beta.imag();
  b(1) += i * root_two * beta.real();
  const typename GaussianKernel<Scalar>::RealMatrix inverse = k.quad.inverse();
  const Complex<Scalar> exponent =
      (b(0) * (inverse(0, 0) * b(0) + inverse(0, 1) * b(1)) +
       b(1) * (inverse(1, 0) * b(0) + inverse(1, 1) * b(1))) / Scalar(4);
  const Complex<Scalar> parity = k.scale / (Scalar(4) * std::sqrt(k.quad.determinant())) * std::exp(exponent);
  return parity * Scalar(2) / std::numbers::pi_v<Scalar>;
}

/// (pi/2) W(beta), i.e. the displaced-parity expectation of the kernel's operator.
template <typename Scalar>
Complex<Scalar> parity_from_kernel(const GaussianKernel<Scalar>& k, Complex<Scalar> beta) {
  return wigner_from_kernel(k, beta) * std::numbers::pi_v<Scalar> / Scalar(2);
}

}  // namespace catbell
