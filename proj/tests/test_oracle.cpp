#include <doctest.h>

#include <array>
#include <cmath>

#include "catbell/error.hpp"
#include "catbell/oracle.hpp"
#include "catbell/postmarkov.hpp"

using namespace catbell;

namespace {

void check_healthy(const FockOperator& rho, double psd = 1e-10) {
  const StateCheck c = check_state(rho);
  CHECK(c.trace_error < 1e-9);
  CHECK(c.hermiticity_error < 1e-12);
  CHECK(c.min_eigenvalue >= -psd);
}

double mean_number(const FockOperator& rho) {
  const Eigen::MatrixXcd a = annihilation(rho.cutoff);
  const Eigen::MatrixXcd n = a.adjoint() * a;
  return (rho.block(0, 0) * n).trace().real() + (rho.block(1, 1) * n).trace().real();
}

std::array<Eigen::Matrix2cd, 4> postmarkov_images(double t, const PostMarkovParams& p) {
  std::array<Eigen::Matrix2cd, 4> images;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
      unit(i, j) = 1.0;
      images[2 * i + j] = postmarkov_embedding_evolve(unit, t, p);
    }
  }
  return images;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("truncated cat is a normalized pure state") {
    const FockOperator rho = truncated_cat(2.0, 40);
    check_healthy(rho);
    CHECK((rho.m * rho.m).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_number(rho) == doctest::Approx(4.0).epsilon(1e-9));
    // Spin blocks carry |D> and |-D>, so the coherence block has overlap <-D|D>... traced: exp(-2 D^2)
    CHECK(std::abs(rho.block(0, 1).trace() - 0.5 * std::exp(-8.0)) < 1e-12);
    CHECK_THROWS_AS(truncated_cat(2.0, 20), Error);
  }

  TEST_CASE("identity channels leave the state untouched") {
    const FockOperator rho = truncated_cat(1.5, 40);
    for (KrausTarget target : {KrausTarget::spin, KrausTarget::cv}) {
      CHECK((evolve_kraus(rho, KrausChannel::amplitude_damping, target, 1.0).m - rho.m).norm() < 1e-13);
      CHECK((evolve_kraus(rho, KrausChannel::phase_damping, target, 0.0).m - rho.m).norm() < 1e-13);
    }
  }

  TEST_CASE("Kraus channels preserve trace, Hermiticity and positivity") {
    const FockOperator rho = truncated_cat(2.0, 40);
    for (KrausTarget target : {KrausTarget::spin, KrausTarget::cv}) {
      for (double eta : {0.0, 0.4, 0.9}) check_healthy(evolve_kraus(rho, KrausChannel::amplitude_damping, target, eta));
      for (double tau : {0.2, 1.0, 2.0}) check_healthy(evolve_kraus(rho, KrausChannel::phase_damping, target, tau));
    }
  }

  TEST_CASE("amplitude damping of the oscillator scales the mean excitation by eta") {
    const FockOperator rho = truncated_cat(2.0, 40);
    for (double eta : {0.1, 0.5, 0.8}) {
      const FockOperator out = evolve_kraus(rho, KrausChannel::amplitude_damping, KrausTarget::cv, eta);
      CHECK(mean_number(out) == doctest::Approx(eta * mean_number(rho)).epsilon(1e-10));
    }
  }

  TEST_CASE("amplitude damping of the spin drives it to the ground state") {
    const FockOperator rho = truncated_cat(2.0, 40);
    const FockOperator out = evolve_kraus(rho, KrausChannel::amplitude_damping, KrausTarget::spin, 0.0);
    CHECK(std::abs(out.block(0, 0).trace()) < 1e-14);
    CHECK(out.block(1, 1).trace().real() == doctest::Approx(1.0));
  }

  TEST_CASE("expectations are stable when the Fock cutoff doubles") {
    const cdouble beta(0.25, -0.15);
    const double theta = 0.8;
    for (KrausChannel channel : {KrausChannel::amplitude_damping, KrausChannel::phase_damping}) {
      const double param = channel == KrausChannel::amplitude_damping ? 0.6 : 0.5;
      const double small = expectation_sigma_parity(evolve_kraus(truncated_cat(2.0, 40), channel, KrausTarget::cv, param),
                                                    theta, beta);
      const double large = expectation_sigma_parity(evolve_kraus(truncated_cat(2.0, 80), channel, KrausTarget::cv, param),
                                                    theta, beta);
      CHECK(std::abs(small - large) < 1e-9);
    }
  }

  TEST_CASE("Brownian integration preserves trace and Hermiticity") {
    const BrownianParams p{0.3, 10.0, 25.0, 1.0, false};
    const FockOperator rho = truncated_cat(2.0, 60);
    const std::vector<FockOperator> states = evolve_brownian_snapshots(rho, p, {0.01, 0.05, 0.1});
    for (const auto& s : states) {
      const StateCheck c = check_state(s);
      CHECK(c.trace_error < 1e-9);
      CHECK(c.hermiticity_error < 1e-12);
      // The high-temperature equation with r(t) dropped is not of Lindblad form; allow a sliver.
      CHECK(c.min_eigenvalue >= -1e-6);
    }
    CHECK_THROWS_AS(evolve_brownian_rk4(rho, p, 1.0, 1), Error);
    CHECK_THROWS_AS(evolve_brownian_snapshots(rho, p, {0.2, 0.1}), Error);
  }

  TEST_CASE("post-Markovian embedding keeps the joint state physical") {
    const FockOperator rho = truncated_cat(2.0, 40);
    for (const PostMarkovParams& p : {PostMarkovParams{1.0, 0.1, 0.0}, PostMarkovParams{1.0, 20.0, 2.0}}) {
      for (double t : {0.5, 3.0}) check_healthy(apply_spin_map(rho, postmarkov_images(t, p)));
    }
  }

  TEST_CASE("displacement exponential is unitary on the low levels") {
    const Eigen::MatrixXcd d = displacement_expm(cdouble(0.4, 0.3), 80);
    const Eigen::MatrixXcd product = d.adjoint() * d;
    CHECK((product.topLeftCorner(20, 20) - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-12);
  }
}
