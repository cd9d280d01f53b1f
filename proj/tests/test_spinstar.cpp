#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "catbell/bell.hpp"
#include "catbell/error.hpp"
#include "catbell/oracle.hpp"
#include "catbell/spinstar.hpp"

using namespace catbell;

namespace {

std::array<Eigen::Matrix2cd, 4> star_images(double tau_s, int n) {
  std::array<Eigen::Matrix2cd, 4> images;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
      unit(i, j) = 1.0;
      images[2 * i + j] = spinstar_reduced_map(unit, tau_s, n);
    }
  }
  return images;
}

}  // namespace

TEST_SUITE("spinstar") {
  TEST_CASE("decoherence factor is cos(2 tau)^N with its sign") {
    for (int n : {1, 2, 5, 100}) {
      for (double tau : {0.0, 0.2, 0.7, 1.3, 2.9}) {
        CHECK(decoherence_factor(tau, n) == doctest::Approx(std::pow(std::cos(2 * tau), n)).epsilon(1e-12));
      }
    }
    CHECK(decoherence_factor(std::numbers::pi / 4, 3) == doctest::Approx(0.0));
    CHECK(decoherence_factor(std::numbers::pi / 2, 5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(decoherence_factor(0.1, 0), Error);
  }

  TEST_CASE("closed form matches the exact star evolution of the truncated cat") {
    const FockOperator rho = truncated_cat(2.0, 40);
    const std::array<cdouble, 2> betas{cdouble(0.1, 0.2), cdouble(-0.2, -0.05)};
    const std::array<Eigen::MatrixXcd, 2> parity{parity_operator(betas[0], 40), parity_operator(betas[1], 40)};
    for (int n : {1, 2, 4}) {
      for (double tau : {0.15, 0.9, 2.2}) {
        const FockOperator evolved = apply_spin_map(rho, star_images(tau, n));
        for (double theta : {0.3, -1.9}) {
          for (int b = 0; b < 2; ++b) {
            const double closed = corr_spinstar(theta, betas[b], tau, SpinStarParams{n}, 2.0);
            CHECK(std::abs(closed - expectation_sigma_parity(evolved, theta, parity[b])) < 1e-10);
          }
        }
      }
    }
  }

  TEST_CASE("trace distance against the direct two-state oracle") {
    for (int n : {1, 2, 5, 8, 100}) {
      for (double tau : {0.0, 0.4, 0.785, 1.2, 3.0}) {
        CHECK(std::abs(trace_distance(tau, n) - trace_distance_oracle(tau, n)) < 1e-12);
      }
    }
  }

  TEST_CASE("maximal violation is periodic with full revivals") {
    for (int n : {2, 5}) {
      const SpinStarModel model(SpinStarParams{n}, CatState{2.0});
      OptimizerConfig cfg;
      cfg.restarts = 16;
      const double start = maximize_bell(model, 0.0, cfg).value;
      CHECK(std::abs(maximize_bell(model, std::numbers::pi / 2, cfg).value - start) < 1e-9);
      CHECK(std::abs(maximize_bell(model, 0.3, cfg).value - maximize_bell(model, 0.3 + std::numbers::pi / 2, cfg).value) <
            1e-9);
      // Complete dephasing at pi/4 leaves only the sigma_z channel.
      CHECK(maximize_bell(model, std::numbers::pi / 4, cfg).value < 2.0);
    }
    CHECK_THROWS_AS(SpinStarModel(SpinStarParams{0}, CatState{2.0}), Error);
  }
}
