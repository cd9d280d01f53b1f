#include <doctest.h>

#include <cmath>
#include <vector>

#include "catbell/bell.hpp"
#include "catbell/error.hpp"
#include "catbell/markov.hpp"
#include "catbell/oracle.hpp"

using namespace catbell;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::invalid_argument;
}

const std::vector<cdouble> kBetas{cdouble(0.0), cdouble(0.3, -0.2), cdouble(-0.45, 0.15), cdouble(0.1, 0.5)};
const std::vector<double> kThetas{0.0, 1.1, -2.4};

}  // namespace

TEST_SUITE("markov") {
  TEST_CASE("probability parametrizations round-trip") {
    for (double p : {0.0, 0.2, 0.75, 1.0}) {
      CHECK(AdParams::from_probability(p).probability() == doctest::Approx(p).epsilon(1e-14));
      if (p < 1.0) CHECK(PdParams::from_probability(p).probability() == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(PdParams::from_probability(1.0).coherence_factor() == 0.0);
    CHECK(code_of([] { AdParams::from_probability(1.5); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { PdParams::from_probability(-0.1); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("Kraus sets are complete") {
    for (double eta : {0.0, 0.3, 1.0}) {
      std::vector<Eigen::MatrixXd> kraus;
      for (int k = 0; k < 30; ++k) kraus.push_back(ad_kraus(30, k, eta));
      CHECK(kraus_completeness_residual(kraus) < 1e-12);
    }
    for (double tau : {0.05, 0.4, 2.0}) {
      const int k_max = pd_kraus_cutoff(40, tau, 1e-12);
      std::vector<Eigen::MatrixXd> kraus;
      for (int k = 0; k <= k_max; ++k) kraus.push_back(pd_kraus(40, k, tau));
      // exp of log-amplitudes of size (n tau)^2 carries ~1e-11 relative rounding at tau = 2.
      CHECK(kraus_completeness_residual(kraus) <= (tau < 1.0 ? 1e-12 : 1e-10));
      // One fewer operator must leave the tolerance unmet, otherwise the cutoff is not minimal.
      if (k_max > 0 && tau < 1.0) {
        kraus.pop_back();
        CHECK(kraus_completeness_residual(kraus) > 1e-12);
      }
    }
    CHECK(pd_kraus_cutoff(40, 0.0) == 0);
    CHECK(code_of([] { ad_kraus(5, 5, 0.5); }) == ErrorCode::invalid_index);
    CHECK(code_of([] { ad_kraus(5, 1, 1.5); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { pd_kraus(5, 1, -0.1); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("closed forms agree with operator-sum evolution of the truncated cat") {
    const double d = 2.0;
    const FockOperator rho = truncated_cat(d, 40);
    const double eta = 0.55;
    const double tau = 0.35;
    const FockOperator ad_spin = evolve_kraus(rho, KrausChannel::amplitude_damping, KrausTarget::spin, eta);
    const FockOperator ad_cv = evolve_kraus(rho, KrausChannel::amplitude_damping, KrausTarget::cv, eta);
    const FockOperator pd_spin = evolve_kraus(rho, KrausChannel::phase_damping, KrausTarget::spin, tau);
    const FockOperator pd_cv = evolve_kraus(rho, KrausChannel::phase_damping, KrausTarget::cv, tau);
    for (double theta : kThetas) {
      for (cdouble beta : kBetas) {
        CHECK(std::abs(corr_ad_spin(beta, theta, eta, d) - expectation_sigma_parity(ad_spin, theta, beta)) < 1e-10);
        CHECK(std::abs(corr_ad_cv(beta, theta, eta, d) - expectation_sigma_parity(ad_cv, theta, beta)) < 1e-10);
        CHECK(std::abs(corr_pd_spin(beta, theta, tau, d) - expectation_sigma_parity(pd_spin, theta, beta)) < 1e-10);
        CHECK(std::abs(corr_pd_cv(beta, theta, tau, d) - expectation_sigma_parity(pd_cv, theta, beta)) < 1e-7);
      }
    }
  }

  TEST_CASE("the two phase-damped oscillator routes agree") {
    for (double tau : {0.0, 0.1, 0.6, 1.7}) {
      for (double theta : kThetas) {
        for (cdouble beta : kBetas) {
          const double sum = corr_pd_cv(beta, theta, tau, 2.0);
          const double average = corr_pd_cv_phase_average(beta, theta, tau, 2.0);
          CHECK(std::abs(sum - average) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("pairwise parity elements match the direct expansion") {
    const cdouble beta(0.6, -0.35);
    for (int m = 0; m < 12; ++m) {
      for (int n = 0; n < 12; ++n) {
        CHECK(std::abs(parity_matrix_element_pairwise(m, n, beta) - displaced_parity_fock(m, n, beta)) < 1e-11);
      }
    }
    CHECK(code_of([] { parity_pair_term(-1, 0, 0, cdouble(0.1)); }) == ErrorCode::invalid_index);
  }

  TEST_CASE("zero damping reproduces the pure cat") {
    for (double theta : kThetas) {
      for (cdouble beta : kBetas) {
        const double pure = pure_state_correlation(theta, beta, 2.0);
        CHECK(corr_ad_spin(beta, theta, 1.0, 2.0) == doctest::Approx(pure).epsilon(1e-13));
        CHECK(corr_ad_cv(beta, theta, 1.0, 2.0) == doctest::Approx(pure).epsilon(1e-13));
        CHECK(corr_pd_spin(beta, theta, 0.0, 2.0) == doctest::Approx(pure).epsilon(1e-13));
        CHECK(std::abs(corr_pd_cv(beta, theta, 0.0, 2.0) - pure) < 1e-10);
      }
    }
  }

  TEST_CASE("complete damping limits") {
    const CatState cat{2.0};
    const cdouble beta(0.3, 0.4);
    // Oscillator decayed to vacuum: no population imbalance, coherence exp(-2 D^2) exp(-2 |beta|^2).
    const Eigen::Vector2d ad_cv = AdCvModel(cat).spin_components(beta, 1.0);
    CHECK(std::abs(ad_cv(1)) < 1e-15);
    CHECK(ad_cv(0) == doctest::Approx(std::exp(-8.0) * std::exp(-2.0 * std::norm(beta))).epsilon(1e-12));
    // Spin fully dephased: sigma_x channel vanishes.
    CHECK(std::abs(PdSpinModel(cat).spin_components(beta, 1.0)(0)) < 1e-15);
    // Spin relaxed to |down>: only the down block survives.
    const Eigen::Vector2d ad_spin = AdSpinModel(cat).spin_components(beta, 1.0);
    CHECK(std::abs(ad_spin(0)) < 1e-15);
  }

  TEST_CASE("phase-damped oscillator truncation errors") {
    PdCvTruncation small;
    small.n_max = 20;
    CHECK(code_of([&] { corr_pd_cv(cdouble(0.1), 0.3, 0.2, 2.0, small); }) == ErrorCode::cutoff_too_small);
    CHECK(code_of([] { corr_pd_cv(cdouble(0.1), 0.3, -1.0, 2.0); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("models reject probabilities outside [0, 1]") {
    const CatState cat{2.0};
    CHECK_THROWS_AS(AdSpinModel(cat).spin_components(cdouble(0.0), 1.2), Error);
    CHECK_THROWS_AS(PdCvModel(cat).spin_components(cdouble(0.0), -0.2), Error);
  }
}
