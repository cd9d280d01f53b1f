#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "catbell/bell.hpp"
#include "catbell/error.hpp"
#include "catbell/oracle.hpp"
#include "catbell/phase_space.hpp"

using namespace catbell;

namespace {

// Tr[(sigma(theta) (x) Pi(beta)) rho_cat] from coherent-state algebra alone.
double coherent_correlation(double theta, cdouble beta, double amplitude) {
  const CatState cat{amplitude};
  const Eigen::Matrix2d s = sigma_theta(theta);
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) total += 0.5 * s(j, i) * displaced_parity_coherent(beta, cat.xi(i), cat.xi(j)).real();
  }
  return total;
}

double chsh(const std::array<double, 6>& x, double amplitude) {
  const cdouble b(x[1], x[2]);
  const cdouble bp(x[4], x[5]);
  return coherent_correlation(x[3], bp, amplitude) + coherent_correlation(x[0], bp, amplitude) +
         coherent_correlation(x[3], b, amplitude) - coherent_correlation(x[0], b, amplitude);
}

// Compass search over all six settings, many starts; shares nothing with the optimizer under test.
double pattern_search_max(double amplitude) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  double best = 0.0;
  for (int start = 0; start < 40; ++start) {
    std::array<double, 6> x{angle(rng), shift(rng), shift(rng), angle(rng), shift(rng), shift(rng)};
    double value = std::abs(chsh(x, amplitude));
    for (double step = 0.5; step > 1e-10;) {
      bool improved = false;
      for (int k = 0; k < 6; ++k) {
        for (double sign : {1.0, -1.0}) {
          auto trial = x;
          trial[k] += sign * step;
          const double v = std::abs(chsh(trial, amplitude));
          if (v > value) {
            value = v;
            x = trial;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, value);
  }
  return best;
}

// Frozen from pattern_search_max(2.0); the optimum sits just above sqrt(5).
constexpr double kPureMaxD2 = 2.2360679976307;

}  // namespace

TEST_SUITE("bell") {
  TEST_CASE("pure-state closed form and its sign convention match the Fock oracle") {
    const FockOperator rho = truncated_cat(2.0, 40);
    for (const double theta : {0.0, 0.7, -2.1, 3.0}) {
      for (const cdouble beta : {cdouble(0.0), cdouble(0.3, -0.2), cdouble(-0.25, 0.1), cdouble(0.05, 0.6)}) {
        const double oracle = expectation_sigma_parity(rho, theta, beta);
        CHECK(std::abs(pure_state_correlation(theta, beta, 2.0) - oracle) < 1e-10);
        CHECK(std::abs(coherent_correlation(theta, beta, 2.0) - oracle) < 1e-10);
      }
    }
    // The cos(theta) sinh term is odd in Re(beta); flipping the sign would move it by ~2x.
    const double theta = 0.0;
    const cdouble beta(0.1, 0.0);
    const double flipped = std::exp(-2.0 * std::norm(beta)) * (-kCanonicalSign) * std::exp(-8.0) *
                           std::sinh(8.0 * beta.real());
    CHECK(std::abs(flipped - expectation_sigma_parity(rho, theta, beta)) > 1e-4);
  }

  TEST_CASE("closed-form angles beat a brute-force angle scan") {
    const Eigen::Vector2d v(0.3, -0.5);
    const Eigen::Vector2d vp(-0.6, 0.2);
    double theta = 0.0;
    double theta_prime = 0.0;
    const double best = bell_optimal_angles(v, vp, &theta, &theta_prime);
    const auto b = [&](double t, double tp) {
      const Eigen::Vector2d u(std::sin(t), std::cos(t));
      const Eigen::Vector2d up(std::sin(tp), std::cos(tp));
      return up.dot(vp) + u.dot(vp) + up.dot(v) - u.dot(v);
    };
    double scan = 0.0;
    for (int i = 0; i < 400; ++i) {
      for (int j = 0; j < 400; ++j) scan = std::max(scan, b(i * 2 * M_PI / 400, j * 2 * M_PI / 400));
    }
    CHECK(best >= scan - 1e-12);
    CHECK(b(theta, theta_prime) == doctest::Approx(best).epsilon(1e-14));
  }

  TEST_CASE("pure cat maximum agrees with an independent six-dimensional search") {
    const double oracle = pattern_search_max(2.0);
    CHECK(oracle == doctest::Approx(kPureMaxD2).epsilon(1e-12));
    const PureCatModel model(CatState{2.0});
    const BellMaximum m = maximize_bell(model, 0.0);
    CHECK(m.converged);
    CHECK(std::abs(m.value - kPureMaxD2) < 1e-9);
    CHECK(std::abs(bell_value(model, m.argmax, 0.0)) == doctest::Approx(m.value).epsilon(1e-12));
  }

  TEST_CASE("maximization is deterministic and insensitive to the restart offset") {
    const PureCatModel model(CatState{1.5});
    const BellMaximum a = maximize_bell(model, 0.0);
    const BellMaximum b = maximize_bell(model, 0.0);
    CHECK(a.value == b.value);
    CHECK(a.argmax.unprimed.beta == b.argmax.unprimed.beta);
    OptimizerConfig other;
    other.seed = 1000;
    CHECK(std::abs(maximize_bell(model, 0.0, other).value - a.value) < 1e-9);
    CHECK(a.value <= kTsirelson + 1e-6);
  }

  TEST_CASE("violation windows of a synthetic family") {
    // Components independent of beta: max|B| = 2|v| = 2.4 |cos t|.
    const FunctionModel model([](cdouble, double t) { return Eigen::Vector2d(1.2 * std::cos(t), 0.0); }, "synthetic");
    std::vector<double> grid;
    for (int k = 0; k <= 30; ++k) grid.push_back(k * M_PI / 30);
    OptimizerConfig cfg;
    cfg.restarts = 2;
    const auto windows = violation_windows(model, grid, cfg, 1e-6);
    REQUIRE(windows.size() == 2);
    const double edge = std::acos(5.0 / 6.0);
    CHECK(windows[0].lower == 0.0);
    CHECK(windows[0].upper == doctest::Approx(edge).epsilon(1e-5));
    CHECK(windows[1].lower == doctest::Approx(M_PI - edge).epsilon(1e-5));
    CHECK(windows[1].upper == doctest::Approx(M_PI));
    CHECK_THROWS_AS(violation_windows(model, {0.0, 0.0}, cfg), Error);
  }

  TEST_CASE("parameter threshold of a synthetic family") {
    const ModelFamily family = [](double lambda) {
      return std::make_unique<FunctionModel>(
          [lambda](cdouble, double) { return Eigen::Vector2d(0.0, 1.2 * std::exp(-lambda)); }, "decay");
    };
    OptimizerConfig cfg;
    cfg.restarts = 2;
    CHECK(parameter_threshold(family, 0.0, 0.0, 1.0, cfg, 1e-8) == doctest::Approx(std::log(1.2)).epsilon(1e-7));
    try {
      parameter_threshold(family, 0.0, 0.5, 1.0, cfg);
      FAIL("expected no_crossing");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::no_crossing);
    }
    CHECK_THROWS_AS(parameter_threshold(family, 0.0, 1.0, 1.0, cfg), Error);
  }

  TEST_CASE("invalid optimizer settings are rejected") {
    const PureCatModel model(CatState{2.0});
    OptimizerConfig cfg;
    cfg.restarts = 0;
    CHECK_THROWS_AS(maximize_bell(model, 0.0, cfg), Error);
    cfg.restarts = 1;
    cfg.tolerance = 0.0;
    CHECK_THROWS_AS(maximize_bell(model, 0.0, cfg), Error);
  }
}
