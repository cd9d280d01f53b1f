#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "catbell/correlation_model.hpp"
#include "catbell/types.hpp"

namespace catbell {

/// Sign of the cos(theta) sinh(4 D Re beta) term for |up, D> and Pi(beta) = D (-1)^n D^dag.
/// Pinned against the truncated-Fock expectation value in tests.
inline constexpr double kCanonicalSign = +1.0;

/// Tsirelson bound 2 sqrt(2).
inline constexpr double kTsirelson = 2.8284271247461903;

/// B = C(b', t') + C(b', t) + C(b, t') - C(b, t).
double bell_value(const CorrelationModel& model, const BellSettings& s, double t);

/// Pure cat-state correlation exp(-2|b|^2) [sin(t) cos(4 D Im b) + s exp(-2 D^2) cos(t) sinh(4 D Re b)].
double pure_state_correlation(double theta, cdouble beta, double amplitude);

/// The unevolved cat state; t is ignored.
class PureCatModel final : public CorrelationModel {
 public:
  explicit PureCatModel(CatState cat) : cat_(cat) {}
  Eigen::Vector2d spin_components(cdouble beta, double t) const override;
  std::string describe() const override;

 private:
  CatState cat_;
};

struct OptimizerConfig {
  /// Number of multi-start local searches.
  int restarts = 64;
  double simplex_scale = 0.5;
  double tolerance = 1e-12;
  /// Settings live in theta, theta' in [-theta_box, theta_box] and
  /// Re/Im beta, beta' in [-beta_box, beta_box].
  double theta_box = 3.141592653589793;
  double beta_box = 2.0;
  /// Offset into the Halton sequence; different seeds place restarts differently.
  int seed = 0;
  int max_evaluations = 4000;
};

struct BellMaximum {
  double value = 0.0;
  BellSettings argmax;
  bool converged = false;
  int evaluations = 0;
};

/// Optimal |B| for two fixed displacements, maximizing over both spin angles in closed form.
/// Returns the value and writes the optimal angles.
double bell_optimal_angles(const Eigen::Vector2d& v, const Eigen::Vector2d& v_prime, double* theta,
                           double* theta_prime);

/// max |B| over {beta, theta; beta', theta'} by multi-start derivative-free search.
BellMaximum maximize_bell(const CorrelationModel& model, double t, const OptimizerConfig& cfg = {});

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Maximal sub-intervals of `grid` on which max|B| > 2, endpoints refined by bisection.
std::vector<Interval> violation_windows(const CorrelationModel& model, const std::vector<double>& grid,
                                        const OptimizerConfig& cfg = {}, double resolution = 1e-3);

/// A one-parameter family of models.
using ModelFamily = std::function<std::unique_ptr<CorrelationModel>(double)>;

/// Parameter value where max|B|(param) = 2 at fixed t, by bisection to `resolution`.
double parameter_threshold(const ModelFamily& family, double t, double lower, double upper,
                           const OptimizerConfig& cfg = {}, double resolution = 1e-3);

}  // namespace catbell
