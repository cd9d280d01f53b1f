#include "catbell/bell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "catbell/error.hpp"
#include "catbell/nelder_mead.hpp"

namespace catbell {

double bell_value(const CorrelationModel& model, const BellSettings& s, double t) {
  const MeasurementSetting a{s.unprimed.theta, s.unprimed.beta};
  const MeasurementSetting a_prime{s.primed.theta, s.primed.beta};
  const MeasurementSetting cross1{s.primed.theta, s.unprimed.beta};  // (beta, theta')
  const MeasurementSetting cross2{s.unprimed.theta, s.primed.beta};  // (beta', theta)
  return model.correlation(a_prime, t) + model.correlation(cross2, t) + model.correlation(cross1, t) -
         model.correlation(a, t);
}

double pure_state_correlation(double theta, cdouble beta, double amplitude) {
  const double d = amplitude;
  return std::exp(-2.0 * std::norm(beta)) *
         (std::sin(theta) * std::cos(4.0 * d * beta.imag()) +
          kCanonicalSign * std::exp(-2.0 * d * d) * std::cos(theta) * std::sinh(4.0 * d * beta.real()));
}

Eigen::Vector2d PureCatModel::spin_components(cdouble beta, double) const {
  return {pure_state_correlation(0.5 * std::numbers::pi, beta, cat_.amplitude),
          pure_state_correlation(0.0, beta, cat_.amplitude)};
}

std::string PureCatModel::describe() const {
  std::ostringstream os;
  os << "pure(D=" << cat_.amplitude << ")";
  return os.str();
}

double bell_optimal_angles(const Eigen::Vector2d& v, const Eigen::Vector2d& v_prime, double* theta,
                           double* theta_prime) {
  // B = u(theta').(v' + v) + u(theta).(v' - v) with u(theta) = (sin theta, cos theta).
  const Eigen::Vector2d sum = v_prime + v;
  const Eigen::Vector2d diff = v_prime - v;
  if (theta_prime) *theta_prime = std::atan2(sum(0), sum(1));
  if (theta) *theta = std::atan2(diff(0), diff(1));
  return sum.norm() + diff.norm();
}

BellMaximum maximize_bell(const CorrelationModel& model, double t, const OptimizerConfig& cfg) {
  if (cfg.restarts < 1) throw Error(ErrorCode::invalid_argument, "maximize_bell: restarts must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw Error(ErrorCode::invalid_argument, "maximize_bell: tolerance must be > 0");

  // Search over (Re b, Im b, Re b', Im b'); the two angles are optimal in closed form.
  const auto objective = [&](const Eigen::VectorXd& x) {
    const Eigen::Vector2d v = model.spin_components({x(0), x(1)}, t);
    const Eigen::Vector2d vp = model.spin_components({x(2), x(3)}, t);
    return -bell_optimal_angles(v, vp, nullptr, nullptr);
  };

  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(4, -cfg.beta_box);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(4, cfg.beta_box);
  SimplexOptions options;
  options.initial_scale = cfg.simplex_scale * cfg.beta_box;
  options.f_tolerance = cfg.tolerance;
  options.max_evaluations = cfg.max_evaluations;

  BellMaximum best;
  best.value = -1.0;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(4);
  int evaluations = 0;
  bool any_converged = false;

  for (int r = 0; r < cfg.restarts; ++r) {
    const Eigen::VectorXd unit = halton_point(cfg.seed + r, 4);
    const Eigen::VectorXd start = lower + unit.cwiseProduct(upper - lower);
    SimplexResult local = nelder_mead_minimize(objective, start, lower, upper, options);
    evaluations += local.evaluations;
    // Restart from the converged vertex until the value stops moving.
    for (int polish = 0; polish < 3 && local.converged; ++polish) {
      SimplexOptions again = options;
      again.initial_scale = 0.1 * options.initial_scale;
      SimplexResult next = nelder_mead_minimize(objective, local.x, lower, upper, again);
      evaluations += next.evaluations;
      const bool moved = next.value < local.value - cfg.tolerance;
      if (next.value <= local.value) local = next;
      if (!moved) break;
    }
    any_converged = any_converged || local.converged;
    if (-local.value > best.value) {
      best.value = -local.value;
      best_x = local.x;
    }
  }

  const cdouble beta(best_x(0), best_x(1));
  const cdouble beta_prime(best_x(2), best_x(3));
  double theta = 0.0;
  double theta_prime = 0.0;
  best.value = bell_optimal_angles(model.spin_components(beta, t), model.spin_components(beta_prime, t),
                                   &theta, &theta_prime);
  best.argmax = BellSettings{{theta, beta}, {theta_prime, beta_prime}};
  best.converged = any_converged;
  best.evaluations = evaluations;
  return best;
}

namespace {

double bisect_crossing(const std::function<double(double)>& excess, double inside, double outside,
                       double resolution) {
  // excess(inside) > 0 >= excess(outside)
  while (std::abs(outside - inside) > resolution) {
    const double mid = 0.5 * (inside + outside);
    if (excess(mid) > 0.0) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return 0.5 * (inside + outside);
}

}  // namespace

std::vector<Interval> violation_windows(const CorrelationModel& model, const std::vector<double>& grid,
                                        const OptimizerConfig& cfg, double resolution) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorCode::invalid_argument, "violation_windows: grid not increasing");
  }
  const auto excess = [&](double t) { return maximize_bell(model, t, cfg).value - 2.0; };
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), excess);

  std::vector<Interval> windows;
  std::size_t k = 0;
  while (k < grid.size()) {
    if (!(values[k] > 0.0)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k + 1 < grid.size() && values[k + 1] > 0.0) ++k;
    const std::size_t last = k;
    Interval w{grid[first], grid[last]};
    if (first > 0) w.lower = bisect_crossing(excess, grid[first], grid[first - 1], resolution);
    if (last + 1 < grid.size()) w.upper = bisect_crossing(excess, grid[last], grid[last + 1], resolution);
    windows.push_back(w);
    ++k;
  }
  return windows;
}

double parameter_threshold(const ModelFamily& family, double t, double lower, double upper,
                           const OptimizerConfig& cfg, double resolution) {
  if (!(upper > lower)) throw Error(ErrorCode::invalid_argument, "parameter_threshold: empty range");
  const auto excess = [&](double param) { return maximize_bell(*family(param), t, cfg).value - 2.0; };

  constexpr int kSamples = 6;
  std::vector<double> samples(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) samples[i] = excess(lower + (upper - lower) * i / kSamples);
  const double f_lower = samples.front();
  const double f_upper = samples.back();
  if ((f_lower > 0.0) == (f_upper > 0.0)) {
    throw Error(ErrorCode::no_crossing, "parameter_threshold: max|B| - 2 has the same sign at both ends");
  }
  const double direction = f_upper > f_lower ? 1.0 : -1.0;
  for (int i = 1; i <= kSamples; ++i) {
    if (direction * (samples[i] - samples[i - 1]) < -1e-6) {
      throw Error(ErrorCode::invalid_argument, "parameter_threshold: max|B| is not monotone over the range");
    }
  }

  // Narrow to the sampled bracket, then bisect.
  double inside = lower;
  double outside = upper;
  const bool lower_violates = f_lower > 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    if ((samples[i] > 0.0) != lower_violates) {
      inside = lower + (upper - lower) * (i - 1) / kSamples;
      outside = lower + (upper - lower) * i / kSamples;
      break;
    }
  }
  if (!lower_violates) std::swap(inside, outside);
  return bisect_crossing(excess, inside, outside, resolution);
}

}  // namespace catbell
