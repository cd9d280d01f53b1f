#include "catbell/brownian.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "catbell/error.hpp"

namespace catbell {

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

Eigen::Matrix2d rotation_matrix(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return r;
}

double magnitude(double v) { return std::abs(v); }
double magnitude(const Eigen::Vector3d& v) { return v.cwiseAbs().maxCoeff(); }

template <typename V, typename F>
V gauss_legendre(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  V sum = weights[0] * (f(mid - half * nodes[0]) + f(mid + half * nodes[0]));
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    sum += weights[k] * (f(mid - half * nodes[k]) + f(mid + half * nodes[k]));
  }
  return half * sum;
}

/// Bisects until the rule on a panel agrees with the rule on its halves to the panel's share
/// of the absolute tolerance.
template <typename V, typename F>
V adaptive(const F& f, double a, double b, const V& whole, double tolerance, int depth, double* error) {
  const double mid = 0.5 * (a + b);
  const V left = gauss_legendre<V>(f, a, mid);
  const V right = gauss_legendre<V>(f, mid, b);
  const V refined = left + right;
  const double change = magnitude(V(refined - whole));
  if (change <= tolerance || depth == 0) {
    *error += change;
    return refined;
  }
  return V(adaptive<V>(f, a, mid, left, 0.5 * tolerance, depth - 1, error) +
           adaptive<V>(f, mid, b, right, 0.5 * tolerance, depth - 1, error));
}

/// Integral over [0, t] on fixed panels of at most `width`; throws when the accumulated
/// error estimate exceeds the absolute tolerance.
template <typename V, typename F>
V integrate_panels(const F& f, double t, double width, const QuadratureConfig& q, const char* what) {
  const int panels = std::max(1, static_cast<int>(std::ceil(t / width)));
  const double step = t / panels;
  V total = gauss_legendre<V>(f, 0.0, 0.0);
  double error = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * step;
    const double b = (k + 1) * step;
    total += adaptive<V>(f, a, b, gauss_legendre<V>(f, a, b), q.tolerance / panels, q.max_depth, &error);
  }
  if (!(error <= q.tolerance)) {
    std::ostringstream os;
    os << what << ": quadrature error estimate " << error << " above " << q.tolerance;
    throw Error(ErrorCode::quadrature_not_converged, os.str());
  }
  return total;
}

double panel_width(const BrownianParams& p, const QuadratureConfig& q) {
  // The coefficients relax on 1/omega_c and oscillate on 1/omega_O.
  return std::min(q.panel_width / p.omega_O, 1.0 / p.omega_c());
}

}  // namespace

void BrownianParams::validate() const {
  if (!(g > 0.0) || !(x > 0.0) || !(kT > 0.0) || !(omega_O > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "BrownianParams: g, x, kT and omega_O must be > 0");
  }
}

BrownianCoefficients coefficients(double tau, const BrownianParams& p) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::invalid_argument, "coefficients: tau must be >= 0");
  const double x = p.x;
  const double prefactor = p.g * p.g * p.omega_O * x * x / (2.0 * (1.0 + x * x));
  const double decay = std::exp(-tau);
  const double c = std::cos(tau / x);
  const double s = std::sin(tau / x);
  BrownianCoefficients v;
  v.delta = prefactor * p.kT * (x - decay * (x * c - s));
  v.xi = prefactor * p.kT * (1.0 - decay * (c + x * s));
  v.gamma = prefactor * (1.0 - decay * (c + x * s));
  return v;
}

Eigen::Matrix2d PropagatedState::rotation() const { return rotation_matrix(angle); }

Eigen::Matrix2d diffusion_matrix(double s, const BrownianParams& p) {
  const BrownianCoefficients v = coefficients(p.omega_c() * s, p);
  Eigen::Matrix2d m;
  m << 2.0 * v.delta, -v.xi, -v.xi, 0.0;
  return m;
}

double gamma_integral(double t, const BrownianParams& p, const QuadratureConfig& q) {
  const auto rate = [&](double s) { return coefficients(p.omega_c() * s, p).gamma; };
  if (t == 0.0) return 0.0;
  return 2.0 * integrate_panels<double>(rate, t, panel_width(p, q), q, "gamma_integral");
}

PropagatedState propagate(double t, const BrownianParams& p, const QuadratureConfig& q) {
  p.validate();
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "propagate: t must be >= 0");
  PropagatedState st;
  st.time = t;
  st.angle = p.omega_O * t;
  if (p.include_gamma_integral) st.big_gamma = gamma_integral(t, p, q);

  // Entries (0,0), (0,1), (1,1) of int_0^t e^{-Gamma(s)} R^T(s) M(s) R(s) ds.
  Eigen::Matrix2d inner = Eigen::Matrix2d::Zero();
  if (t > 0.0) {
    const auto integrand = [&](double s) -> Eigen::Vector3d {
      const Eigen::Matrix2d r = rotation_matrix(p.omega_O * s);
      const Eigen::Matrix2d rotated = r.transpose() * diffusion_matrix(s, p) * r;
      const double weight = p.include_gamma_integral ? std::exp(-gamma_integral(s, p, q)) : 1.0;
      return weight * Eigen::Vector3d(rotated(0, 0), rotated(0, 1), rotated(1, 1));
    };
    const Eigen::Vector3d entries = integrate_panels<Eigen::Vector3d>(integrand, t, panel_width(p, q), q, "propagate");
    inner << entries(0), entries(1), entries(1), entries(2);
  }

  const Eigen::Matrix2d r = st.rotation();
  st.wbar = 0.5 * std::exp(-st.big_gamma) * r * inner * r.transpose();
  st.wbar = 0.5 * (st.wbar + st.wbar.transpose()).eval();
  return st;
}

Kernel evolved_block_kernel(Spin i, Spin j, const PropagatedState& st, const CatState& cat) {
  const Kernel initial = coherent_block_kernel<double>(cat.xi(i), cat.xi(j));
  // chi_t(z) = exp(-z^T Wbar z) chi_0(e^{-Gamma/2} R^T z)
  Kernel k;
  const double shrink = std::exp(-st.big_gamma);
  k.quad = shrink * initial.quad + st.wbar;
  k.lin = std::sqrt(shrink) * (st.rotation().cast<cdouble>() * initial.lin);
  k.scale = initial.scale;
  return k;
}

BrownianModel::BrownianModel(BrownianParams p, CatState cat, QuadratureConfig q)
    : params_(p), cat_(cat), quadrature_(q) {
  params_.validate();
}

std::shared_ptr<const BrownianModel::Blocks> BrownianModel::blocks_at(double tau) const {
  {
    std::shared_lock lock(mutex_);
    const auto it = cache_.find(tau);
    if (it != cache_.end()) return it->second;
  }
  const PropagatedState st = propagate(tau / params_.omega_c(), params_, quadrature_);
  auto blocks = std::make_shared<Blocks>(Blocks{evolved_block_kernel(Spin::up, Spin::up, st, cat_),
                                                evolved_block_kernel(Spin::down, Spin::down, st, cat_),
                                                evolved_block_kernel(Spin::up, Spin::down, st, cat_)});
  std::unique_lock lock(mutex_);
  return cache_.emplace(tau, std::move(blocks)).first->second;
}

Eigen::Vector2d BrownianModel::spin_components(cdouble beta, double tau) const {
  const auto blocks = blocks_at(tau);
  const cdouble up_up = parity_from_kernel(blocks->up_up, beta);
  const cdouble down_down = parity_from_kernel(blocks->down_down, beta);
  const cdouble up_down = parity_from_kernel(blocks->up_down, beta);
  return {up_down.real(), 0.5 * (up_up - down_down).real()};
}

std::string BrownianModel::describe() const {
  std::ostringstream os;
  os << "brownian(g=" << params_.g << ", x=" << params_.x << ", kT=" << params_.kT << ", D=" << cat_.amplitude
     << (params_.include_gamma_integral ? ", gamma-integral" : "") << ")";
  return os.str();
}

}  // namespace catbell
