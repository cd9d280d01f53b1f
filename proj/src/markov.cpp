#include "catbell/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "catbell/error.hpp"
#include "catbell/phase_space.hpp"

namespace catbell {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// exp(log_prefactor) * b^power for integer power >= 0 without overflow.
cdouble scaled_power(cdouble b, int power, double log_prefactor) {
  if (power < 0) throw Error(ErrorCode::invalid_index, "scaled_power: negative power");
  if (power == 0) return std::exp(log_prefactor);
  const double modulus = std::abs(b);
  if (modulus == 0.0) return 0.0;
  return std::polar(std::exp(log_prefactor + power * std::log(modulus)), power * std::arg(b));
}

double sign_power(int power) { return (power % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

AdParams AdParams::from_probability(double p_ad) {
  if (!(p_ad >= 0.0 && p_ad <= 1.0)) throw Error(ErrorCode::invalid_argument, "AdParams: P_AD outside [0, 1]");
  return AdParams{1.0 - p_ad * p_ad};
}

double AdParams::probability() const { return std::sqrt(1.0 - eta); }

PdParams PdParams::from_probability(double p_pd) {
  if (!(p_pd >= 0.0 && p_pd <= 1.0)) throw Error(ErrorCode::invalid_argument, "PdParams: P_PD outside [0, 1]");
  const double survival = 1.0 - p_pd * p_pd;
  return PdParams{survival > 0.0 ? std::sqrt(-std::log(survival)) : std::numeric_limits<double>::infinity()};
}

double PdParams::probability() const { return std::sqrt(1.0 - std::exp(-tau_pd * tau_pd)); }

double PdParams::coherence_factor() const { return std::exp(-0.5 * tau_pd * tau_pd); }

Eigen::MatrixXd ad_kraus(int d, int k, double eta) {
  if (d < 1 || k < 0 || k >= d) throw Error(ErrorCode::invalid_index, "ad_kraus: need 0 <= k < d");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::invalid_argument, "ad_kraus: eta outside [0, 1]");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int n = k; n < d; ++n) {
    // sqrt(binom(n, k)) eta^{(n-k)/2} (1 - eta)^{k/2} |n-k><n|
    if (k > 0 && eta == 1.0) continue;
    if (n > k && eta == 0.0) continue;
    double log_amp = 0.5 * (log_factorial(n) - log_factorial(k) - log_factorial(n - k));
    if (n > k) log_amp += 0.5 * (n - k) * std::log(eta);
    if (k > 0) log_amp += 0.5 * k * std::log1p(-eta);
    a(n - k, n) = std::exp(log_amp);
  }
  return a;
}

Eigen::MatrixXd pd_kraus(int d, int k, double tau_pd) {
  if (d < 1 || k < 0) throw Error(ErrorCode::invalid_index, "pd_kraus: need d >= 1 and k >= 0");
  if (!(tau_pd >= 0.0)) throw Error(ErrorCode::invalid_argument, "pd_kraus: tau_pd must be >= 0");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    // exp(-n^2 tau^2 / 2) (n tau)^k / sqrt(k!)
    const double x = n * tau_pd;
    if (k == 0) {
      a(n, n) = std::exp(-0.5 * x * x);
    } else if (x > 0.0) {
      a(n, n) = std::exp(-0.5 * x * x + k * std::log(x) - 0.5 * log_factorial(k));
    }
  }
  return a;
}

int pd_kraus_cutoff(int d, double tau_pd, double tolerance) {
  // Worst row is n = d - 1: sum_k A_k^2 there is a Poisson(lambda) CDF with lambda = (n tau)^2.
  // The tail is summed from the far end so that it stays accurate below the rounding of the CDF.
  const double lambda = std::pow((d - 1) * tau_pd, 2);
  if (lambda == 0.0) return 0;
  if (!std::isfinite(lambda)) throw Error(ErrorCode::invalid_argument, "pd_kraus_cutoff: tau_pd must be finite");
  const int last = static_cast<int>(std::ceil(lambda + 40.0 * std::sqrt(lambda) + 100.0));
  std::vector<double> tail(last + 2, 0.0);
  for (int k = last; k >= 0; --k) tail[k] = tail[k + 1] + std::exp(-lambda + k * std::log(lambda) - log_factorial(k));
  for (int k = 0; k <= last; ++k) {
    if (tail[k + 1] <= tolerance) return k;
  }
  throw Error(ErrorCode::truncation_not_converged, "pd_kraus_cutoff: no cutoff reaches the tolerance");
}

double kraus_completeness_residual(const std::vector<Eigen::MatrixXd>& kraus) {
  if (kraus.empty()) return 1.0;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& a : kraus) sum.noalias() += a.transpose() * a;
  return (sum - Eigen::MatrixXd::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

double corr_ad_spin(cdouble beta, double theta, double eta, double amplitude) {
  const double d = amplitude;
  const double plus = std::norm(beta + d);
  return 0.5 * std::exp(-2.0 * plus) * ((2.0 * eta - 1.0) * std::exp(8.0 * beta.real() * d) - 1.0) *
             std::cos(theta) +
         std::sqrt(eta) * std::exp(-2.0 * std::norm(beta)) * std::cos(4.0 * d * beta.imag()) * std::sin(theta);
}

double corr_ad_cv(cdouble beta, double theta, double eta, double amplitude) {
  const double d = amplitude;
  const double damped = d * std::sqrt(eta);
  const double plus = std::norm(beta + damped);
  return 0.5 * std::exp(-2.0 * plus) * (std::exp(8.0 * beta.real() * damped) - 1.0) * std::cos(theta) +
         std::exp(-2.0 * (std::norm(beta) + d * d * (1.0 - eta))) * std::cos(4.0 * damped * beta.imag()) *
             std::sin(theta);
}

double corr_pd_spin(cdouble beta, double theta, double tau_pd, double amplitude) {
  const double d = amplitude;
  const double plus = std::norm(beta + d);
  return 0.5 * std::exp(-2.0 * plus) * (std::exp(8.0 * beta.real() * d) - 1.0) * std::cos(theta) +
         std::exp(-2.0 * std::norm(beta) - 0.5 * tau_pd * tau_pd) * std::cos(4.0 * d * beta.imag()) *
             std::sin(theta);
}

cdouble parity_pair_term(int m, int n, int k, cdouble beta) {
  if (m < 0 || n < 0 || k < 0) throw Error(ErrorCode::invalid_index, "parity_pair_term: negative index");
  const int even = 2 * k;
  const int odd = even + 1;
  const double x = std::norm(beta);
  const cdouble bc = std::conj(beta);

  if (m >= odd && even >= n) {
    // sqrt(n!/m!) b^{m-n} e^{-x} (-1)^{2k-n} [L_{2k}^{(m-2k)} L_n^{(2k-n)} + L_{2k+1}^{(m-2k-1)} L_n^{(2k+1-n)}]
    const cdouble pre = scaled_power(beta, m - n, 0.5 * (log_factorial(n) - log_factorial(m)) - x);
    return pre * sign_power(even - n) *
           (laguerre(even, m - even, x) * laguerre(n, even - n, x) +
            laguerre(odd, m - odd, x) * laguerre(n, odd - n, x));
  }
  if (even >= m && even >= n) {
    // sqrt(m! n!)/(2k)! (-b*)^{2k-m} (-b)^{2k-n} e^{-x} [L_m^{(2k-m)} L_n^{(2k-n)} - x/(2k+1) L_m^{(2k+1-m)} L_n^{(2k+1-n)}]
    const double log_even = 0.5 * (log_factorial(m) + log_factorial(n)) - log_factorial(even) - x;
    const double log_odd = 0.5 * (log_factorial(m) + log_factorial(n)) - log_factorial(odd) - x;
    const cdouble first = scaled_power(-bc, even - m, 0.0) * scaled_power(-beta, even - n, log_even) *
                          laguerre(m, even - m, x) * laguerre(n, even - n, x);
    const cdouble second = scaled_power(-bc, odd - m, 0.0) * scaled_power(-beta, odd - n, log_odd) *
                           laguerre(m, odd - m, x) * laguerre(n, odd - n, x);
    return first - second;
  }
  if (m >= odd && n >= odd) {
    // (2k)!/sqrt(m! n!) b^{m-2k} b*^{n-2k} e^{-x} [L_{2k}^{(m-2k)} L_{2k}^{(n-2k)} - (2k+1)/x L_{2k+1}^{(m-2k-1)} L_{2k+1}^{(n-2k-1)}]
    const double log_even = log_factorial(even) - 0.5 * (log_factorial(m) + log_factorial(n)) - x;
    const double log_odd = log_factorial(odd) - 0.5 * (log_factorial(m) + log_factorial(n)) - x;
    const cdouble first = scaled_power(beta, m - even, 0.0) * scaled_power(bc, n - even, log_even) *
                          laguerre(even, m - even, x) * laguerre(even, n - even, x);
    const cdouble second = scaled_power(beta, m - odd, 0.0) * scaled_power(bc, n - odd, log_odd) *
                           laguerre(odd, m - odd, x) * laguerre(odd, n - odd, x);
    return first - second;
  }
  // n >= 2k+1 and 2k >= m:
  // sqrt(m!/n!) b*^{n-m} e^{-x} (-1)^{2k-m} [L_m^{(2k-m)} L_{2k}^{(n-2k)} + L_m^{(2k+1-m)} L_{2k+1}^{(n-2k-1)}]
  const cdouble pre = scaled_power(bc, n - m, 0.5 * (log_factorial(m) - log_factorial(n)) - x);
  return pre * sign_power(even - m) *
         (laguerre(m, even - m, x) * laguerre(even, n - even, x) +
          laguerre(m, odd - m, x) * laguerre(odd, n - odd, x));
}

cdouble parity_matrix_element_pairwise(int m, int n, cdouble beta, double tolerance) {
  const int check_from = (std::max(m, n) + static_cast<int>(std::ceil(std::norm(beta)))) / 2 + 1;
  constexpr int kMaxPairs = 250;
  cdouble sum = 0.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxPairs; ++k) {
    const cdouble term = parity_pair_term(m, n, k, beta);
    sum += term;
    const double modulus = std::abs(term);
    if (k >= check_from && modulus < tolerance && last < tolerance) return sum;
    last = modulus;
  }
  throw Error(ErrorCode::truncation_not_converged, "parity_matrix_element_pairwise: pair sum did not converge");
}

double corr_pd_cv(cdouble beta, double theta, double tau_pd, double amplitude, const PdCvTruncation& trunc) {
  const double d = amplitude;
  const int n_max = trunc.n_max;
  if (n_max < static_cast<int>(std::ceil(d * d + 10.0 * d))) {
    throw Error(ErrorCode::cutoff_too_small, "corr_pd_cv: n_max below D^2 + 10 D");
  }
  if (!(tau_pd >= 0.0) || !std::isfinite(tau_pd)) {
    throw Error(ErrorCode::invalid_argument, "corr_pd_cv: tau_pd must be finite and >= 0");
  }

  // Fock tail of the coherent amplitude.
  double norm = 0.0;
  for (int n = 0; n < n_max; ++n) norm += std::exp(-d * d + 2.0 * n * std::log(std::max(d, 1e-300)) - log_factorial(n));
  if (d == 0.0) norm = 1.0;
  if (1.0 - norm > trunc.tolerance) {
    throw Error(ErrorCode::truncation_not_converged, "corr_pd_cv: Fock cutoff leaves a coherent tail above tolerance");
  }

  const double tau2 = tau_pd * tau_pd;
  int k_max = trunc.k_max;
  if (k_max <= 0) {
    const double lambda = std::pow(n_max - 1, 2) * tau2;
    k_max = static_cast<int>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 30.0));
  }

  // Omega without the k-dependent factor: e^{-D^2} D^{n+m}/sqrt(n! m!) times the spin-angle
  // weight {sin(theta)[(-1)^m + (-1)^n] + cos(theta)[1 - (-1)^{n+m}]}.
  Eigen::MatrixXd omega(n_max, n_max);
  Eigen::MatrixXcd parity(n_max, n_max);  // parity(m, n) = <m| Pi(beta) |n>
  for (int n = 0; n < n_max; ++n) {
    for (int m = 0; m < n_max; ++m) {
      const double angular = std::sin(theta) * (sign_power(m) + sign_power(n)) +
                             std::cos(theta) * (1.0 - sign_power(n + m));
      const double log_amp = d > 0.0 ? -d * d + (n + m) * std::log(d) - 0.5 * (log_factorial(n) + log_factorial(m))
                                     : ((n + m) == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
      omega(n, m) = std::exp(log_amp) * angular;
    }
  }
  for (int m = 0; m < n_max; ++m) {
    for (int n = m; n < n_max; ++n) {
      parity(m, n) = parity_matrix_element_pairwise(m, n, beta);
      parity(n, m) = std::conj(parity(m, n));
    }
  }

  // sum_k tau^{2k}/k! sum_{n,m} Omega_k(n, m) <m|Pi|n>
  double total = 0.0;
  double tail = 0.0;
  for (int n = 0; n < n_max; ++n) {
    for (int m = 0; m < n_max; ++m) {
      const double weight = omega(n, m);
      if (weight == 0.0) continue;
      const double base = -0.5 * (n * n + m * m) * tau2;
      const double lambda = static_cast<double>(n) * m * tau2;
      double series = 0.0;
      if (lambda == 0.0) {
        series = std::exp(base);
      } else {
        const double log_lambda = std::log(lambda);
        for (int k = 0; k <= k_max; ++k) series += std::exp(base + k * log_lambda - log_factorial(k));
        const double ratio = lambda / (k_max + 2.0);
        const double next = std::exp(base + (k_max + 1) * log_lambda - log_factorial(k_max + 1));
        tail += std::abs(weight) * (ratio < 1.0 ? next / (1.0 - ratio) : 1.0);
      }
      total += weight * series * parity(m, n).real();
    }
  }
  if (tail > trunc.tolerance) {
    throw Error(ErrorCode::truncation_not_converged, "corr_pd_cv: Kraus-index cutoff leaves a tail above tolerance");
  }
  return 0.5 * total;
}

namespace {

int phase_grid_size(double amplitude) {
  const double span = 2.0 * (amplitude * amplitude + 10.0 * amplitude) + 32.0;
  int size = 64;
  while (size < span) size *= 2;
  return size;
}

}  // namespace

namespace {

/// w(phi_p) = 1 + 2 sum_k exp(-k^2 tau^2 / 2) cos(k phi_p) on the size-point grid.
const std::vector<double>& dephasing_weights(double tau_pd, int size) {
  thread_local double cached_tau = -1.0;
  thread_local int cached_size = 0;
  thread_local std::vector<double> weights;
  if (cached_tau == tau_pd && cached_size == size) return weights;

  const double tau2 = tau_pd * tau_pd;
  std::vector<double> cosines(size);
  for (int p = 0; p < size; ++p) cosines[p] = std::cos(2.0 * std::numbers::pi * p / size);
  weights.assign(size, 1.0);
  for (int k = 1; k < size / 2; ++k) {
    const double damping = std::isfinite(tau2) ? std::exp(-0.5 * k * k * tau2) : 0.0;
    if (damping < 1e-300) break;
    for (int p = 0; p < size; ++p) weights[p] += 2.0 * damping * cosines[(static_cast<long>(k) * p) % size];
  }
  cached_tau = tau_pd;
  cached_size = size;
  return weights;
}

}  // namespace

Eigen::Vector2d pd_cv_components_phase_average(cdouble beta, double tau_pd, double amplitude) {
  if (!(tau_pd >= 0.0)) throw Error(ErrorCode::invalid_argument, "pd_cv_components_phase_average: tau_pd must be >= 0");
  const int size = phase_grid_size(amplitude);
  const std::vector<double>& weights = dephasing_weights(tau_pd, size);

  const cdouble up(amplitude, 0.0);
  const cdouble down(-amplitude, 0.0);
  cdouble same_up = 0.0;
  cdouble same_down = 0.0;
  cdouble cross = 0.0;
  for (int p = 0; p < size; ++p) {
    const cdouble rotation = std::polar(1.0, 2.0 * std::numbers::pi * p / size);
    same_up += weights[p] * displaced_parity_coherent(beta, up * rotation, up * rotation);
    same_down += weights[p] * displaced_parity_coherent(beta, down * rotation, down * rotation);
    cross += weights[p] * displaced_parity_coherent(beta, up * rotation, down * rotation);
  }
  same_up /= size;
  same_down /= size;
  cross /= size;
  return {cross.real(), 0.5 * (same_up - same_down).real()};
}

double corr_pd_cv_phase_average(cdouble beta, double theta, double tau_pd, double amplitude) {
  const Eigen::Vector2d v = pd_cv_components_phase_average(beta, tau_pd, amplitude);
  return std::sin(theta) * v(0) + std::cos(theta) * v(1);
}

namespace {

template <typename F>
Eigen::Vector2d components_of(F&& corr) {
  return {corr(kHalfPi), corr(0.0)};
}

std::string describe_channel(const char* name, double amplitude) {
  std::ostringstream os;
  os << name << "(D=" << amplitude << ")";
  return os.str();
}

}  // namespace

Eigen::Vector2d AdSpinModel::spin_components(cdouble beta, double p_ad) const {
  const double eta = AdParams::from_probability(p_ad).eta;
  return components_of([&](double theta) { return corr_ad_spin(beta, theta, eta, cat_.amplitude); });
}

std::string AdSpinModel::describe() const { return describe_channel("ad-spin", cat_.amplitude); }

Eigen::Vector2d AdCvModel::spin_components(cdouble beta, double p_ad) const {
  const double eta = AdParams::from_probability(p_ad).eta;
  return components_of([&](double theta) { return corr_ad_cv(beta, theta, eta, cat_.amplitude); });
}

std::string AdCvModel::describe() const { return describe_channel("ad-cv", cat_.amplitude); }

Eigen::Vector2d PdSpinModel::spin_components(cdouble beta, double p_pd) const {
  const double tau = PdParams::from_probability(p_pd).tau_pd;
  return components_of([&](double theta) { return corr_pd_spin(beta, theta, tau, cat_.amplitude); });
}

std::string PdSpinModel::describe() const { return describe_channel("pd-spin", cat_.amplitude); }

Eigen::Vector2d PdCvModel::spin_components(cdouble beta, double p_pd) const {
  return pd_cv_components_phase_average(beta, PdParams::from_probability(p_pd).tau_pd, cat_.amplitude);
}

std::string PdCvModel::describe() const { return describe_channel("pd-cv", cat_.amplitude); }

}  // namespace catbell
