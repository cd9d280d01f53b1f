#include "catbell/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "catbell/brownian.hpp"
#include "catbell/error.hpp"
#include "catbell/markov.hpp"
#include "catbell/oracle.hpp"
#include "catbell/postmarkov.hpp"
#include "catbell/spinstar.hpp"

namespace catbell {

namespace {

constexpr double kAmplitude = 2.0;

/// FNV-1a, so that each channel draws its own reproducible stream.
std::uint64_t channel_salt(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
  return h;
}

struct Sampler {
  std::mt19937_64 engine;
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double theta() { return uniform(-std::numbers::pi, std::numbers::pi); }
  cdouble beta() { return {uniform(-1.2, 1.2), uniform(-1.2, 1.2)}; }
};

std::string point_label(double theta, cdouble beta, const char* t_name, double t, const std::string& extra = "") {
  char buf[256];
  std::snprintf(buf, sizeof buf, "theta=%.6f;beta=%.6f%+.6fi;%s=%.6f%s", theta, beta.real(), beta.imag(), t_name, t,
                extra.c_str());
  return buf;
}

ValidationRecord make_record(const std::string& channel, std::string point, double closed, double oracle,
                             double tolerance) {
  ValidationRecord r{channel, std::move(point), closed, oracle, std::abs(closed - oracle), tolerance, false};
  r.pass = r.diff <= tolerance;
  return r;
}

std::array<Eigen::Matrix2cd, 4> unit_images(const std::function<Eigen::Matrix2cd(const Eigen::Matrix2cd&)>& map) {
  std::array<Eigen::Matrix2cd, 4> images;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
      e(i, j) = 1.0;
      images[2 * i + j] = map(e);
    }
  }
  return images;
}

std::vector<ValidationRecord> validate_kraus(const std::string& channel, const ValidationOptions& o) {
  Sampler s{std::mt19937_64(o.seed ^ channel_salt(channel))};
  const FockOperator cat = truncated_cat(kAmplitude, o.cutoff);
  std::vector<ValidationRecord> out;
  for (int k = 0; k < o.points; ++k) {
    const double theta = s.theta();
    const cdouble beta = s.beta();
    // Stay short of P = 1 where tau_pd diverges and no finite Kraus set exists.
    const double prob = s.uniform(0.0, 0.995);
    const double eta = AdParams::from_probability(prob).eta;
    const double tau = PdParams::from_probability(prob).tau_pd;
    const std::string label = point_label(theta, beta, "P", prob);
    if (channel == "ad-spin") {
      const FockOperator rho = evolve_kraus(cat, KrausChannel::amplitude_damping, KrausTarget::spin, eta);
      out.push_back(make_record(channel, label, corr_ad_spin(beta, theta, eta, kAmplitude),
                                expectation_sigma_parity(rho, theta, beta), 1e-10));
    } else if (channel == "ad-cv") {
      const FockOperator rho = evolve_kraus(cat, KrausChannel::amplitude_damping, KrausTarget::cv, eta);
      out.push_back(make_record(channel, label, corr_ad_cv(beta, theta, eta, kAmplitude),
                                expectation_sigma_parity(rho, theta, beta), 1e-10));
    } else if (channel == "pd-spin") {
      const FockOperator rho = evolve_kraus(cat, KrausChannel::phase_damping, KrausTarget::spin, tau);
      out.push_back(make_record(channel, label, corr_pd_spin(beta, theta, tau, kAmplitude),
                                expectation_sigma_parity(rho, theta, beta), 1e-10));
    } else {
      const FockOperator rho = evolve_kraus(cat, KrausChannel::phase_damping, KrausTarget::cv, tau);
      const double oracle = expectation_sigma_parity(rho, theta, beta);
      PdCvTruncation trunc;
      trunc.n_max = o.cutoff;
      out.push_back(make_record(channel, label + ";route=kraus-sum", corr_pd_cv(beta, theta, tau, kAmplitude, trunc),
                                oracle, 1e-7));
      out.push_back(make_record(channel, label + ";route=phase-average",
                                corr_pd_cv_phase_average(beta, theta, tau, kAmplitude), oracle, 1e-7));
    }
  }
  return out;
}

std::vector<ValidationRecord> validate_spinstar(const ValidationOptions& o) {
  Sampler s{std::mt19937_64(o.seed ^ channel_salt("spinstar"))};
  const FockOperator cat = truncated_cat(kAmplitude, o.cutoff);
  std::vector<ValidationRecord> out;
  for (int k = 0; k < o.points; ++k) {
    const double theta = s.theta();
    const cdouble beta = s.beta();
    const double tau_s = s.uniform(0.0, std::numbers::pi);
    const int n_spins = 1 + static_cast<int>(s.uniform(0.0, 6.0));
    const auto images = unit_images([&](const Eigen::Matrix2cd& x) { return spinstar_reduced_map(x, tau_s, n_spins); });
    const double oracle = expectation_sigma_parity(apply_spin_map(cat, images), theta, beta);
    const double closed = corr_spinstar(theta, beta, tau_s, SpinStarParams{n_spins}, kAmplitude);
    out.push_back(make_record("spinstar", point_label(theta, beta, "tau_s", tau_s, ";n_spins=" + std::to_string(n_spins)),
                              closed, oracle, 1e-10));
  }
  return out;
}

std::vector<ValidationRecord> validate_postmarkov(const ValidationOptions& o) {
  Sampler s{std::mt19937_64(o.seed ^ channel_salt("postmarkov"))};
  const FockOperator cat = truncated_cat(kAmplitude, o.cutoff);
  const CatState state{kAmplitude};
  std::vector<ValidationRecord> out;
  for (int k = 0; k < o.points; ++k) {
    const double theta = s.theta();
    const cdouble beta = s.beta();
    PostMarkovParams p;
    p.gamma0 = 1.0;
    p.gamma = std::exp(s.uniform(std::log(0.05), std::log(20.0)));
    p.nbar = s.uniform(0.0, 3.0);
    const double tau_sl = s.uniform(0.0, 4.0);
    const auto images = unit_images([&](const Eigen::Matrix2cd& x) { return postmarkov_embedding_evolve(x, tau_sl, p); });
    const double oracle = expectation_sigma_parity(apply_spin_map(cat, images), theta, beta);
    const double closed = PostMarkovModel(p, state).correlation({theta, beta}, tau_sl);
    char extra[96];
    std::snprintf(extra, sizeof extra, ";gamma=%.6f;nbar=%.6f", p.gamma, p.nbar);
    out.push_back(make_record("postmarkov", point_label(theta, beta, "tau_sl", tau_sl, extra), closed, oracle, 1e-10));
  }
  return out;
}

std::vector<ValidationRecord> validate_brownian(const ValidationOptions& o) {
  Sampler s{std::mt19937_64(o.seed ^ channel_salt("brownian"))};
  const FockOperator cat = truncated_cat(kAmplitude, o.brownian_cutoff);
  const CatState state{kAmplitude};
  std::vector<ValidationRecord> out;
  constexpr int kTimes = 5;
  for (const auto& [x, g] : {std::pair{10.0, 0.3}, std::pair{0.2, 0.05}}) {
    BrownianParams p;
    p.x = x;
    p.g = g;
    p.kT = 25.0;
    const BrownianModel model(p, state);
    // tau in (0, 2], i.e. t up to 2 / omega_c.
    std::vector<double> taus(kTimes);
    for (double& tau : taus) tau = s.uniform(0.0, 2.0);
    std::sort(taus.begin(), taus.end());
    std::vector<double> times(kTimes);
    std::transform(taus.begin(), taus.end(), times.begin(), [&](double tau) { return tau / p.omega_c(); });
    const std::vector<FockOperator> states = evolve_brownian_snapshots(cat, p, times);
    for (int k = 0; k < o.points; ++k) {
      const int which = k % kTimes;
      const double theta = s.theta();
      const cdouble beta = s.beta();
      char extra[64];
      std::snprintf(extra, sizeof extra, ";x=%g;g=%g", x, g);
      out.push_back(make_record("brownian", point_label(theta, beta, "tau", taus[which], extra),
                                model.correlation({theta, beta}, taus[which]),
                                expectation_sigma_parity(states[which], theta, beta), 1e-5));
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& validation_channels() {
  static const std::vector<std::string> names{"ad-spin", "ad-cv", "pd-spin", "pd-cv", "spinstar", "postmarkov", "brownian"};
  return names;
}

std::vector<ValidationRecord> validate_channel(const std::string& channel, const ValidationOptions& options) {
  if (options.points < 1) throw Error(ErrorCode::invalid_argument, "validate_channel: points must be >= 1");
  if (channel == "ad-spin" || channel == "ad-cv" || channel == "pd-spin" || channel == "pd-cv") {
    return validate_kraus(channel, options);
  }
  if (channel == "spinstar") return validate_spinstar(options);
  if (channel == "postmarkov") return validate_postmarkov(options);
  if (channel == "brownian") return validate_brownian(options);
  throw Error(ErrorCode::invalid_argument, "validate_channel: unknown channel '" + channel + "'");
}

std::string format_record(const ValidationRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.3e,%s", r.channel.c_str(), r.point.c_str(), r.closed, r.oracle,
                r.diff, r.pass ? "PASS" : "FAIL");
  return buf;
}

}  // namespace catbell
