#pragma once

// Cross-validation of every closed-form correlation against the truncated-Fock oracles.

#include <cstdint>
#include <string>
#include <vector>

namespace catbell {

struct ValidationRecord {
  std::string channel;
  std::string point;
  double closed = 0.0;
  double oracle = 0.0;
  double diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationOptions {
  /// Random (theta, beta, t) points per channel and parameter set.
  int points = 50;
  std::uint64_t seed = 20110311;
  int cutoff = 40;
  int brownian_cutoff = 60;
};

/// ad-spin, ad-cv, pd-spin, pd-cv, spinstar, postmarkov, brownian.
const std::vector<std::string>& validation_channels();

/// Throws Error(invalid_argument) for an unknown channel.
std::vector<ValidationRecord> validate_channel(const std::string& channel, const ValidationOptions& options = {});

/// "channel,point,closed,oracle,diff,PASS|FAIL"
std::string format_record(const ValidationRecord& r);

}  // namespace catbell
