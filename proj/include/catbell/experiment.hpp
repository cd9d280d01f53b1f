#pragma once

// Sweep runner behind the command-line tool: builds a model from a flat configuration, maximizes
// |B| on a grid, and writes the result rows as CSV.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "catbell/bell.hpp"
#include "catbell/brownian.hpp"
#include "catbell/postmarkov.hpp"
#include "catbell/spinstar.hpp"

namespace catbell {

struct ExperimentConfig {
  /// pure, ad-spin, ad-cv, pd-spin, pd-cv, brownian, spinstar, postmarkov
  std::string channel = "spinstar";
  double amplitude = 2.0;
  BrownianParams brownian;
  SpinStarParams spinstar;
  PostMarkovParams postmarkov;
  /// "t" sweeps the channel's dynamical parameter (P, tau, tau_s or tau_sl); "nbar" sweeps the
  /// thermal occupation of the post-Markovian bath at t = fixed_t.
  std::string sweep = "t";
  double fixed_t = 1.6;
  std::vector<double> grid;
  OptimizerConfig optimizer;
  int workers = 1;

  /// Throws Error(invalid_argument) with a readable message.
  void validate() const;
};

const std::vector<std::string>& channel_names();

/// `points` equally spaced values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, int points);

/// Model at the configured parameters; for nbar sweeps the occupation is `nbar`.
std::unique_ptr<CorrelationModel> make_model(const ExperimentConfig& cfg, double nbar);
std::unique_ptr<CorrelationModel> make_model(const ExperimentConfig& cfg);

struct SweepRow {
  double sweep_value = 0.0;
  BellMaximum result;
};

/// One row per grid point, in grid order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Trace distance |cos 2 tau_s|^{N_s} on a grid, columns tau_s,trace_distance.
void write_trace_distance_csv(std::ostream& out, int n_spins, const std::vector<double>& grid);

struct FigureCurve {
  std::string file;
  ExperimentConfig config;
  /// Trace-distance curves carry no sweep; n_spins is taken from config.spinstar.
  bool trace_distance = false;
};

const std::vector<std::string>& figure_names();

/// The curves of one figure; throws Error(invalid_argument) for an unknown name.
std::vector<FigureCurve> figure_curves(const std::string& which);

/// Writes every CSV of the figure plus plot_<which>.py into outdir; returns the files written.
std::vector<std::string> run_figure(const std::string& which, const std::string& outdir, int workers);

}  // namespace catbell
