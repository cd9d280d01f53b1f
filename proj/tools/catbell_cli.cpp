// catbell: sweeps of the optimized Bell-CHSH function, oracle validation, and figure presets.
//
// Exit codes: 0 ok, 1 validation failure, 2 bad configuration or usage, 3 model error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "catbell/error.hpp"
#include "catbell/experiment.hpp"
#include "catbell/validation.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitModel = 3;

const char* output_dir_env() {
  const char* dir = std::getenv("CATBELL_OUTPUT_DIR");
  return (dir && *dir) ? dir : nullptr;
}

struct SweepOptions {
  std::string config;
  catbell::ExperimentConfig cfg;
  std::vector<double> grid;
  double grid_start = 0.0;
  double grid_stop = 1.0;
  int grid_points = 0;
  std::string output;
};

void add_sweep_options(CLI::App* sub, SweepOptions& o) {
  sub->add_option("--config", o.config, "key = value file using the long option names; flags override it");
  auto& c = o.cfg;
  sub->add_option("--channel", c.channel, "pure, ad-spin, ad-cv, pd-spin, pd-cv, brownian, spinstar, postmarkov")
      ->capture_default_str();
  sub->add_option("--amplitude", c.amplitude, "Cat amplitude D")->capture_default_str();
  sub->add_option("--sweep", c.sweep, "t (dynamical parameter) or nbar")->capture_default_str();
  sub->add_option("--fixed-t", c.fixed_t, "tau_sl held fixed during nbar sweeps")->capture_default_str();
  sub->add_option("--grid", o.grid, "Explicit comma-separated grid")->delimiter(',');
  sub->add_option("--grid-start", o.grid_start, "First grid value")->capture_default_str();
  sub->add_option("--grid-stop", o.grid_stop, "Last grid value")->capture_default_str();
  sub->add_option("--grid-points", o.grid_points, "Number of equally spaced grid values");
  sub->add_option("--g", c.brownian.g, "Brownian coupling g")->capture_default_str();
  sub->add_option("--x", c.brownian.x, "omega_c / omega_O")->capture_default_str();
  sub->add_option("--kT", c.brownian.kT, "k_B T / hbar omega_c")->capture_default_str();
  sub->add_flag("--gamma-integral", c.brownian.include_gamma_integral, "Keep the exp(-Gamma) factors");
  sub->add_option("--n-spins", c.spinstar.n_spins, "Spin-star size")->capture_default_str();
  sub->add_option("--gamma0", c.postmarkov.gamma0, "Markovian dissipation rate")->capture_default_str();
  sub->add_option("--gamma", c.postmarkov.gamma, "Memory-kernel rate")->capture_default_str();
  sub->add_option("--nbar", c.postmarkov.nbar, "Thermal occupation")->capture_default_str();
  sub->add_option("--restarts", c.optimizer.restarts, "Optimizer restarts")->capture_default_str();
  sub->add_option("--seed", c.optimizer.seed, "Offset of the restart sequence")->capture_default_str();
  sub->add_option("--beta-box", c.optimizer.beta_box, "Search box half-width for Re/Im beta")->capture_default_str();
  sub->add_option("--max-evaluations", c.optimizer.max_evaluations, "Per local search")->capture_default_str();
  sub->add_option("--workers", c.workers, "Concurrent grid points")->capture_default_str();
  sub->add_option("--output", o.output, "CSV path (default: $CATBELL_OUTPUT_DIR/sweep_<channel>.csv or stdout)");
}

int run_sweep_command(SweepOptions& o) {
  catbell::ExperimentConfig cfg = o.cfg;
  if (!o.grid.empty()) {
    cfg.grid = o.grid;
  } else if (o.grid_points > 0) {
    cfg.grid = catbell::linspace(o.grid_start, o.grid_stop, o.grid_points);
  }
  try {
    cfg.validate();
  } catch (const catbell::Error& e) {
    std::cerr << "catbell sweep: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  }

  std::string path = o.output;
  if (path.empty() && output_dir_env()) {
    path = (std::filesystem::path(output_dir_env()) / ("sweep_" + cfg.channel + ".csv")).string();
  }
  std::vector<catbell::SweepRow> rows;
  try {
    rows = catbell::run_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << "catbell sweep: model error: " << e.what() << '\n';
    return kExitModel;
  }
  if (path.empty()) {
    catbell::write_sweep_csv(std::cout, rows);
    return 0;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "catbell sweep: cannot write " << path << '\n';
    return kExitUsage;
  }
  catbell::write_sweep_csv(out, rows);
  return 0;
}

int run_validate_command(std::vector<std::string> channels, const catbell::ValidationOptions& options,
                         const std::string& report_path) {
  if (channels.empty()) channels = catbell::validation_channels();
  for (const auto& name : channels) {
    const auto& known = catbell::validation_channels();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::cerr << "catbell validate: unknown channel '" << name << "'\n";
      return kExitUsage;
    }
  }
  std::ofstream file;
  if (!report_path.empty()) {
    file.open(report_path, std::ios::binary);
    if (!file) {
      std::cerr << "catbell validate: cannot write " << report_path << '\n';
      return kExitUsage;
    }
  }
  std::ostream& report = report_path.empty() ? std::cout : file;
  report << "channel,point,closed,oracle,diff,pass\n";
  int failures = 0;
  int total = 0;
  for (const auto& name : channels) {
    std::vector<catbell::ValidationRecord> records;
    try {
      records = catbell::validate_channel(name, options);
    } catch (const std::exception& e) {
      std::cerr << "catbell validate: " << name << ": model error: " << e.what() << '\n';
      return kExitModel;
    }
    int channel_failures = 0;
    for (const auto& r : records) {
      report << catbell::format_record(r) << '\n';
      if (!r.pass) ++channel_failures;
    }
    std::cerr << name << ": " << records.size() - channel_failures << "/" << records.size() << " passed\n";
    failures += channel_failures;
    total += static_cast<int>(records.size());
  }
  std::cerr << "total: " << total - failures << "/" << total << " passed\n";
  return failures == 0 ? 0 : kExitValidation;
}

int run_figures_command(const std::string& which, std::string outdir, int workers) {
  if (outdir.empty()) outdir = output_dir_env() ? output_dir_env() : "figures";
  const auto& names = catbell::figure_names();
  if (std::find(names.begin(), names.end(), which) == names.end()) {
    std::cerr << "catbell figures: unknown figure '" << which << "'\n";
    return kExitUsage;
  }
  try {
    for (const auto& file : catbell::run_figure(which, outdir, workers)) std::cout << file << '\n';
  } catch (const std::exception& e) {
    std::cerr << "catbell figures: model error: " << e.what() << '\n';
    return kExitModel;
  }
  return 0;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

/// Turns a key = value file into extra arguments for the options not already on the command line.
/// Blank lines, '#'/';' comments and a [sweep] section header are accepted.
std::vector<std::string> config_arguments(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> args;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line == "[sweep]") continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(number);
    if (eq == std::string::npos) throw CLI::ConversionError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw CLI::ConversionError(where + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") {
        args.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw CLI::ConversionError(where + ": expected true or false for '" + key + "'");
      }
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimized Bell-CHSH function of a qubit-oscillator cat state under open-system dynamics"};
  app.require_subcommand(1);

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Maximize |B| on a grid and write CSV");
  add_sweep_options(sweep_cmd, sweep);

  std::vector<std::string> channels;
  catbell::ValidationOptions validation;
  std::string report;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Cross-check closed forms against the Fock-space oracles");
  validate_cmd->add_option("channels", channels, "Subset of ad-spin, ad-cv, pd-spin, pd-cv, spinstar, postmarkov, brownian");
  validate_cmd->add_option("--points", validation.points, "Random points per channel")->capture_default_str();
  validate_cmd->add_option("--seed", validation.seed, "Random seed")->capture_default_str();
  validate_cmd->add_option("--report", report, "Write the report here instead of stdout");

  std::string figure;
  std::string outdir;
  int workers = 1;
  CLI::App* figures_cmd = app.add_subcommand("figures", "Write the CSV curves of a figure plus a plot script");
  figures_cmd->add_option("which", figure, "fig1, fig2 or fig3")->required();
  figures_cmd->add_option("--outdir", outdir, "Output directory (default: $CATBELL_OUTPUT_DIR or ./figures)");
  figures_cmd->add_option("--workers", workers, "Concurrent grid points")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*sweep_cmd && !sweep.config.empty()) {
      std::vector<std::string> extra = config_arguments(sweep.config, sweep_cmd);
      if (!extra.empty()) {
        // CLI11 consumes arguments from the back.
        std::vector<std::string> args(argv + 1, argv + argc);
        args.insert(args.end(), extra.begin(), extra.end());
        std::reverse(args.begin(), args.end());
        app.parse(args);
      }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*sweep_cmd) return run_sweep_command(sweep);
  if (*validate_cmd) return run_validate_command(channels, validation, report);
  if (*figures_cmd) {
    if (workers < 1) {
      std::cerr << "catbell figures: workers must be >= 1\n";
      return kExitUsage;
    }
    return run_figures_command(figure, outdir, workers);
  }
  return kExitUsage;
}
