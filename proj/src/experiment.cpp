#include "catbell/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <thread>

#include "catbell/error.hpp"
#include "catbell/markov.hpp"

namespace catbell {

namespace {

bool is_markov(const std::string& channel) {
  return channel == "ad-spin" || channel == "ad-cv" || channel == "pd-spin" || channel == "pd-cv";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::invalid_argument, message);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& channel_names() {
  static const std::vector<std::string> names{"pure",     "ad-spin",  "ad-cv",     "pd-spin",
                                              "pd-cv",    "brownian", "spinstar",  "postmarkov"};
  return names;
}

void ExperimentConfig::validate() const {
  require(std::find(channel_names().begin(), channel_names().end(), channel) != channel_names().end(),
          "unknown channel '" + channel + "'");
  require(sweep == "t" || sweep == "nbar", "sweep must be 't' or 'nbar'");
  require(!grid.empty(), "grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(std::isfinite(grid[k]), "grid values must be finite");
    require(k == 0 || grid[k] > grid[k - 1], "grid must be strictly increasing");
  }
  require(std::isfinite(amplitude) && amplitude >= 0.0, "amplitude must be >= 0");
  require(workers >= 1, "workers must be >= 1");
  require(optimizer.restarts >= 1, "restarts must be >= 1");
  require(optimizer.beta_box > 0.0, "beta box must be > 0");
  if (sweep == "nbar") {
    require(channel == "postmarkov", "nbar sweeps need the postmarkov channel");
    require(grid.front() >= 0.0, "nbar grid must be >= 0");
    require(fixed_t >= 0.0, "fixed t must be >= 0");
  } else {
    require(grid.front() >= 0.0, "t grid must be >= 0");
    if (is_markov(channel)) require(grid.back() <= 1.0, "channel probability grid must lie in [0, 1]");
  }
  if (channel == "brownian") brownian.validate();
  if (channel == "spinstar") spinstar.validate();
  if (channel == "postmarkov") {
    PostMarkovParams p = postmarkov;
    if (sweep == "nbar") p.nbar = grid.front();
    p.validate();
  }
}

std::vector<double> linspace(double start, double stop, int points) {
  if (points < 1) return {};
  if (points == 1) return {start};
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = start + (stop - start) * k / (points - 1);
  out.back() = stop;
  return out;
}

std::unique_ptr<CorrelationModel> make_model(const ExperimentConfig& cfg, double nbar) {
  const CatState cat{cfg.amplitude};
  if (cfg.channel == "pure") return std::make_unique<PureCatModel>(cat);
  if (cfg.channel == "ad-spin") return std::make_unique<AdSpinModel>(cat);
  if (cfg.channel == "ad-cv") return std::make_unique<AdCvModel>(cat);
  if (cfg.channel == "pd-spin") return std::make_unique<PdSpinModel>(cat);
  if (cfg.channel == "pd-cv") return std::make_unique<PdCvModel>(cat);
  if (cfg.channel == "brownian") return std::make_unique<BrownianModel>(cfg.brownian, cat);
  if (cfg.channel == "spinstar") return std::make_unique<SpinStarModel>(cfg.spinstar, cat);
  if (cfg.channel == "postmarkov") {
    PostMarkovParams p = cfg.postmarkov;
    p.nbar = nbar;
    return std::make_unique<PostMarkovModel>(p, cat);
  }
  throw Error(ErrorCode::invalid_argument, "unknown channel '" + cfg.channel + "'");
}

std::unique_ptr<CorrelationModel> make_model(const ExperimentConfig& cfg) {
  return make_model(cfg, cfg.postmarkov.nbar);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.grid.size();
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  const std::unique_ptr<CorrelationModel> shared = cfg.sweep == "t" ? make_model(cfg) : nullptr;

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        const double value = cfg.grid[k];
        rows[k].sweep_value = value;
        if (shared) {
          rows[k].result = maximize_bell(*shared, value, cfg.optimizer);
        } else {
          rows[k].result = maximize_bell(*make_model(cfg, value), cfg.fixed_t, cfg.optimizer);
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(cfg.workers, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sweep_value,max_bell,theta,theta_prime,re_beta,im_beta,re_beta_prime,im_beta_prime,converged_flag\n";
  for (const auto& row : rows) {
    const BellSettings& s = row.result.argmax;
    out << format_double(row.sweep_value) << ',' << format_double(row.result.value) << ','
        << format_double(s.unprimed.theta) << ',' << format_double(s.primed.theta) << ','
        << format_double(s.unprimed.beta.real()) << ',' << format_double(s.unprimed.beta.imag()) << ','
        << format_double(s.primed.beta.real()) << ',' << format_double(s.primed.beta.imag()) << ','
        << (row.result.converged ? 1 : 0) << '\n';
  }
}

void write_trace_distance_csv(std::ostream& out, int n_spins, const std::vector<double>& grid) {
  out << "tau_s,trace_distance\n";
  for (double tau : grid) out << format_double(tau) << ',' << format_double(trace_distance(tau, n_spins)) << '\n';
}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3"};
  return names;
}

std::vector<FigureCurve> figure_curves(const std::string& which) {
  std::vector<FigureCurve> curves;
  ExperimentConfig base;
  base.amplitude = 2.0;
  if (which == "fig1") {
    for (const char* channel : {"ad-spin", "ad-cv", "pd-spin", "pd-cv"}) {
      ExperimentConfig c = base;
      c.channel = channel;
      c.grid = linspace(0.0, 1.0, 21);
      std::string file = std::string("fig1_") + channel + ".csv";
      std::replace(file.begin(), file.end(), '-', '_');
      curves.push_back({file, c});
    }
  } else if (which == "fig2") {
    for (double g : {0.3, 0.1, 0.05}) {
      ExperimentConfig c = base;
      c.channel = "brownian";
      c.brownian.x = 10.0;
      c.brownian.g = g;
      c.brownian.kT = 25.0;
      c.grid = linspace(0.0, 3.0, 61);
      char file[64];
      std::snprintf(file, sizeof file, "fig2a_x10_g%g.csv", g);
      curves.push_back({file, c});
    }
    ExperimentConfig c = base;
    c.channel = "brownian";
    c.brownian.x = 0.2;
    c.brownian.g = 0.05;
    c.brownian.kT = 25.0;
    c.grid = linspace(0.0, 40.0, 2001);
    curves.push_back({"fig2b_x0.2_g0.05.csv", c});
  } else if (which == "fig3") {
    const std::vector<double> tau_s = linspace(0.0, std::numbers::pi, 361);
    for (int n : {2, 5, 100}) {
      ExperimentConfig c = base;
      c.channel = "spinstar";
      c.spinstar.n_spins = n;
      c.grid = tau_s;
      curves.push_back({"fig3a_spinstar_n" + std::to_string(n) + ".csv", c});
    }
    for (int n : {2, 5, 100}) {
      ExperimentConfig c = base;
      c.channel = "spinstar";
      c.spinstar.n_spins = n;
      c.grid = tau_s;
      curves.push_back({"fig3a_trace_distance_n" + std::to_string(n) + ".csv", c, true});
    }
    for (double ratio : {0.05, 1.0, 10.0}) {
      ExperimentConfig c = base;
      c.channel = "postmarkov";
      c.postmarkov = PostMarkovParams{1.0, 1.0 / ratio, 0.0};
      c.grid = linspace(0.0, 4.0, 41);
      char file[64];
      std::snprintf(file, sizeof file, "fig3b_postmarkov_ratio%g.csv", ratio);
      curves.push_back({file, c});
    }
    for (const auto& [ratio, top] : {std::pair{10.0, 3.0}, std::pair{14.3, 300.0}}) {
      ExperimentConfig c = base;
      c.channel = "postmarkov";
      c.postmarkov = PostMarkovParams{1.0, 1.0 / ratio, 0.0};
      c.sweep = "nbar";
      c.fixed_t = 1.6;
      c.grid = linspace(0.0, top, 31);
      char file[64];
      std::snprintf(file, sizeof file, "fig3b_inset_nbar_ratio%g.csv", ratio);
      curves.push_back({file, c});
    }
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown figure '" + which + "'");
  }
  return curves;
}

namespace {

void write_plot_script(const std::filesystem::path& path, const std::string& which,
                       const std::vector<FigureCurve>& curves) {
  std::ofstream out(path, std::ios::binary);
  out << "#!/usr/bin/env python3\n"
      << "# Plots the CSV curves of " << which << " that sit next to this script.\n"
      << "import csv\nimport os\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
      << "here = os.path.dirname(os.path.abspath(__file__))\n"
      << "curves = [\n";
  for (const auto& c : curves) out << "    '" << c.file << "',\n";
  out << "]\n\n"
      << "def load(name):\n"
      << "    with open(os.path.join(here, name)) as f:\n"
      << "        rows = list(csv.reader(f))\n"
      << "    return rows[0], [[float(v) for v in r] for r in rows[1:]]\n\n"
      << "fig, (bell, other) = plt.subplots(1, 2, figsize=(11, 4))\n"
      << "for name in curves:\n"
      << "    header, rows = load(name)\n"
      << "    xs = [r[0] for r in rows]\n"
      << "    ys = [r[1] for r in rows]\n"
      << "    ax = bell if header[1] == 'max_bell' and 'inset' not in name else other\n"
      << "    ax.plot(xs, ys, label=name[:-4])\n"
      << "bell.axhline(2.0, color='k', lw=0.8)\n"
      << "bell.set_ylabel('max |B|')\n"
      << "bell.legend(fontsize=7)\n"
      << "other.legend(fontsize=7)\n"
      << "fig.tight_layout()\n"
      << "fig.savefig(os.path.join(here, '" << which << ".png'), dpi=150)\n";
}

}  // namespace

std::vector<std::string> run_figure(const std::string& which, const std::string& outdir, int workers) {
  const std::vector<FigureCurve> curves = figure_curves(which);
  const std::filesystem::path dir(outdir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const auto& curve : curves) {
    const std::filesystem::path path = dir / curve.file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    if (curve.trace_distance) {
      write_trace_distance_csv(out, curve.config.spinstar.n_spins, curve.config.grid);
    } else {
      ExperimentConfig cfg = curve.config;
      cfg.workers = workers;
      write_sweep_csv(out, run_sweep(cfg));
    }
    written.push_back(path.string());
  }
  const std::filesystem::path script = dir / ("plot_" + which + ".py");
  write_plot_script(script, which, curves);
  written.push_back(script.string());
  return written;
}

}  // namespace catbell
