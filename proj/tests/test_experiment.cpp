#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "catbell/bell.hpp"
#include "catbell/error.hpp"
#include "catbell/experiment.hpp"

using namespace catbell;
namespace fs = std::filesystem;

namespace {

std::string sweep_csv(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_sweep_csv(out, run_sweep(cfg));
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("catbell_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the command-line tool; returns its exit code.
int cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + (env.empty() ? "" : " ") + "\"" CATBELL_CLI_PATH "\" " + args + " 2>/dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig spinstar_config() {
  ExperimentConfig cfg;
  cfg.channel = "spinstar";
  cfg.grid = {0.0, 0.4, std::numbers::pi / 2};
  cfg.optimizer.restarts = 8;
  return cfg;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("linspace includes both ends") {
    const auto g = linspace(0.0, 3.0, 61);
    REQUIRE(g.size() == 61);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 3.0);
    CHECK(g[20] == doctest::Approx(1.0));
    CHECK(linspace(1.0, 2.0, 0).empty());
    CHECK(linspace(1.0, 2.0, 1) == std::vector<double>{1.0});
  }

  TEST_CASE("configuration validation") {
    ExperimentConfig cfg = spinstar_config();
    CHECK_NOTHROW(cfg.validate());
    const auto rejects = [](ExperimentConfig c) { CHECK_THROWS_AS(c.validate(), Error); };
    ExperimentConfig c = cfg;
    c.grid.clear();
    rejects(c);
    c = cfg;
    c.grid = {0.0, 0.5, 0.5};
    rejects(c);
    c = cfg;
    c.channel = "lindblad";
    rejects(c);
    c = cfg;
    c.sweep = "nbar";
    rejects(c);
    c = cfg;
    c.workers = 0;
    rejects(c);
    c = cfg;
    c.channel = "ad-spin";
    c.grid = {0.0, 1.5};
    rejects(c);
    c = cfg;
    c.spinstar.n_spins = 0;
    rejects(c);
    c = cfg;
    c.channel = "postmarkov";
    c.postmarkov.gamma = -1.0;
    rejects(c);
  }

  TEST_CASE("sweep rows follow the grid, respect the Tsirelson bound and do not depend on workers") {
    ExperimentConfig cfg = spinstar_config();
    cfg.grid = linspace(0.0, std::numbers::pi / 2, 9);
    const std::string serial = sweep_csv(cfg);
    cfg.workers = 4;
    const std::string parallel = sweep_csv(cfg);
    CHECK(serial == parallel);
    const auto rows = parse_csv(serial);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"sweep_value", "max_bell", "theta", "theta_prime", "re_beta", "im_beta",
                                              "re_beta_prime", "im_beta_prime", "converged_flag"});
    for (std::size_t k = 1; k < rows.size(); ++k) {
      REQUIRE(rows[k].size() == 9);
      CHECK(std::stod(rows[k][0]) == cfg.grid[k - 1]);
      const double value = std::stod(rows[k][1]);
      CHECK(value >= 0.0);
      CHECK(value <= kTsirelson + 1e-6);
    }
    CHECK(serial.find('\r') == std::string::npos);
  }

  TEST_CASE("rows round-trip at full precision") {
    const auto rows = run_sweep(spinstar_config());
    const auto parsed = parse_csv(sweep_csv(spinstar_config()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      CHECK(std::stod(parsed[k + 1][1]) == rows[k].result.value);
      CHECK(std::stod(parsed[k + 1][4]) == rows[k].result.argmax.unprimed.beta.real());
    }
  }

  TEST_CASE("nbar sweeps hold t fixed") {
    ExperimentConfig cfg;
    cfg.channel = "postmarkov";
    cfg.sweep = "nbar";
    cfg.fixed_t = 1.6;
    cfg.postmarkov = PostMarkovParams{1.0, 0.1, 0.0};
    cfg.grid = {0.0, 1.0};
    cfg.optimizer.restarts = 8;
    const auto rows = run_sweep(cfg);
    PostMarkovParams p = cfg.postmarkov;
    p.nbar = 1.0;
    const PostMarkovModel model(p, CatState{2.0});
    CHECK(rows[1].result.value == doctest::Approx(maximize_bell(model, 1.6, cfg.optimizer).value).epsilon(1e-12));
  }

  TEST_CASE("figure presets") {
    const auto fig1 = figure_curves("fig1");
    CHECK(fig1.size() == 4);
    for (const auto& c : fig1) CHECK(c.config.grid.size() == 21);
    const auto fig2 = figure_curves("fig2");
    REQUIRE(fig2.size() == 4);
    int memory_curves = 0;
    for (const auto& c : fig2) {
      CHECK(c.config.brownian.kT == 25.0);
      CHECK(c.config.amplitude == 2.0);
      if (c.config.brownian.x == 0.2) ++memory_curves;
    }
    CHECK(memory_curves == 1);
    const auto fig3 = figure_curves("fig3");
    int sweeps = 0;
    int distances = 0;
    int insets = 0;
    for (const auto& c : fig3) {
      if (c.trace_distance) {
        ++distances;
      } else {
        ++sweeps;
      }
      if (c.config.sweep == "nbar") {
        ++insets;
        CHECK(c.config.fixed_t == 1.6);
      } else if (c.config.channel == "postmarkov") {
        CHECK(c.config.postmarkov.nbar == 0.0);
      }
    }
    CHECK(sweeps == 8);
    CHECK(distances == 3);
    CHECK(insets == 2);
    CHECK_THROWS_AS(figure_curves("fig9"), Error);
  }

  TEST_CASE("trace-distance CSV") {
    std::ostringstream out;
    write_trace_distance_csv(out, 2, {0.0, std::numbers::pi / 4});
    const auto rows = parse_csv(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"tau_s", "trace_distance"});
    CHECK(std::stod(rows[1][1]) == 1.0);
    CHECK(std::stod(rows[2][1]) < 1e-30);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(cli("") == 2);
    CHECK(cli("sweep --channel spinstar") == 2);
    CHECK(cli("sweep --channel spinstar --grid 0.5,0.1") == 2);
    CHECK(cli("sweep --channel nope --grid 0") == 2);
    CHECK(cli("sweep --no-such-flag") == 2);
    CHECK(cli("validate nope") == 2);
    CHECK(cli("figures fig9") == 2);
    CHECK(cli("sweep --config /nonexistent/catbell.ini") == 2);
  }

  TEST_CASE("model failures exit with 3") {
    CHECK(cli("sweep --channel brownian --kT 1e308 --grid 0.5 --restarts 1") == 3);
  }

  TEST_CASE("validate runs only the requested channel") {
    const fs::path dir = scratch_dir("validate");
    const fs::path report = dir / "report.csv";
    CHECK(cli("validate spinstar --points 3 --report \"" + report.string() + "\"") == 0);
    const auto rows = parse_csv(read_file(report));
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(rows[k][0] == "spinstar");
      CHECK(rows[k].back() == "PASS");
    }
    fs::remove_all(dir);
  }

  TEST_CASE("spin-star sweep revives fully and reruns are byte-identical") {
    const fs::path dir = scratch_dir("sweep");
    const std::string args = "sweep --channel spinstar --n-spins 2 --grid 0,0.7853981633974483,1.5707963267948966 --output ";
    CHECK(cli(args + "\"" + (dir / "a.csv").string() + "\"") == 0);
    CHECK(cli(args + "\"" + (dir / "b.csv").string() + "\"") == 0);
    const std::string a = read_file(dir / "a.csv");
    CHECK(a == read_file(dir / "b.csv"));
    const auto rows = parse_csv(a);
    REQUIRE(rows.size() == 4);
    CHECK(std::abs(std::stod(rows[1][1]) - std::stod(rows[3][1])) < 1e-9);
    CHECK(std::stod(rows[2][1]) < 2.0);
    fs::remove_all(dir);
  }

  TEST_CASE("amplitude-damped spin sweep is nonincreasing") {
    const fs::path dir = scratch_dir("ad");
    CHECK(cli("sweep --channel ad-spin --grid-start 0 --grid-stop 1 --grid-points 11 --output \"" +
              (dir / "ad.csv").string() + "\"") == 0);
    const auto rows = parse_csv(read_file(dir / "ad.csv"));
    REQUIRE(rows.size() == 12);
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][1]) <= std::stod(rows[k - 1][1]) + 1e-6);
    fs::remove_all(dir);
  }

  TEST_CASE("output directory variable is honored when no path is given") {
    const fs::path dir = scratch_dir("env");
    CHECK(cli("sweep --channel pure --grid 0 --restarts 4", "CATBELL_OUTPUT_DIR=\"" + dir.string() + "\"") == 0);
    CHECK(fs::exists(dir / "sweep_pure.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("command-line flags override config values") {
    const fs::path dir = scratch_dir("config");
    {
      std::ofstream ini(dir / "run.ini");
      ini << "# comment\nchannel = spinstar\nn-spins = 5\ngrid = 0.2,0.3\nrestarts = 4\n";
    }
    const std::string base = "sweep --config \"" + (dir / "run.ini").string() + "\" --output ";
    CHECK(cli(base + "\"" + (dir / "file.csv").string() + "\"") == 0);
    CHECK(cli(base + "\"" + (dir / "flag.csv").string() + "\" --grid 0.2") == 0);
    const auto from_file = parse_csv(read_file(dir / "file.csv"));
    const auto from_flag = parse_csv(read_file(dir / "flag.csv"));
    CHECK(from_file.size() == 3);
    REQUIRE(from_flag.size() == 2);
    CHECK(from_flag[1] == from_file[1]);
    {
      std::ofstream ini(dir / "bad.ini");
      ini << "channel = spinstar\nwarp = 9\n";
    }
    CHECK(cli("sweep --config \"" + (dir / "bad.ini").string() + "\" --grid 0") == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("checked-in presets reproduce the figure curves") {
    const fs::path dir = scratch_dir("presets");
    for (const std::string which : {"fig1", "fig2", "fig3"}) {
      for (const auto& curve : figure_curves(which)) {
        if (curve.trace_distance) continue;
        const std::string stem = fs::path(curve.file).stem().string();
        const fs::path preset = fs::path(CATBELL_SOURCE_DIR) / "configs" / (stem + ".ini");
        INFO(preset.string());
        REQUIRE(fs::exists(preset));
        // Compare the first and second grid points of the preset against the library's own preset.
        ExperimentConfig cfg = curve.config;
        cfg.grid = {cfg.grid[0], cfg.grid[1]};
        cfg.optimizer.restarts = 4;
        const fs::path out = dir / (stem + ".csv");
        std::ostringstream grid;
        grid.precision(17);
        grid << cfg.grid[0] << ',' << cfg.grid[1];
        CHECK(cli("sweep --config \"" + preset.string() + "\" --restarts 4 --grid " + grid.str() + " --output \"" +
                  out.string() + "\"") == 0);
        CHECK(read_file(out) == sweep_csv(cfg));
      }
    }
    fs::remove_all(dir);
  }
}
