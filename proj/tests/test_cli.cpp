#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"
#include "sfgcav/io.hpp"
#include "support.hpp"

using namespace sfgcav;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sfgcav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / fs::path("sfgcav_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Value of "key = value" in a report.
double report_value(const std::string& report, const std::string& key) {
  const auto pos = report.find(key + " = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(report.substr(pos + key.size() + 3));
}

const std::string kPaper = SFGCAV_SOURCE_DIR "/configs/paper-sfg.conf";

// Fixed kappa, no calibration: fast.
const std::string kQuick = "[crystal]\nkappa = 2.2475e-9\n[drive]\nsignal_mW = 2\n";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"simulate"}).code == 1);
  CHECK(run({"bogus", "--config", "x"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const Run r = run({"simulate", "--config", "/nonexistent.conf"});
  CHECK(r.code == 1);
  CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("simulate") {
  SUBCASE("no pump") {
    const std::string cfg = write("nopump.conf", kQuick + "pump_mW = 0\n");
    const std::string out = (scratch() / "nopump.txt").string();
    const Run r = run({"simulate", "--config", cfg, "--out", out});
    CHECK(r.code == 0);
    CHECK(report_value(r.out, "eta") == 0.0);
    CHECK(r.out.find("converged = true") != std::string::npos);
    CHECK(slurp(out) == r.out);
  }
  SUBCASE("bundled paper configuration") {
    const Run r = run({"simulate", "--config", kPaper});
    CHECK(r.code == 0);
    const double eta = report_value(r.out, "eta");
    CHECK(eta >= 0.829);
    CHECK(eta <= 0.859);
    CHECK(std::abs(report_value(r.out, "budget_residual_signal")) < 1e-6);
  }
  SUBCASE("invalid reflectivity") {
    const std::string cfg = write("badR.conf", "[mirrors]\nleft_signal = 1.2\n");
    const Run r = run({"simulate", "--config", cfg});
    CHECK(r.code == 1);
    CHECK(r.err.find(":2: mirrors.left_signal = 1.2 violates 0 <= R <= 1") != std::string::npos);
  }
  SUBCASE("non-convergence exits 2") {
    const std::string cfg = write("short.conf", kQuick + "pump_mW = 50\n[solver]\nmax_roundtrips = 3\n");
    const Run r = run({"simulate", "--config", cfg});
    CHECK(r.code == 2);
    CHECK(r.out.find("converged = false") != std::string::npos);
  }
}

TEST_CASE("sweep") {
  SUBCASE("three-point grid, deterministic") {
    const std::string cfg =
        write("sweep3.conf", kQuick + "[sweep]\npump_min_mW = 0\npump_max_mW = 100\npoints = 3\n");
    const Run a = run({"sweep", "--config", cfg});
    const Run b = run({"sweep", "--config", cfg});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream lines(a.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 4);
    CHECK(a.out.starts_with("pump_mW,eta,delta,converged,roundtrips\n"));

    const std::string path = (scratch() / "sweep3.csv").string();
    CHECK(run({"sweep", "--config", cfg, "--out", path}).code == 0);
    CHECK(slurp(path) == a.out);
  }
  SUBCASE("bundled sweep peak matches find_peak") {
    const std::string path = (scratch() / "paper_sweep.csv").string();
    const Run r = run({"sweep", "--config", kPaper, "--out", path});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    const SweepResult s = read_sweep_csv(in, path);
    CHECK(s.rows.size() == 25);
    const Peak p = find_peak(s);
    CHECK(report_value(r.out, "peak_pump_mW") == doctest::Approx(p.pump_power * 1e3).epsilon(1e-8));
    CHECK(report_value(r.out, "peak_eta") == doctest::Approx(p.eta).epsilon(1e-8));
    CHECK(std::abs(p.pump_power - 81.5e-3) <= 190e-3 / 24);
  }
  SUBCASE("missing [sweep]") {
    const Run r = run({"sweep", "--config", write("nosweep.conf", kQuick)});
    CHECK(r.code == 1);
    CHECK(r.err.find("[sweep]") != std::string::npos);
  }
}

TEST_CASE("optimize with a degenerate range") {
  const std::string cfg = write("opt.conf", kQuick + "[optimize]\nr_min = 0.9\nr_max = 0.9\ngrid_points = 5\n");
  const std::string path = (scratch() / "opt.csv").string();
  const Run r = run({"optimize", "--config", cfg, "--out", path});
  CHECK(r.code == 0);
  CHECK(report_value(r.out, "best_R") == 0.9);
  const std::string csv = slurp(path);
  CHECK(csv.starts_with("R,eta,pump_mW,ok\n0.9,"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("fit") {
  const std::string gen = write(
      "gen.conf", kQuick +
                      "[sweep]\npump_list_mW = 0, 20, 40, 60, 81.5, 100, 130, 160, 190\nformat = detectors\n"
                      "detector_gamma = 1.05\n");
  const std::string data = (scratch() / "synthetic.csv").string();
  REQUIRE(run({"sweep", "--config", gen, "--out", data}).code == 0);

  SUBCASE("gamma recovered from a synthetic series") {
    const std::string cfg = write("fit.conf", kQuick + "[fit]\nfree = gamma\n");
    const std::string cmp = (scratch() / "fit.csv").string();
    const Run r = run({"fit", "--config", cfg, "--measurements", data, "--out", cmp});
    CHECK(r.code == 0);
    CHECK(std::abs(report_value(r.out, "gamma") - 1.05) < 1e-3);
    CHECK(slurp(cmp).starts_with(std::string(kFitHeader) + "\n"));
  }
  SUBCASE("input errors") {
    const std::string cfg = write("fit.conf", kQuick + "[fit]\nfree = gamma\n");
    CHECK(run({"fit", "--config", cfg}).code == 1);
    CHECK(run({"fit", "--config", cfg, "--measurements", write("empty.csv", "")}).code == 1);

    const Run none = run({"fit", "--config", write("nofree.conf", kQuick + "[fit]\nfree =\n"), "--measurements", data});
    CHECK(none.code == 1);
    CHECK(none.err.find("no free parameters") != std::string::npos);

    const std::string bad = write("bad.csv", "pump_mW,pd1550_in,pd1550_refl,pd810_trans,pd532_trans\n1,2,3,4,5\n");
    const Run missing = run({"fit", "--config", cfg, "--measurements", bad});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("missing column 'pd1550_trans'") != std::string::npos);
  }
}

TEST_CASE("linewidth") {
  const Run opo = run({"linewidth", "--config", SFGCAV_SOURCE_DIR "/configs/opo-linewidth.conf"});
  CHECK(opo.code == 0);
  CHECK(std::abs(report_value(opo.out, "linewidth_MHz") - 91.0) / 91.0 < 0.05);
  CHECK(report_value(opo.out, "fsr_GHz") == doctest::Approx(9.31).epsilon(1e-3));

  const Run mc = run({"linewidth", "--config", SFGCAV_SOURCE_DIR "/configs/mode-cleaner.conf"});
  CHECK(mc.code == 0);
  CHECK(report_value(mc.out, "optical_roundtrip_m") == doctest::Approx(0.412).epsilon(1e-3));

  const Run cav = run({"linewidth", "--config", write("lw.conf", "[resonator]\noptical_roundtrip_m = 0.1\n")});
  CHECK(cav.code == 0);
  CHECK(report_value(cav.out, "finesse") == doctest::Approx(150.0).epsilon(1e-8));

  CHECK(run({"linewidth", "--config", write("lw0.conf", "")}).code == 1);
}
