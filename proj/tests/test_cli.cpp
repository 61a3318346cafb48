#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gsopt/config.hpp"
#include "gsopt/io.hpp"
#include "gsopt/pulse.hpp"

namespace fs = std::filesystem;
using namespace gsopt;

namespace {

std::string binary_path() {
  const char* env = std::getenv("GSOPT_BIN");
  REQUIRE_MESSAGE(env != nullptr, "GSOPT_BIN must point at the gsopt binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = binary_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// small plant/budget overrides so CLI tests stay fast
std::string fast_overrides() {
  return "--set fom.circuits=40 --set analysis.repeats=3 --set plant.shots=2000 "
         "--set optimizer.sigma_repeats=10 --set optimizer.endpoint_repeats=4 "
         "--set optimizer.superiterations=1 --set optimizer.max_evals_per_superiteration=30 "
         "--set optimizer.stop_window=25 --set analysis.rb_circuits=40";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("sweep --config /nonexistent/config.cfg") == 2);
  CHECK(run("sweep --method nosuchmethod") == 2);
  CHECK(run("evaluate --pulse /nonexistent/pulse.csv") == 2);
  CHECK(run("optimize --set plant.bogus_key=1") == 2);
}

TEST_CASE("config reference is emitted and parses back") {
  TempDir dir("gsopt_cli_ref");
  const fs::path ref = dir.path / "config.reference";
  CHECK(run("--emit-config-reference " + ref.string()) == 0);
  RunConfig config;
  config.load_file(ref.string());  // round trip: every documented key is valid
  CHECK(config.get_string("fom.kind") == "orbit");
}

TEST_CASE("sweep writes one file per length") {
  TempDir dir("gsopt_cli_sweep");
  CHECK(run("sweep --method orbit --lengths 2,4 --grid 0.8:1.2:5 " + fast_overrides() +
            " --out " + dir.str()) == 0);
  CHECK(fs::exists(dir.path / "sweep_orbit_L2.csv"));
  CHECK(fs::exists(dir.path / "sweep_orbit_L4.csv"));
  CHECK(fs::exists(dir.path / "config.snapshot"));

  const std::string content = slurp(dir.path / "sweep_orbit_L2.csv");
  CHECK(content.rfind("amplitude,mean_fom,std\n", 0) == 0);
}

TEST_CASE("optimize reruns byte-identically with the same seed") {
  TempDir dir_a("gsopt_cli_opt_a");
  TempDir dir_b("gsopt_cli_opt_b");
  const std::string common =
      "optimize --method orbit --L 3 --seed 11 " + fast_overrides() + " --out ";
  CHECK(run(common + dir_a.str()) == 0);
  CHECK(run(common + dir_b.str()) == 0);

  const fs::path run_a = dir_a.path / "run_orbit_L3_seed11";
  const fs::path run_b = dir_b.path / "run_orbit_L3_seed11";
  for (const char* name : {"fom_trace.csv", "best_pulse.csv", "result.json",
                           "config.snapshot"}) {
    CHECK_MESSAGE(slurp(run_a / name) == slurp(run_b / name), name);
  }
  CHECK(fs::exists(run_a / "fom_trace.csv"));
  const std::string trace = slurp(run_a / "fom_trace.csv");
  CHECK(trace.rfind("eval_index,superiteration,method,L,N,fom,std_estimate,is_reeval,"
                    "is_drift_check\n", 0) == 0);
}

TEST_CASE("evaluate consumes a pulse file and writes gains") {
  TempDir dir("gsopt_cli_eval");
  const RunConfig config;
  const fs::path pulse_file = dir.path / "ref_pulse.csv";
  write_pulse_csv(pulse_file.string(), config.reference_pulse());

  // pulse CSV round trip is exact
  const PulseShape back = read_pulse_csv(pulse_file.string());
  CHECK(back.ax == config.reference_pulse().ax);
  CHECK(back.dt == doctest::Approx(config.reference_pulse().dt).epsilon(1e-12));

  CHECK(run("evaluate --pulse " + pulse_file.string() + " " + fast_overrides() + " --out " +
            dir.str()) == 0);
  const std::string gains = slurp(dir.path / "gains.csv");
  CHECK(gains.rfind("method,L,gain,std,fom_pulse,fom_guess,fom_ref\n", 0) == 0);
}

TEST_CASE("rb command writes the survival curve") {
  TempDir dir("gsopt_cli_rb");
  CHECK(run("rb " + fast_overrides() + " --out " + dir.str()) == 0);
  const std::string rb = slurp(dir.path / "rb.csv");
  CHECK(rb.rfind("m,survival,std\n", 0) == 0);
}

TEST_CASE("correlate matches the hand-computed Pearson value") {
  TempDir dir("gsopt_cli_corr");
  // four runs x two methods, gains chosen to give r = 0.6
  const double gains[4][2] = {{1, 2}, {2, 1}, {3, 4}, {4, 3}};
  std::vector<std::string> files;
  for (int i = 0; i < 4; ++i) {
    const fs::path f = dir.path / ("gains_" + std::to_string(i) + ".csv");
    std::ofstream out(f);
    out << "method,L,gain,std,fom_pulse,fom_guess,fom_ref\n";
    out << "orbit,10," << gains[i][0] << ",0.1,0,0,0\n";
    out << "rb,18," << gains[i][1] << ",0.1,0,0,0\n";
    files.push_back(f.string());
  }
  const fs::path out_path = dir.path / "correlation.csv";
  std::string cmd = "correlate --out " + out_path.string() + " --gains";
  for (const auto& f : files) cmd += " " + f;
  CHECK(run(cmd) == 0);

  const std::string content = slurp(out_path);
  CHECK(content.rfind("orbit_L10,rb_L18\n", 0) == 0);
  CHECK(content.find("0.59999999999999") != std::string::npos);

  // misaligned method columns exit 2
  {
    std::ofstream out(dir.path / "gains_bad.csv");
    out << "method,L,gain,std,fom_pulse,fom_guess,fom_ref\n";
    out << "qpt,0,1.0,0.1,0,0,0\n";
  }
  CHECK(run("correlate --out " + out_path.string() + " --gains " + files[0] + " " +
            (dir.path / "gains_bad.csv").string()) == 2);
}

TEST_CASE("fluence command tabulates pulse files") {
  TempDir dir("gsopt_cli_fluence");
  const RunConfig config;
  const fs::path pulse_file = dir.path / "some_pulse.csv";
  write_pulse_csv(pulse_file.string(), config.reference_pulse().scaled(0.5));
  CHECK(run("fluence --pulses " + pulse_file.string() + " --out " + dir.str()) == 0);
  const std::string content = slurp(dir.path / "fluence.csv");
  CHECK(content.rfind("name,fluence_rad2_per_s\n", 0) == 0);
  CHECK(content.find("some_pulse") != std::string::npos);
  CHECK(content.find("guess") != std::string::npos);
  CHECK(content.find("reference") != std::string::npos);
}
