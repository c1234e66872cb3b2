// test_cli.cpp — configuration parsing, exit codes and deterministic output of the cbec tool
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cbec/error.hpp"
#include "cli.hpp"

using namespace cbec;
using namespace cbec::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cbec_test_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "cbec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& text) {
  const auto path = dir / "run.ini";
  std::ofstream(path) << text;
  return path;
}

const char* kStationaryPhase = R"([model]
omega_khz = 246
omega0_khz = 7.4
lambda_d_khz = 9.6
lambda_s_khz = 0.17
kappa_khz = 1250
n_atoms = 2000

[evolve]
t_end_ms = 0.05
dt_ms = 0.005
)";

}  // namespace

TEST_CASE("model keys carry units and polar couplings convert") {
  RunConfig cfg;
  apply_config_text(cfg, "[model]\nv_khz = 2\nphi_deg = 90\nomega_khz = 3\nkappa_khz = 4\n");
  CHECK(cfg.params.lambda_d == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cfg.params.lambda_s == doctest::Approx(2.0));
  CHECK(cfg.params.omega == 3.0);
  CHECK(cfg.params.kappa == 4.0);
}

TEST_CASE("configuration errors name the line and key") {
  RunConfig cfg;
  auto message = [&](const std::string& text) {
    try {
      apply_config_text(cfg, text, "case.ini");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigParseError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("[model]\nomega_khz = 1\nomega = 2\n").find("case.ini:3") != std::string::npos);
  CHECK(message("[model]\nomega_khz = 1\nomega = 2\n").find("omega") != std::string::npos);
  CHECK(message("[model]\nkappa_khz = fast\n").find("case.ini:2") != std::string::npos);
  CHECK(message("[model]\nv_khz = 1\nlambda_d_khz = 2\n").find("mutually exclusive") != std::string::npos);
  CHECK(message("[evolve]\nbranch = sideways\n").find("expected one of") != std::string::npos);
  CHECK(message("[model]\nomega_khz = 1\nomega_khz = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("[nowhere]\nx = 1\n").find("unknown key") != std::string::npos);
}

TEST_CASE("config hash depends on the physics and not on threads or paths") {
  RunConfig a, b;
  b.threads = 7;
  b.out_dir = "/elsewhere";
  CHECK(fnv1a64(canonical_form(a)) == fnv1a64(canonical_form(b)));
  b.params.kappa = 1.0;
  CHECK(fnv1a64(canonical_form(a)) != fnv1a64(canonical_form(b)));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("evolve output is byte-identical across runs and carries a metadata header") {
  const auto dir = scratch("evolve");
  const auto cfg = write_config(dir, kStationaryPhase);
  REQUIRE(invoke({"evolve", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  REQUIRE(invoke({"evolve", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "3"}) == 0);
  const std::string a = slurp(dir / "a" / "evolve.csv");
  CHECK(a == slurp(dir / "b" / "evolve.csv"));
  CHECK(slurp(dir / "a" / "evolve.json") == slurp(dir / "b" / "evolve.json"));
  CHECK(a.rfind("# tool: cbec", 0) == 0);
  CHECK(a.find("# config_hash: fnv1a64:") != std::string::npos);
  CHECK(a.find("# units:") != std::string::npos);
  CHECK(a.find("t_ms,jx_plus") != std::string::npos);
}

TEST_CASE("seed amplitude flag changes the output and the hash") {
  const auto dir = scratch("seed");
  const auto cfg = write_config(dir, kStationaryPhase);
  REQUIRE(invoke({"evolve", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  REQUIRE(invoke({"evolve", "--config", cfg.string(), "--out", (dir / "b").string(), "--seed-amplitude", "0.3"}) == 0);
  const std::string a = slurp(dir / "a" / "evolve.csv"), b = slurp(dir / "b" / "evolve.csv");
  CHECK(a != b);
  CHECK(a.substr(0, a.find("# units")) != b.substr(0, b.find("# units")));
}

TEST_CASE("spectrum writes rapidities and the lattice") {
  const auto dir = scratch("spectrum");
  const auto cfg = write_config(dir, std::string(kStationaryPhase) + "[spectrum]\nmax_occupation = 1\nbranches = normal\n");
  REQUIRE(invoke({"spectrum", "--config", cfg.string(), "--out", dir.string()}) == 0);
  const std::string json = slurp(dir / "spectrum.json");
  CHECK(json.find("\"rapidities\"") != std::string::npos);
  CHECK(json.find("\"config_hash\"") != std::string::npos);
  std::istringstream lattice(slurp(dir / "lattice.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(lattice, line))
    if (!line.empty() && line[0] != '#' && line.rfind("branch", 0) != 0) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("semiclassical variants and small sweeps") {
  const auto dir = scratch("sweep");
  const auto cfg = write_config(dir, R"([model]
v_khz = 121.65
omega0_khz = 7.4
kappa_khz = 1250
n_atoms = 2000
[semiclassical]
t_end_ms = 0.01
dt_ms = 0.001
[phase-diagram]
phi_steps = 2
omega_steps = 2
[closed]
phi_steps = 2
omega_steps = 2
criterion = printed
)");
  REQUIRE(invoke({"semiclassical", "--config", cfg.string(), "--out", (dir / "p").string(), "--variant", "printed"}) == 0);
  REQUIRE(invoke({"semiclassical", "--config", cfg.string(), "--out", (dir / "c").string()}) == 0);
  CHECK(slurp(dir / "p" / "semiclassical.csv") != slurp(dir / "c" / "semiclassical.csv"));
  REQUIRE(invoke({"phase-diagram", "--config", cfg.string(), "--out", dir.string(), "--threads", "2"}) == 0);
  CHECK(slurp(dir / "phase_diagram.csv").find("phi_deg,omega_khz") != std::string::npos);
  REQUIRE(invoke({"closed", "--config", cfg.string(), "--out", dir.string()}) == 0);
  CHECK(slurp(dir / "closed.csv").find(",superradiant,") != std::string::npos);
}

TEST_CASE("finite writes the spectrum and the perturbative table") {
  const auto dir = scratch("finite");
  const auto cfg = write_config(dir, R"([model]
v_khz = 0.5
phi_deg = 45
omega_khz = 1
omega0_khz = 1
kappa_khz = 20
[finite]
n_atoms = 1
fock_cutoff = 2
)");
  REQUIRE(invoke({"finite", "--config", cfg.string(), "--out", dir.string()}) == 0);
  CHECK(slurp(dir / "finite_spectrum.csv").find("re,im") != std::string::npos);
  CHECK(slurp(dir / "perturbative.csv").find("im_lambda1") != std::string::npos);
  CHECK(slurp(dir / "finite.json").find("\"photon_current\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  std::string err;
  CHECK(invoke({"--help"}) == 0);
  CHECK(invoke({}) == 1);
  CHECK(invoke({"evolve", "--threads", "0"}) == 1);
  const auto bad = write_config(dir, "[model]\nomega0_khz = -1\n");
  CHECK(invoke({"spectrum", "--config", bad.string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find("omega0") != std::string::npos);
  const auto typo = write_config(dir, "[model]\nomga_khz = 1\n");
  CHECK(invoke({"spectrum", "--config", typo.string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find("run.ini:2") != std::string::npos);
  const auto big = write_config(dir, "[finite]\nn_atoms = 6\nfock_cutoff = 6\n");
  CHECK(invoke({"finite", "--config", big.string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find("DimensionBudgetExceeded") != std::string::npos);
}

TEST_CASE("only the running command's section is applied") {
  RunConfig cfg;
  cfg.command = Command::Semiclassical;
  apply_config_text(cfg, "[semiclassical]\nt_end_ms = 2\n[evolve]\nt_end_ms = 5\n");
  CHECK(cfg.t_end_ms == 2.0);
  cfg.command = Command::Evolve;
  apply_config_text(cfg, "[semiclassical]\nt_end_ms = 2\n[evolve]\nt_end_ms = 5\n");
  CHECK(cfg.t_end_ms == 5.0);
  CHECK_THROWS_AS(apply_config_text(cfg, "[semiclassical]\nt_end_ms = soon\n"), Error);
}
