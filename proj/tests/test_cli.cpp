#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "waveop/cli.hpp"
#include "waveop/io.hpp"
#include "waveop/model.hpp"
#include "waveop/version.hpp"

using namespace waveop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl =
        (fs::temp_directory_path() / "waveop_cli_XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

struct ProcResult {
  int exit_code = -1;
  std::string output;
};

// Runs the installed binary and captures the merged output.
ProcResult run_binary(const std::string& args) {
  const std::string cmd = std::string(WAVEOP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  ProcResult r;
  std::array<char, 4096> buf;
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.output.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const char* kClassicalConfig =
    "schema_version = 1\n"
    "\n"
    "[hamiltonian]\n"
    "benchmark_n = 2\n"
    "hbar = 1.0\n"
    "\n"
    "[grid]\n"
    "x_min = -8\n"
    "x_max = 8\n"
    "p_min = -8\n"
    "p_max = 8\n"
    "nx = 64\n"
    "np = 64\n"
    "\n"
    "[run]\n"
    "mode = imag_classical\n"
    "step = 1e-3\n"
    "n_steps = 1000\n"
    "checkpoint_every = 250\n"
    "\n"
    "[output]\n"
    "path = cls\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes the audited output set") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("cls.cfg");
  io::write_text_file(cfg_path, kClassicalConfig);

  const std::string out_a = tmp.file("a");
  const cli::RunManifest man = cli::run(cfg_path, out_a, 1);
  CHECK(man.mode == "imag_classical");
  CHECK(man.version == kVersion);
  CHECK(man.config_echo == kClassicalConfig);
  REQUIRE(man.outputs.size() == 2);

  for (const auto& [path, digest] : man.outputs) {
    CHECK(fs::exists(path));
    CHECK(io::sha256_file(path) == digest);
  }

  const std::string csv = io::read_text_file(man.outputs[0].first);
  CHECK(csv.rfind("beta,energy,dx,dp,dxdp,norm_prerenorm,tier\n", 0) == 0);
  // four checkpoints and the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find(",classical\n") != std::string::npos);

  const std::string man_path = out_a + "/cls.manifest.json";
  REQUIRE(fs::exists(man_path));
  const nlohmann::json doc =
      nlohmann::json::parse(io::read_text_file(man_path));
  CHECK(doc["generator"]["name"] == "waveop");
  CHECK(doc["generator"]["version"] == kVersion);
  CHECK(doc["mode"] == "imag_classical");
  CHECK(doc["config_echo"] == kClassicalConfig);
  CHECK(doc["outputs"].size() == 2);

  SUBCASE("reruns are byte-identical") {
    const std::string out_b = tmp.file("b");
    const cli::RunManifest again = cli::run(cfg_path, out_b, 1);
    REQUIRE(again.outputs.size() == 2);
    CHECK(again.outputs[0].second == man.outputs[0].second);
    CHECK(again.outputs[1].second == man.outputs[1].second);
    CHECK(io::read_text_file(again.outputs[0].first) == csv);
  }

  SUBCASE("output directory falls back to the environment") {
    const std::string out_env = tmp.file("env");
    REQUIRE(setenv("WAVEOP_OUTPUT_DIR", out_env.c_str(), 1) == 0);
    const cli::RunManifest env_man = cli::run(cfg_path, "", 1);
    unsetenv("WAVEOP_OUTPUT_DIR");
    REQUIRE(env_man.outputs.size() == 2);
    CHECK(env_man.outputs[0].first.rfind(out_env, 0) == 0);
    CHECK(env_man.outputs[0].second == man.outputs[0].second);
  }
}

TEST_CASE("thread count never changes the bytes") {
  TempDir tmp;
  std::string sweep_cfg(kClassicalConfig);
  const std::string from = "mode = imag_classical";
  sweep_cfg.replace(sweep_cfg.find(from), from.size(), "mode = imag_sweep");
  const std::string cfg_path = tmp.file("sweep.cfg");
  io::write_text_file(cfg_path, sweep_cfg);

  const cli::RunManifest one = cli::run(cfg_path, tmp.file("t1"), 1);
  const cli::RunManifest three = cli::run(cfg_path, tmp.file("t3"), 3);
  REQUIRE(one.outputs.size() == three.outputs.size());
  for (std::size_t k = 0; k < one.outputs.size(); ++k)
    CHECK(one.outputs[k].second == three.outputs[k].second);

  const std::string csv = io::read_text_file(one.outputs[0].first);
  CHECK(csv.find(",quantum\n") != std::string::npos);
  CHECK(csv.find(",semiclassical\n") != std::string::npos);
  CHECK(csv.find(",classical\n") != std::string::npos);
}

TEST_CASE("verify against a fresh classical run") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("cls.cfg");
  io::write_text_file(cfg_path, kClassicalConfig);
  const cli::RunManifest man = cli::run(cfg_path, tmp.path.string(), 1);
  const std::string results = man.outputs[0].first;

  nlohmann::json golden = nlohmann::json::array();
  golden.push_back({{"label", "harmonic classical beta=1"},
                    {"beta", 1.0},
                    {"energy", 1.0},
                    {"dx", 1.0},
                    {"dp", 1.0},
                    {"oracle", "classical_gibbs_quadrature"},
                    {"tolerance", 1e-3}});
  const std::string golden_path = tmp.file("golden.json");
  io::write_text_file(golden_path, golden.dump(2));
  CHECK(cli::verify(golden_path, results) == 0);

  SUBCASE("tampered expectation fails") {
    golden[0]["energy"] = 1.02;
    io::write_text_file(golden_path, golden.dump(2));
    CHECK(cli::verify(golden_path, results) == 3);
  }

  SUBCASE("unmatched beta fails") {
    golden[0]["beta"] = 0.33;
    io::write_text_file(golden_path, golden.dump(2));
    CHECK(cli::verify(golden_path, results) == 3);
  }

  SUBCASE("schema problems throw") {
    const std::string bad_csv = tmp.file("bad.csv");
    io::write_text_file(bad_csv, "beta,energy\n1,2\n");
    CHECK_THROWS_AS(cli::verify(golden_path, bad_csv), ConfigError);

    golden[0].erase("tolerance");
    io::write_text_file(golden_path, golden.dump(2));
    CHECK_THROWS_AS(cli::verify(golden_path, results), ConfigError);

    io::write_text_file(golden_path, "{}");
    CHECK_THROWS_AS(cli::verify(golden_path, results), ConfigError);
  }
}

TEST_CASE("selftest is seed-stable") {
  CHECK(cli::selftest(1) == 0);
  CHECK(cli::selftest(20240915ull) == 0);
}

TEST_CASE("binary exit codes and output") {
  TempDir tmp;

  SUBCASE("describe prints the resolved plan") {
    std::string hil_cfg =
        "schema_version = 1\n"
        "[hamiltonian]\n"
        "benchmark_n = 2\n"
        "[grid]\n"
        "nx = 32\n"
        "np = 32\n"
        "[run]\n"
        "mode = hilbert_real\n"
        "basis_size = 32\n"
        "step = 1e-3\n"
        "n_steps = 100\n"
        "checkpoint_every = 50\n"
        "[output]\n"
        "path = hil\n";
    const std::string cfg_path = tmp.file("hil.cfg");
    io::write_text_file(cfg_path, hil_cfg);
    const ProcResult r = run_binary("describe " + cfg_path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mode: hilbert_real") != std::string::npos);
    CHECK(r.output.find("N = 32") != std::string::npos);
    CHECK(r.output.find("1024") != std::string::npos);
    CHECK(r.output.find("estimated memory") != std::string::npos);
  }

  SUBCASE("bad config exits 2") {
    std::string bad(kClassicalConfig);
    const std::string from = "nx = 64";
    bad.replace(bad.find(from), from.size(), "nx = 5");
    const std::string cfg_path = tmp.file("bad.cfg");
    io::write_text_file(cfg_path, bad);
    const ProcResult r = run_binary("run " + cfg_path + " --output-dir " +
                                    tmp.file("out"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("config error") != std::string::npos);
    CHECK(r.output.find("nx") != std::string::npos);
  }

  SUBCASE("missing config exits 2") {
    const ProcResult r = run_binary("describe " + tmp.file("nope.cfg"));
    CHECK(r.exit_code == 2);
  }

  SUBCASE("run prints digests and completes") {
    const std::string cfg_path = tmp.file("cls.cfg");
    io::write_text_file(cfg_path, kClassicalConfig);
    const ProcResult r =
        run_binary("run " + cfg_path + " --output-dir " + tmp.file("out"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("wrote ") != std::string::npos);
    CHECK(r.output.find("sha256 ") != std::string::npos);
    CHECK(r.output.find("run complete: mode imag_classical") !=
          std::string::npos);
  }

  SUBCASE("verify failure exits 3") {
    const std::string cfg_path = tmp.file("cls.cfg");
    io::write_text_file(cfg_path, kClassicalConfig);
    const cli::RunManifest man = cli::run(cfg_path, tmp.file("out"), 1);
    nlohmann::json golden = nlohmann::json::array();
    golden.push_back({{"label", "wrong"},
                      {"beta", 1.0},
                      {"energy", 2.5},
                      {"dx", 1.0},
                      {"dp", 1.0},
                      {"oracle", "classical_gibbs_quadrature"},
                      {"tolerance", 1e-3}});
    const std::string golden_path = tmp.file("golden.json");
    io::write_text_file(golden_path, golden.dump(2));
    const ProcResult r =
        run_binary("verify " + golden_path + " " + man.outputs[0].first);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("FAIL") != std::string::npos);
    CHECK(r.output.find("tolerance failures present") != std::string::npos);
  }

  SUBCASE("selftest subcommand") {
    const ProcResult r = run_binary("selftest --seed 7");
    CHECK(r.exit_code == 0);
  }
}

}  // TEST_SUITE
