#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "waveop/cli.hpp"
#include "waveop/model.hpp"
#include "waveop/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wave-operator dynamics engine"};
  app.set_version_flag("--version",
                       std::string("waveop ") + waveop::kVersion);
  app.require_subcommand(1);

  std::string config_path, output_dir, golden_path, results_path;
  int threads = 1;
  unsigned long long seed = 20240915ull;

  CLI::App* run_cmd =
      app.add_subcommand("run", "execute a config and write the series");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--output-dir", output_dir,
                      "output directory (default: $WAVEOP_OUTPUT_DIR or cwd)");
  run_cmd
      ->add_option("--threads", threads,
                   "parallelize independent tiers; never changes results")
      ->check(CLI::Range(1, 64));

  CLI::App* describe_cmd =
      app.add_subcommand("describe", "print the resolved plan without running");
  describe_cmd->add_option("config", config_path, "config file")->required();

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "compare a results CSV against a golden JSON list");
  verify_cmd->add_option("golden", golden_path, "golden JSON file")
      ->required();
  verify_cmd->add_option("results", results_path, "results CSV file")
      ->required();

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "randomized structural self-checks");
  selftest_cmd->add_option(
      "--seed", seed, "RNG seed; affects only the self-checks, never physics");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const waveop::cli::RunManifest man =
          waveop::cli::run(config_path, output_dir, threads);
      for (const auto& [path, digest] : man.outputs)
        std::cout << "wrote " << path << "  sha256 " << digest << "\n";
      std::cout << "run complete: mode " << man.mode << "\n";
      return 0;
    }
    if (describe_cmd->parsed()) {
      waveop::cli::describe(config_path);
      return 0;
    }
    if (verify_cmd->parsed())
      return waveop::cli::verify(golden_path, results_path);
    if (selftest_cmd->parsed()) return waveop::cli::selftest(seed);
  } catch (const waveop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const waveop::NumericalError& e) {
    std::cerr << "numerical diagnostic: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
