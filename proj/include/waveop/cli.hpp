#pragma once

#include <string>
#include <utility>
#include <vector>

#include "waveop/model.hpp"

namespace waveop::cli {

// Everything one needs to audit a run: the raw config text, code version,
// wall-clock bounds and a content digest per written file. Digests depend
// only on config and version; the timestamps live solely in the manifest.
struct RunManifest {
  std::string config_path;
  std::string config_echo;
  std::string mode;
  std::string version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

  std::string to_json() const;
};

// Executes the config's mode and writes <base>.csv, <base>.json and
// <base>.manifest.json (plus optional snapshots) under output_dir. threads
// parallelizes independent tiers only; results are thread-count independent.
RunManifest run(const std::string& config_path, const std::string& output_dir,
                int threads);

// Prints the resolved plan without running.
void describe(const std::string& config_path);

// Compares a results CSV against a committed golden JSON list; returns the
// process exit code (0 pass, 3 any tolerance failure) and prints a per-entry
// report. Schema problems throw ConfigError.
int verify(const std::string& golden_path, const std::string& results_path);

// Randomized structural self-checks (round-trips, action identities, gauge
// invariance, integrator cross-check). The seed never influences physics
// outputs, only these checks. Returns 0 or 3.
int selftest(unsigned long long seed);

}  // namespace waveop::cli
