#include "waveop/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "waveop/hilbert.hpp"
#include "waveop/imagtime.hpp"
#include "waveop/io.hpp"
#include "waveop/oscillator.hpp"
#include "waveop/phasespace.hpp"
#include "waveop/version.hpp"

namespace waveop::cli {

namespace fs = std::filesystem;

namespace {

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

model::RunConfig load_validated(const std::string& path) {
  model::RunConfig cfg = model::load_config(path);
  const std::vector<std::string> problems = model::validate_config(cfg);
  if (!problems.empty()) {
    std::string msg = "invalid config " + path + ":";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

Eigen::MatrixXcd matrix_poly(const std::vector<double>& c,
                             const Eigen::MatrixXcd& M) {
  const Eigen::Index N = M.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(N, N);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] != 0.0) out += c[k] * power;
    if (k + 1 < c.size()) power = power * M;
  }
  return out;
}

bool build_phase_field(const model::RunConfig& cfg,
                       phasespace::PhaseSpaceField& out) {
  const model::PhaseGeneratorSpec& pg = cfg.phase_generator;
  if (pg.kind == model::PhaseGeneratorKind::zero) return false;
  out = phasespace::make_field(cfg.grid, cfg.hamiltonian.hbar);
  for (int i = 0; i < cfg.grid.nx; ++i) {
    const double x = cfg.grid.x(i);
    for (int j = 0; j < cfg.grid.np; ++j) {
      const double p = cfg.grid.p(j);
      double v;
      if (pg.kind == model::PhaseGeneratorKind::minus_h)
        v = -model::eval_hamiltonian(cfg.hamiltonian, x, p);
      else
        v = model::eval_polynomial(pg.x_coeffs, x) +
            model::eval_polynomial(pg.p_coeffs, p);
      out.values(i, j) = v;
    }
  }
  return true;
}

// Checkpoint observables of a real-time field trajectory; the norm column
// records the running norm since real-time stepping never renormalizes.
imagtime::ObservableSeries trajectory_series(
    const phasespace::FieldTrajectory& traj, const model::HamiltonianSpec& H,
    phasespace::ExpectationRule rule, const std::string& tier) {
  imagtime::ObservableSeries s;
  s.tier = tier;
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const phasespace::PhaseMoments m =
        phasespace::phase_moments(traj.fields[r], H, rule);
    s.axis.push_back(traj.times[r]);
    s.energy.push_back(m.energy);
    s.dx.push_back(m.dx);
    s.dp.push_back(m.dp);
    s.dxdp.push_back(m.dx * m.dp);
    s.norm_prerenorm.push_back(std::sqrt(traj.fields[r].norm2()));
  }
  return s;
}

struct ModeOutputs {
  std::vector<imagtime::ObservableSeries> series;
  // field snapshots to write when requested: suffix -> field
  std::vector<std::pair<std::string, phasespace::PhaseSpaceField>> fields;
  // matrix snapshots (hilbert mode)
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> matrices;
};

ModeOutputs run_hilbert_real(const model::RunConfig& cfg) {
  const int N = cfg.basis_size;
  const double hbar = cfg.hamiltonian.hbar;
  auto [X, P] = hilbert::build_position_momentum(N, hbar);
  const Eigen::MatrixXcd Hm = matrix_poly(cfg.hamiltonian.kinetic_coeffs, P) +
                              matrix_poly(cfg.hamiltonian.potential_coeffs, X);
  Eigen::MatrixXcd Fm = Eigen::MatrixXcd::Zero(N, N);
  if (cfg.phase_generator.kind == model::PhaseGeneratorKind::minus_h)
    Fm = -Hm;
  else if (cfg.phase_generator.kind == model::PhaseGeneratorKind::polynomial)
    Fm = matrix_poly(cfg.phase_generator.x_coeffs, X) +
         matrix_poly(cfg.phase_generator.p_coeffs, P);

  const Eigen::VectorXcd alpha =
      oscillator::coherent_vector(N, cfg.initial_x0, cfg.initial_p0, hbar);
  Eigen::MatrixXcd omega = alpha * alpha.adjoint();

  const Eigen::MatrixXcd X2 = X * X;
  const Eigen::MatrixXcd P2 = P * P;

  ModeOutputs out;
  imagtime::ObservableSeries s;
  s.tier = "hilbert";
  long done = 0;
  while (done < cfg.n_steps) {
    const long block = std::min(cfg.checkpoint_every, cfg.n_steps - done);
    omega = hilbert::evolve_wave_operator(
        omega, Hm, Fm, static_cast<double>(block) * cfg.step, cfg.step, hbar);
    done += block;
    const double mx = hilbert::expectation_wave(omega, X);
    const double mx2 = hilbert::expectation_wave(omega, X2);
    const double mp = hilbert::expectation_wave(omega, P);
    const double mp2 = hilbert::expectation_wave(omega, P2);
    const double dx = std::sqrt(std::max(0.0, mx2 - mx * mx));
    const double dp = std::sqrt(std::max(0.0, mp2 - mp * mp));
    s.axis.push_back(static_cast<double>(done) * cfg.step);
    s.energy.push_back(hilbert::expectation_wave(omega, Hm));
    s.dx.push_back(dx);
    s.dp.push_back(dp);
    s.dxdp.push_back(dx * dp);
    s.norm_prerenorm.push_back(omega.norm());
  }
  out.series.push_back(std::move(s));
  out.matrices.emplace_back("_omega.wopm", omega);
  return out;
}

ModeOutputs run_modes(const model::RunConfig& cfg, int threads) {
  const double hbar = cfg.hamiltonian.hbar;
  ModeOutputs out;
  switch (cfg.mode) {
    case model::RunMode::imag_sweep: {
      imagtime::SweepResult sweep = imagtime::thermal_sweep(cfg, threads);
      out.series.push_back(std::move(sweep.quantum.series));
      out.series.push_back(std::move(sweep.semiclassical.series));
      out.series.push_back(std::move(sweep.classical.series));
      out.fields.emplace_back("_quantum.field", std::move(sweep.quantum.field));
      out.fields.emplace_back("_semiclassical.field",
                              std::move(sweep.semiclassical.field));
      out.fields.emplace_back("_classical.field",
                              std::move(sweep.classical.field));
      return out;
    }
    case model::RunMode::imag_quantum:
    case model::RunMode::imag_semiclassical:
    case model::RunMode::imag_classical: {
      const phasespace::PhaseSpaceField f0 =
          imagtime::uniform_initial_field(cfg.grid, hbar);
      imagtime::BlochResult res;
      if (cfg.mode == model::RunMode::imag_quantum)
        res = imagtime::bloch_quantum(f0, cfg.hamiltonian, cfg.step,
                                      cfg.n_steps, cfg.checkpoint_every);
      else if (cfg.mode == model::RunMode::imag_semiclassical)
        res = imagtime::bloch_semiclassical(f0, cfg.hamiltonian, cfg.step,
                                            cfg.n_steps, cfg.checkpoint_every);
      else
        res = imagtime::bloch_classical(f0, cfg.hamiltonian, cfg.step,
                                        cfg.n_steps, cfg.checkpoint_every);
      out.fields.emplace_back("_" + res.series.tier + ".field",
                              std::move(res.field));
      out.series.push_back(std::move(res.series));
      return out;
    }
    case model::RunMode::real_quantum:
    case model::RunMode::real_classical: {
      const bool quantum = cfg.mode == model::RunMode::real_quantum;
      const phasespace::PhaseSpaceField f0 = phasespace::coherent_field(
          cfg.grid, hbar, cfg.initial_x0, cfg.initial_p0);
      phasespace::PhaseSpaceField fgen;
      const bool has_f = build_phase_field(cfg, fgen);
      const phasespace::FieldTrajectory traj =
          quantum ? phasespace::propagate_quantum_real(
                        f0, cfg.hamiltonian, has_f ? &fgen : nullptr, cfg.step,
                        cfg.n_steps, cfg.checkpoint_every)
                  : phasespace::propagate_classical_real(
                        f0, cfg.hamiltonian, has_f ? &fgen : nullptr, cfg.step,
                        cfg.n_steps, cfg.checkpoint_every);
      const std::string tier = quantum ? "quantum" : "classical";
      out.series.push_back(trajectory_series(
          traj, cfg.hamiltonian,
          quantum ? phasespace::ExpectationRule::bopp
                  : phasespace::ExpectationRule::plain,
          tier));
      out.fields.emplace_back("_" + tier + ".field", traj.fields.back());
      return out;
    }
    case model::RunMode::hilbert_real:
      return run_hilbert_real(cfg);
  }
  throw ConfigError("unhandled run mode");
}

nlohmann::json config_echo_json(const model::RunConfig& cfg) {
  return {
      {"mode", model::mode_name(cfg.mode)},
      {"hamiltonian",
       {{"label", cfg.hamiltonian.label},
        {"hbar", cfg.hamiltonian.hbar},
        {"kinetic_coeffs", cfg.hamiltonian.kinetic_coeffs},
        {"potential_coeffs", cfg.hamiltonian.potential_coeffs}}},
      {"grid",
       {{"x_min", cfg.grid.x_min},
        {"x_max", cfg.grid.x_max},
        {"p_min", cfg.grid.p_min},
        {"p_max", cfg.grid.p_max},
        {"nx", cfg.grid.nx},
        {"np", cfg.grid.np}}},
      {"step", cfg.step},
      {"n_steps", cfg.n_steps},
      {"checkpoint_every", cfg.checkpoint_every},
      {"basis_size", cfg.basis_size},
      {"initial_x0", cfg.initial_x0},
      {"initial_p0", cfg.initial_p0},
      {"write_field", cfg.write_field},
  };
}

}  // namespace

std::string RunManifest::to_json() const {
  nlohmann::json doc = {
      {"generator", {{"name", "waveop"}, {"version", version}}},
      {"schema_version", kSchemaVersion},
      {"config_path", config_path},
      {"config_echo", config_echo},
      {"mode", mode},
      {"started_at", started_at},
      {"finished_at", finished_at},
  };
  doc["outputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : outputs)
    doc["outputs"].push_back({{"path", path}, {"sha256", digest}});
  return doc.dump(2) + "\n";
}

RunManifest run(const std::string& config_path, const std::string& output_dir,
                int threads) {
  RunManifest man;
  man.started_at = iso_now();
  man.config_path = config_path;
  man.config_echo = io::read_text_file(config_path);
  man.version = kVersion;
  const model::RunConfig cfg = load_validated(config_path);
  man.mode = model::mode_name(cfg.mode);

  std::string dir = output_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("WAVEOP_OUTPUT_DIR")) dir = env;
  }
  fs::path base = cfg.output_path;
  if (!dir.empty()) base = fs::path(dir) / base;
  if (base.has_parent_path()) fs::create_directories(base.parent_path());

  const ModeOutputs results = run_modes(cfg, threads);

  std::vector<const imagtime::ObservableSeries*> ptrs;
  ptrs.reserve(results.series.size());
  for (const imagtime::ObservableSeries& s : results.series)
    ptrs.push_back(&s);

  const std::string csv_path = base.string() + ".csv";
  io::write_text_file(csv_path, io::series_csv(ptrs));
  man.outputs.emplace_back(csv_path, io::sha256_file(csv_path));

  nlohmann::json mirror = {
      {"generator", {{"name", "waveop"}, {"version", kVersion}}},
      {"schema_version", cfg.schema_version},
      {"config", config_echo_json(cfg)},
      {"rows", nlohmann::json::parse(io::series_json_rows(ptrs))},
  };
  const std::string json_path = base.string() + ".json";
  io::write_text_file(json_path, mirror.dump(2) + "\n");
  man.outputs.emplace_back(json_path, io::sha256_file(json_path));

  if (cfg.write_field) {
    for (const auto& [suffix, field] : results.fields) {
      const std::string path = base.string() + suffix;
      io::write_field(path, field);
      man.outputs.emplace_back(path, io::sha256_file(path));
    }
    for (const auto& [suffix, mat] : results.matrices) {
      const std::string path = base.string() + suffix;
      io::write_matrix(path, mat);
      man.outputs.emplace_back(path, io::sha256_file(path));
    }
  }

  man.finished_at = iso_now();
  io::write_text_file(base.string() + ".manifest.json", man.to_json());
  return man;
}

void describe(const std::string& config_path) {
  const model::RunConfig cfg = load_validated(config_path);
  const model::GridSpec& g = cfg.grid;
  std::ostringstream out;
  out << "config: " << config_path << "\n";
  out << "mode: " << model::mode_name(cfg.mode) << "\n";
  out << "hamiltonian: " << (cfg.hamiltonian.label.empty()
                                 ? std::string("(unlabeled)")
                                 : cfg.hamiltonian.label)
      << ", hbar = " << io::format_double(cfg.hamiltonian.hbar)
      << ", T degree " << model::polynomial_degree(cfg.hamiltonian.kinetic_coeffs)
      << ", V degree "
      << model::polynomial_degree(cfg.hamiltonian.potential_coeffs) << "\n";

  double mem_mib = 0.0;
  if (cfg.mode == model::RunMode::hilbert_real) {
    const long n2 = static_cast<long>(cfg.basis_size) * cfg.basis_size;
    out << "basis: N = " << cfg.basis_size << ", doubled space N^2 = " << n2
        << "\n";
    mem_mib = 10.0 * static_cast<double>(n2) * 16.0 / (1024.0 * 1024.0);
  } else {
    out << "grid: " << g.nx << " x " << g.np << " over ["
        << io::format_double(g.x_min) << ", " << io::format_double(g.x_max)
        << ") x [" << io::format_double(g.p_min) << ", "
        << io::format_double(g.p_max)
        << "), dx = " << io::format_double(g.dx())
        << ", dp = " << io::format_double(g.dp()) << "\n";
    const double per_field =
        static_cast<double>(g.nx) * g.np * 16.0 / (1024.0 * 1024.0);
    const long n_ckpt = (cfg.n_steps + cfg.checkpoint_every - 1) /
                        cfg.checkpoint_every;
    const int tiers = cfg.mode == model::RunMode::imag_sweep ? 3 : 1;
    const bool real_mode = cfg.mode == model::RunMode::real_quantum ||
                           cfg.mode == model::RunMode::real_classical;
    mem_mib = per_field * (6.0 * tiers + (real_mode ? n_ckpt : 0));
  }
  const char* axis = (cfg.mode == model::RunMode::real_quantum ||
                      cfg.mode == model::RunMode::real_classical ||
                      cfg.mode == model::RunMode::hilbert_real)
                         ? "t"
                         : "beta";
  out << "stepper: step = " << io::format_double(cfg.step)
      << ", n_steps = " << cfg.n_steps
      << ", checkpoint_every = " << cfg.checkpoint_every << ", final " << axis
      << " = " << io::format_double(cfg.step * cfg.n_steps) << "\n";
  switch (cfg.phase_generator.kind) {
    case model::PhaseGeneratorKind::zero:
      out << "phase generator: zero\n";
      break;
    case model::PhaseGeneratorKind::minus_h:
      out << "phase generator: minus_h\n";
      break;
    case model::PhaseGeneratorKind::polynomial:
      out << "phase generator: polynomial (x degree "
          << model::polynomial_degree(cfg.phase_generator.x_coeffs)
          << ", p degree "
          << model::polynomial_degree(cfg.phase_generator.p_coeffs) << ")\n";
      break;
  }
  out << "outputs: " << cfg.output_path << ".csv, " << cfg.output_path
      << ".json, " << cfg.output_path << ".manifest.json"
      << (cfg.write_field ? ", field snapshots" : "") << "\n";
  char membuf[64];
  std::snprintf(membuf, sizeof(membuf), "%.1f", mem_mib);
  out << "estimated memory: ~" << membuf << " MiB\n";
  std::cout << out.str();
}

namespace {

struct CsvRow {
  double beta, energy, dx, dp;
  std::string tier;
};

std::vector<CsvRow> parse_results_csv(const std::string& path) {
  const std::string text = io::read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("results file is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "beta,energy,dx,dp,dxdp,norm_prerenorm,tier")
    throw ConfigError("results schema mismatch: unexpected CSV header in " +
                      path);
  std::vector<CsvRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 7)
      throw ConfigError("results schema mismatch at line " +
                        std::to_string(lineno) + " in " + path);
    CsvRow row;
    std::size_t pos = 0;
    try {
      row.beta = std::stod(parts[0], &pos);
      row.energy = std::stod(parts[1], &pos);
      row.dx = std::stod(parts[2], &pos);
      row.dp = std::stod(parts[3], &pos);
    } catch (const std::exception&) {
      throw ConfigError("results schema mismatch: non-numeric field at line " +
                        std::to_string(lineno) + " in " + path);
    }
    row.tier = parts[6];
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* oracle_tier(const std::string& oracle) {
  if (oracle == "exact_diag_thermal") return "quantum";
  if (oracle == "classical_gibbs_quadrature") return "classical";
  if (oracle == "semiclassical_dense_reference") return "semiclassical";
  return nullptr;
}

}  // namespace

int verify(const std::string& golden_path, const std::string& results_path) {
  nlohmann::json golden;
  try {
    golden = nlohmann::json::parse(io::read_text_file(golden_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("golden file is not valid JSON: " + golden_path + " (" +
                      e.what() + ")");
  }
  if (!golden.is_array() || golden.empty())
    throw ConfigError("golden file must be a non-empty JSON array");

  const std::vector<CsvRow> rows = parse_results_csv(results_path);

  bool all_pass = true;
  for (const nlohmann::json& entry : golden) {
    for (const char* key :
         {"label", "beta", "energy", "dx", "dp", "oracle", "tolerance"})
      if (!entry.contains(key))
        throw ConfigError(std::string("golden entry missing field '") + key +
                          "'");
    const std::string label = entry["label"];
    const double beta = entry["beta"];
    const std::string oracle = entry["oracle"];
    const double tol = entry["tolerance"];
    const char* tier = oracle_tier(oracle);
    if (!tier)
      throw ConfigError("golden entry names unknown oracle '" + oracle + "'");

    const CsvRow* match = nullptr;
    for (const CsvRow& r : rows)
      if (r.tier == tier && std::abs(r.beta - beta) <= 1e-9) {
        match = &r;
        break;
      }
    std::ostringstream head;
    head << label << " beta=" << io::format_double(beta) << " tier=" << tier;
    if (!match) {
      std::cout << "FAIL " << head.str() << ": no matching results row\n";
      all_pass = false;
      continue;
    }
    bool pass = true;
    const std::pair<const char*, std::pair<double, double>> checks[] = {
        {"energy", {match->energy, entry["energy"]}},
        {"dx", {match->dx, entry["dx"]}},
        {"dp", {match->dp, entry["dp"]}},
    };
    std::ostringstream detail;
    for (const auto& [name, vals] : checks) {
      const double got = vals.first, want = vals.second;
      const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
      if (rel > tol) {
        pass = false;
        detail << "  " << name << ": got " << io::format_double(got)
               << ", golden " << io::format_double(want) << ", rel err "
               << io::format_double(rel) << " > tol " << io::format_double(tol)
               << "\n";
      }
    }
    if (pass) {
      std::cout << "PASS " << head.str() << "\n";
    } else {
      std::cout << "FAIL " << head.str() << "\n" << detail.str();
      all_pass = false;
    }
  }
  std::cout << (all_pass ? "verify: all entries within tolerance\n"
                         : "verify: tolerance failures present\n");
  return all_pass ? 0 : 3;
}

int selftest(unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int N = 8;
  auto random_matrix = [&]() {
    Eigen::MatrixXcd A(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        A(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    return A;
  };

  const Eigen::MatrixXcd seed_matrix = random_matrix();
  const Eigen::MatrixXcd Hherm =
      0.5 * (seed_matrix + seed_matrix.adjoint()).eval();
  const Eigen::MatrixXcd omega = random_matrix();
  const hilbert::VectorizedState v = hilbert::vectorize(omega);

  struct Check {
    std::string name;
    double value;
    double bound;
  };
  std::vector<Check> checks;

  checks.push_back({"vectorize round trip",
                    (hilbert::devectorize(v) - omega).cwiseAbs().maxCoeff(),
                    0.0});
  checks.push_back(
      {"left action identity",
       (hilbert::left_action(Hherm) * v - hilbert::vectorize(Hherm * omega))
           .cwiseAbs()
           .maxCoeff(),
       1e-12});
  checks.push_back(
      {"right action identity",
       (hilbert::right_action(Hherm) * v - hilbert::vectorize(omega * Hherm))
           .cwiseAbs()
           .maxCoeff(),
       1e-12});
  checks.push_back({"density recovery",
                    (hilbert::partial_trace_recover(v) -
                     omega * omega.adjoint())
                        .cwiseAbs()
                        .maxCoeff(),
                    1e-12});

  {
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix());
    const Eigen::MatrixXcd U = qr.householderQ();
    const hilbert::VectorizedState gauged = hilbert::gauge_transform(v, U);
    checks.push_back({"gauge invariance of the density",
                      (hilbert::partial_trace_recover(gauged) -
                       hilbert::partial_trace_recover(v))
                          .cwiseAbs()
                          .maxCoeff(),
                      1e-10});
  }

  {
    const Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(N, N);
    const Eigen::MatrixXcd rk =
        hilbert::evolve_wave_operator(omega, Hherm, F, 0.1, 1e-3, 1.0, false);
    const Eigen::MatrixXcd exact =
        hilbert::evolve_wave_operator(omega, Hherm, F, 0.1, 1e-3, 1.0, true);
    checks.push_back({"integrator cross-check",
                      (rk - exact).cwiseAbs().maxCoeff(), 1e-9});
  }

  {
    const int Nb = 12;
    auto [X, P] = hilbert::build_position_momentum(Nb, 1.0);
    const hilbert::BoppMatrices bopp = hilbert::build_bopp_matrices(X, P, 1.0);
    const Eigen::MatrixXcd cxp =
        bopp.x * bopp.p - bopp.p * bopp.x;  // zero in the interior
    const Eigen::MatrixXcd cxl = bopp.x * bopp.lambda -
                                 bopp.lambda * bopp.x -
                                 std::complex<double>(0.0, 1.0) *
                                     Eigen::MatrixXcd::Identity(Nb * Nb,
                                                                Nb * Nb);
    double worst = 0.0;
    for (int r = 0; r < Nb * Nb; ++r) {
      if (r / Nb == Nb - 1 || r % Nb == Nb - 1) continue;
      for (int c = 0; c < Nb * Nb; ++c) {
        if (c / Nb == Nb - 1 || c % Nb == Nb - 1) continue;
        worst = std::max({worst, std::abs(cxp(r, c)), std::abs(cxl(r, c))});
      }
    }
    checks.push_back({"interior commutators", worst, 1e-12});
  }

  bool ok = true;
  for (const Check& c : checks) {
    const bool pass = c.value <= c.bound || c.value == 0.0;
    ok = ok && pass;
    std::cout << (pass ? "ok   " : "FAIL ") << c.name << " (max dev "
              << io::format_double(c.value) << ")\n";
  }
  std::cout << (ok ? "selftest: all checks passed\n"
                   : "selftest: failures present\n");
  return ok ? 0 : 3;
}

}  // namespace waveop::cli
