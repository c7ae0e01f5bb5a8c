#include "waveop/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace waveop::model {

double eval_polynomial(const std::vector<double>& coeffs, double u) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> differentiate_coeffs(const std::vector<double>& coeffs,
                                         int order) {
  std::vector<double> d = coeffs;
  for (int m = 0; m < order; ++m) {
    if (d.size() <= 1) return {};
    std::vector<double> next(d.size() - 1);
    for (std::size_t k = 1; k < d.size(); ++k)
      next[k - 1] = d[k] * static_cast<double>(k);
    d = std::move(next);
  }
  return d;
}

double eval_polynomial_derivative(const std::vector<double>& coeffs, double u,
                                  int order) {
  return eval_polynomial(differentiate_coeffs(coeffs, order), u);
}

int polynomial_degree(const std::vector<double>& coeffs) {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[static_cast<std::size_t>(k)] != 0.0) return k;
  return -1;
}

HamiltonianSpec HamiltonianSpec::benchmark(int n, double hbar) {
  if (n != 2 && n != 4)
    throw ConfigError("benchmark exponent must be 2 or 4, got " +
                      std::to_string(n));
  HamiltonianSpec spec;
  spec.kinetic_coeffs = {0.0, 0.0, 0.5};
  spec.potential_coeffs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  spec.potential_coeffs.back() = 0.5;
  spec.hbar = hbar;
  spec.label = "n" + std::to_string(n);
  return spec;
}

double eval_hamiltonian(const HamiltonianSpec& spec, double x, double p) {
  if (!std::isfinite(x) || !std::isfinite(p))
    throw std::domain_error("eval_hamiltonian: non-finite input");
  return eval_polynomial(spec.kinetic_coeffs, p) +
         eval_polynomial(spec.potential_coeffs, x);
}

double eval_derivatives(const HamiltonianSpec& spec, double x, double p, int i,
                        int j) {
  if (i < 0 || j < 0)
    throw std::domain_error("eval_derivatives: orders must be non-negative");
  if (!std::isfinite(x) || !std::isfinite(p))
    throw std::domain_error("eval_derivatives: non-finite input");
  if (i > 0 && j > 0) return 0.0;  // separable form
  if (i == 0 && j == 0) return eval_hamiltonian(spec, x, p);
  if (j == 0) return eval_polynomial_derivative(spec.potential_coeffs, x, i);
  return eval_polynomial_derivative(spec.kinetic_coeffs, p, j);
}

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double c) { return std::isfinite(c); });
}

bool any_nonzero(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double c) { return c != 0.0; });
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.schema_version != 1)
    out.push_back("schema_version must be 1, got " +
                  std::to_string(cfg.schema_version));

  const auto& h = cfg.hamiltonian;
  if (!all_finite(h.kinetic_coeffs) || !all_finite(h.potential_coeffs))
    out.push_back("hamiltonian coefficients must all be finite");
  if (!any_nonzero(h.kinetic_coeffs))
    out.push_back("kinetic_coeffs must contain a nonzero coefficient for propagation runs");
  if (!any_nonzero(h.potential_coeffs))
    out.push_back("potential_coeffs must contain a nonzero coefficient for propagation runs");
  if (!(h.hbar > 0.0) || !std::isfinite(h.hbar))
    out.push_back("hbar must be a positive finite real");

  const bool hilbert_mode = cfg.mode == RunMode::hilbert_real;
  if (hilbert_mode) {
    if (cfg.basis_size < 2) out.push_back("basis_size must be at least 2");
  } else {
    const auto& g = cfg.grid;
    if (!(g.x_max > g.x_min)) out.push_back("grid requires x_max > x_min");
    if (!(g.p_max > g.p_min)) out.push_back("grid requires p_max > p_min");
    if (g.nx < 8) out.push_back("grid requires nx >= 8, got " + std::to_string(g.nx));
    if (g.np < 8) out.push_back("grid requires np >= 8, got " + std::to_string(g.np));
  }

  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
    out.push_back("step must be a positive finite real");
  if (cfg.n_steps < 1) out.push_back("n_steps must be positive");
  if (!std::isfinite(cfg.step * static_cast<double>(cfg.n_steps)))
    out.push_back("step * n_steps must be finite");
  if (cfg.checkpoint_every < 1 || cfg.checkpoint_every > cfg.n_steps)
    out.push_back("checkpoint_every must be in [1, n_steps]");

  const auto& f = cfg.phase_generator;
  if (f.kind == PhaseGeneratorKind::polynomial &&
      (!all_finite(f.x_coeffs) || !all_finite(f.p_coeffs)))
    out.push_back("phase generator coefficients must all be finite");

  if (cfg.output_path.empty()) out.push_back("output path must not be empty");
  return out;
}

namespace {

const std::map<std::string, RunMode>& mode_table() {
  static const std::map<std::string, RunMode> table = {
      {"real_quantum", RunMode::real_quantum},
      {"real_classical", RunMode::real_classical},
      {"imag_quantum", RunMode::imag_quantum},
      {"imag_semiclassical", RunMode::imag_semiclassical},
      {"imag_classical", RunMode::imag_classical},
      {"imag_sweep", RunMode::imag_sweep},
      {"hilbert_real", RunMode::hilbert_real},
  };
  return table;
}

}  // namespace

const char* mode_name(RunMode m) {
  for (const auto& [name, mode] : mode_table())
    if (mode == m) return name.c_str();
  return "unknown";
}

bool parse_mode(const std::string& text, RunMode& out) {
  auto it = mode_table().find(text);
  if (it == mode_table().end()) return false;
  out = it->second;
  return true;
}

std::vector<std::string> mode_names() {
  std::vector<std::string> names;
  for (const auto& [name, mode] : mode_table()) names.push_back(name);
  return names;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse real '" + value + "'");
  }
  if (trim(value.substr(pos)).size() != 0)
    throw ConfigError("config key '" + key + "': trailing junk in '" + value + "'");
  return v;
}

long parse_integer(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  }
  if (trim(value.substr(pos)).size() != 0)
    throw ConfigError("config key '" + key + "': trailing junk in '" + value + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) out.push_back(parse_real(key, tok));
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + value + "'");
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  bool saw_mode = false;
  int benchmark_n = 0;
  bool saw_coeffs = false;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "schema_version") {
      cfg.schema_version = static_cast<int>(parse_integer(full, value));
    } else if (full == "hamiltonian.label") {
      cfg.hamiltonian.label = value;
    } else if (full == "hamiltonian.kinetic_coeffs") {
      cfg.hamiltonian.kinetic_coeffs = parse_real_list(full, value);
      saw_coeffs = true;
    } else if (full == "hamiltonian.potential_coeffs") {
      cfg.hamiltonian.potential_coeffs = parse_real_list(full, value);
      saw_coeffs = true;
    } else if (full == "hamiltonian.hbar") {
      cfg.hamiltonian.hbar = parse_real(full, value);
    } else if (full == "hamiltonian.benchmark_n") {
      benchmark_n = static_cast<int>(parse_integer(full, value));
    } else if (full == "grid.x_min") {
      cfg.grid.x_min = parse_real(full, value);
    } else if (full == "grid.x_max") {
      cfg.grid.x_max = parse_real(full, value);
    } else if (full == "grid.p_min") {
      cfg.grid.p_min = parse_real(full, value);
    } else if (full == "grid.p_max") {
      cfg.grid.p_max = parse_real(full, value);
    } else if (full == "grid.nx") {
      cfg.grid.nx = static_cast<int>(parse_integer(full, value));
    } else if (full == "grid.np") {
      cfg.grid.np = static_cast<int>(parse_integer(full, value));
    } else if (full == "run.mode") {
      if (!parse_mode(value, cfg.mode)) {
        std::string msg = "invalid mode '" + value + "'; valid modes:";
        for (const auto& name : mode_names()) msg += " " + name;
        throw ConfigError(msg);
      }
      saw_mode = true;
    } else if (full == "run.step") {
      cfg.step = parse_real(full, value);
    } else if (full == "run.n_steps") {
      cfg.n_steps = parse_integer(full, value);
    } else if (full == "run.checkpoint_every") {
      cfg.checkpoint_every = parse_integer(full, value);
    } else if (full == "run.basis_size") {
      cfg.basis_size = static_cast<int>(parse_integer(full, value));
    } else if (full == "run.initial_x0") {
      cfg.initial_x0 = parse_real(full, value);
    } else if (full == "run.initial_p0") {
      cfg.initial_p0 = parse_real(full, value);
    } else if (full == "run.phase_generator") {
      if (value == "zero") {
        cfg.phase_generator.kind = PhaseGeneratorKind::zero;
      } else if (value == "minus_h") {
        cfg.phase_generator.kind = PhaseGeneratorKind::minus_h;
      } else if (value == "polynomial") {
        cfg.phase_generator.kind = PhaseGeneratorKind::polynomial;
      } else {
        throw ConfigError("invalid phase_generator '" + value +
                          "'; valid: zero minus_h polynomial");
      }
    } else if (full == "run.phase_x_coeffs") {
      cfg.phase_generator.x_coeffs = parse_real_list(full, value);
    } else if (full == "run.phase_p_coeffs") {
      cfg.phase_generator.p_coeffs = parse_real_list(full, value);
    } else if (full == "output.path") {
      cfg.output_path = value;
    } else if (full == "output.write_field") {
      cfg.write_field = parse_flag(full, value);
    } else {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + full + "'");
    }
  }

  if (benchmark_n != 0) {
    if (saw_coeffs)
      throw ConfigError("config sets both benchmark_n and explicit coefficients");
    auto bench = HamiltonianSpec::benchmark(benchmark_n, cfg.hamiltonian.hbar);
    bench.label = cfg.hamiltonian.label.empty() ? bench.label : cfg.hamiltonian.label;
    cfg.hamiltonian = bench;
  }
  if (!saw_mode) throw ConfigError("config missing run.mode");
  return cfg;
}

}  // namespace waveop::model
