// Regenerates the committed golden observable files from the oracle module
// alone (no engine code paths). Slow by design: the dense semiclassical
// reference diagonalizes up to a 4096-dimensional generator.
//
// Usage: waveop_make_golden [output-dir]   (default data/golden)

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "waveop/io.hpp"
#include "waveop/model.hpp"
#include "waveop/oracle.hpp"

namespace {

nlohmann::json entry(const std::string& label, double beta,
                     const waveop::oracle::ThermalObservables& obs,
                     const std::string& oracle, double tol) {
  return {{"label", label},   {"beta", beta}, {"energy", obs.energy},
          {"dx", obs.dx},     {"dp", obs.dp}, {"oracle", oracle},
          {"tolerance", tol}};
}

waveop::model::GridSpec square_grid(double half_width, int n) {
  waveop::model::GridSpec g;
  g.x_min = g.p_min = -half_width;
  g.x_max = g.p_max = half_width;
  g.nx = g.np = n;
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string outdir = argc > 1 ? argv[1] : "data/golden";
  std::filesystem::create_directories(outdir);
  const std::vector<double> betas = {0.5, 1.0, 2.0, 5.0, 10.0};

  for (const int n : {2, 4}) {
    const waveop::model::HamiltonianSpec spec =
        waveop::model::HamiltonianSpec::benchmark(n);
    const int basis = n == 2 ? 64 : 192;
    nlohmann::json arr = nlohmann::json::array();

    for (const double beta : betas) {
      std::printf("[%s] beta = %g\n", spec.label.c_str(), beta);
      std::fflush(stdout);

      const auto quantum = waveop::oracle::exact_diag_thermal(spec, basis, beta);
      arr.push_back(entry(spec.label, beta, quantum, "exact_diag_thermal",
                          1e-3));

      const auto classical =
          waveop::oracle::classical_gibbs_quadrature(spec, beta);
      arr.push_back(entry(spec.label, beta, classical,
                          "classical_gibbs_quadrature", 1e-3));

      // Grid choice tracks the Gibbs field: hot states are broad (wide box),
      // cold states are narrow (fine spacing). The beta = 10 quartic value is
      // the tight acceptance reference, so it gets the finest grid plus a
      // printed convergence delta.
      waveop::model::GridSpec grid;
      double tol = 1e-3;
      if (n == 2) {
        grid = square_grid(8.0, 48);
      } else if (beta < 4.0) {
        grid = square_grid(8.0, 48);
      } else if (beta < 8.0) {
        grid = square_grid(7.0, 48);
      } else {
        const auto coarse = waveop::oracle::semiclassical_dense_reference(
            spec, square_grid(7.0, 48), beta);
        const auto fine = waveop::oracle::semiclassical_dense_reference(
            spec, square_grid(7.0, 64), beta);
        std::printf("  semiclassical grid convergence |E48 - E64| = %.3e\n",
                    std::abs(coarse.energy - fine.energy));
        arr.push_back(entry(spec.label, beta, fine,
                            "semiclassical_dense_reference", 1e-4));
        continue;
      }
      const auto semicl =
          waveop::oracle::semiclassical_dense_reference(spec, grid, beta);
      arr.push_back(entry(spec.label, beta, semicl,
                          "semiclassical_dense_reference", tol));
    }

    const std::string path =
        outdir + "/benchmark_" + spec.label + ".json";
    waveop::io::write_text_file(path, arr.dump(2) + "\n");
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}
