// Per-size coupling-strength calibration for the laser solver. Prints
// `laser.kappa.<n> = value` lines ready to paste into config/defaults.conf.

#include <cstdio>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "xorbench/error.hpp"
#include "xorbench/solvers.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the laser coupling strength per problem size"};
  std::vector<std::size_t> sizes{16, 32, 64};
  xorbench::CalibrationOptions opt;
  opt.max_steps = 100000;
  app.add_option("-n,--sizes", sizes, "Problem sizes (spins)")->capture_default_str();
  app.add_option("--instances", opt.instances, "Instances per size")->capture_default_str();
  app.add_option("--seeds", opt.seeds_per_instance, "Trajectories per instance")->capture_default_str();
  app.add_option("--max-steps", opt.max_steps, "Round trips per trajectory")->capture_default_str();
  app.add_option("--kappa-lo", opt.kappa_lo)->capture_default_str();
  app.add_option("--kappa-hi", opt.kappa_hi)->capture_default_str();
  app.add_option("--bracket", opt.bracket_points, "Coarse grid points")->capture_default_str();
  app.add_option("--refine", opt.refine_iterations, "Golden-section iterations")->capture_default_str();
  app.add_option("--seed", opt.master_seed)->capture_default_str();
  app.add_option("--g0", opt.base.g0)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::printf("# calibration: instances=%zu seeds=%zu max_steps=%llu g0=%g seed=%llu\n",
                opt.instances, opt.seeds_per_instance,
                static_cast<unsigned long long>(opt.max_steps), opt.base.g0,
                static_cast<unsigned long long>(opt.master_seed));
    for (std::size_t n : sizes) {
      const auto r = xorbench::calibrate_kappa(n, opt);
      std::printf("# n=%zu success=%.3f median_steps=%g evaluated=%zu\n", n, r.success_rate,
                  r.median_steps, r.evaluated.size());
      std::printf("laser.kappa.%zu = %.6g\n", n, r.kappa);
      std::fflush(stdout);
    }
  } catch (const xorbench::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
