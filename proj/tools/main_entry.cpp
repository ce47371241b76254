#include <omp.h>

#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "mfe/errors.hpp"

namespace mfe::cli {

int main_entry(int argc, char** argv) {
  CLI::App app{"mean-field equation solver and blow-up diagnostics"};
  std::string config_path, output;
  std::uint64_t seed = 0;
  int threads = 0;
  bool validate_only = false;
  app.add_option("--config", config_path, "run configuration (INI)")->required();
  auto* out_opt = app.add_option("--output", output, "output directory (overrides run.output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random presets (overrides run.seed)");
  app.add_option("--threads", threads, "OpenMP threads for field kernels")->check(CLI::NonNegativeNumber);
  app.add_flag("--validate-only", validate_only, "check the config and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Loaded loaded;
  try {
    loaded = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  auto& config = loaded.config;
  if (*out_opt) config.output_dir = output;
  if (*seed_opt) config.seed = seed;
  if (config.output_dir.empty() && !validate_only) {
    loaded.violations.push_back("run.output_dir: missing (set it or pass --output)");
  }

  if (validate_only) {
    for (const auto& v : loaded.violations) std::cout << v << '\n';
    if (loaded.violations.empty()) std::cout << "config ok\n";
    return loaded.violations.empty() ? 0 : 1;
  }
  if (!loaded.violations.empty()) {
    for (const auto& v : loaded.violations) std::cerr << "error: " << v << '\n';
    return 1;
  }
  if (threads > 0) omp_set_num_threads(threads);
  return run(config);
}

}  // namespace mfe::cli
