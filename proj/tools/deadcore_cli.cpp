#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/pipelines.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  CLI::App app{"Dead-core experiments: radial profiles, Dirichlet solves, free-boundary analysis, games"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 0;
  const char* names[] = {"radial", "solve", "analyze", "game", "liouville", "sweep"};
  const char* help[] = {"closed-form profile residuals over a parameter sweep",
                        "Dirichlet solve, writes a (x, y, u) snapshot",
                        "geometry reports on a snapshot or analytic profile",
                        "tug-of-war Monte Carlo against the mean-value fixed point",
                        "probe values over an R sweep",
                        "grid refinement or flatness table"};
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts;
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "experiment config (.ini) or manifest (.json)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: DEADCORE_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    seed_opts.push_back(sub->add_option("--seed", seed, "seed override"));
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads == 0) {
    if (const char* env = std::getenv("DEADCORE_THREADS")) threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  deadcore::RunOptions opt;
  for (int i = 0; i < 6; ++i) {
    if (subs[static_cast<std::size_t>(i)]->parsed()) {
      opt.command = names[i];
      if (seed_opts[static_cast<std::size_t>(i)]->count() > 0) opt.seed = seed;
    }
  }
  opt.out_dir = out_dir;
  opt.threads = threads;
  try {
    opt.config = deadcore::ExperimentConfig::load(config_path);
  } catch (const deadcore::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return deadcore::run_command(opt, std::cerr);
}
