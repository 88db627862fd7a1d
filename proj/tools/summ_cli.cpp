// summ: command-line front end.
//
//   summ run    --config <path> --out <path> --seed <int> [--set key=value ...]
//   summ sweep  --config <path> --out <dir> [--lambdas <comma list>] [--seeds <int>] [--set key=value ...]
//   summ verify --scope fast|full [--data-dir <path>]

#include <CLI11.hpp>

#include "summ/app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic unified momentum: runs, lambda sweeps and acceptance checks"};
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Single run; writes a metrics CSV and <out stem>.summary.json");
  run->add_option("--config", config, "YAML configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Metrics CSV path")->required();
  run->add_option("--seed", seed, "Run seed")->required();
  run->add_option("--set", overrides, "Override a config key, e.g. optimizer.lambda=1");

  std::string lambdas;
  std::int64_t seeds = 0;
  unsigned workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Lambda x seed sweep with aggregated curves");
  sweep->add_option("--config", config, "YAML configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_option("--lambdas", lambdas, "Comma-separated lambdas (default: optimizer.lambda)");
  sweep->add_option("--seeds", seeds, "Use seeds 0 .. n-1 (default: run.seeds)");
  sweep->add_option("--set", overrides, "Override a config key");
  sweep->add_option("--workers", workers, "Worker threads (default: hardware concurrency)");

  std::string scope = "fast", data_dir;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks and print a pass/fail table");
  verify->add_option("--scope", scope, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--data-dir", data_dir, "Directory holding the MNIST IDX files (full scope)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; usage errors share the configuration exit status
    return app.exit(e) == 0 ? summ::app::kOk : summ::app::kConfigError;
  }

  if (run->parsed()) return summ::app::cmd_run(config, out, seed, overrides);
  if (sweep->parsed()) {
    summ::app::SweepRequest req;
    req.config_path = config;
    req.out_dir = out;
    req.overrides = overrides;
    req.workers = workers;
    try {
      if (!lambdas.empty()) req.lambdas = summ::app::parse_lambda_list(lambdas);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return summ::app::kConfigError;
    }
    if (sweep->count("--seeds")) req.seeds = seeds;
    return summ::app::cmd_sweep(req);
  }
  return summ::app::cmd_verify(summ::app::parse_scope(scope), data_dir);
}
