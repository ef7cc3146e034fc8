// crosstune: label face embeddings with identities using co-occurring
// wireless device detections as weak supervision.
//
// Subcommands:
//   simulate  generate a synthetic dataset with ground truth
//   run       ingest a dataset and run the labeling loop
//   eval      score run outputs against ground truth
//   sweep     simulate/run/eval across a noise axis and aggregate

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crosstune/commands.hpp"
#include "crosstune/config.hpp"
#include "crosstune/log.hpp"

namespace {

crosstune::RunConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return crosstune::RunConfig{};
  return crosstune::load_config(config_path);
}

void apply_seed_override(crosstune::RunConfig& cfg, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  cfg.sim.seed = *seed;
  cfg.hyper.seed = *seed;
  cfg.train.seed = *seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-modality face labeling via wireless presence"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "TOML config file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override every configured seed");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(simulate);

  CLI::App* run = app.add_subcommand("run", "run the labeling pipeline");
  add_common(run);
  std::string data_dir = "data";
  std::string mode_name = "autotune";
  run->add_option("--data", data_dir, "dataset directory (sniff.csv, embeddings.jsonl, identities.csv)")
      ->required();
  run->add_option("--mode", mode_name, "autotune|deterministic|one-off")
      ->check(CLI::IsMember({"autotune", "deterministic", "one-off"}));

  CLI::App* eval = app.add_subcommand("eval", "score run outputs against truth");
  add_common(eval);
  std::string run_dir;
  std::string truth_path;
  eval->add_option("--run", run_dir, "run output directory")->required();
  eval->add_option("--truth", truth_path, "truth JSONL file")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "noise sweep: simulate/run/eval grid");
  add_common(sweep);
  std::string axis_name = "devices";
  std::vector<double> values;
  int repeats = 3;
  int jobs = 1;
  sweep->add_option("--axis", axis_name, "faces|devices|nonpoi")
      ->check(CLI::IsMember({"faces", "devices", "nonpoi"}));
  sweep->add_option("--values", values, "axis values")->required()->expected(-1);
  sweep->add_option("--repeats", repeats, "seeds per value");
  sweep->add_option("--jobs", jobs, "parallel sweep cells");

  CLI11_PARSE(app, argc, argv);

  try {
    crosstune::RunConfig cfg = load_or_default(config_path);
    apply_seed_override(cfg, seed);

    if (simulate->parsed()) {
      crosstune::cmd_simulate(cfg, out_dir);
    } else if (run->parsed()) {
      const auto mode = crosstune::run_mode_from_name(mode_name);
      crosstune::cmd_run(cfg, data_dir, *mode, out_dir);
    } else if (eval->parsed()) {
      crosstune::cmd_eval(run_dir, truth_path, out_dir);
    } else if (sweep->parsed()) {
      crosstune::SweepOptions opts;
      opts.axis = *crosstune::sweep_axis_from_name(axis_name);
      opts.values = values;
      opts.repeats = repeats;
      opts.jobs = jobs;
      crosstune::cmd_sweep(cfg, opts, out_dir);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
