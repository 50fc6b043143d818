// GlueNN experiment runner: trains scale-dependent coefficient networks for
// patchwise analytic ansatz solutions, computes ground-truth ODE oracles and
// classical matching baselines, and writes CSV/JSON artifacts.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "gluenn/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool seed_flag = true) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config/env)");
  if (seed_flag) cmd->add_option("--seed", args.seed, "seed override");
}

gluenn::ExperimentConfig load(const CommonArgs& args) {
  auto cfg = gluenn::load_config(args.config_path);
  if (args.seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(args.seed);
  return cfg;
}

int run_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  auto result = gluenn::run_experiment(cfg, args.out_dir);
  std::cout << "wrote artifacts to " << result.out_dir.string() << "\n"
            << result.summary.dump(1) << "\n";
  return 0;
}

int oracle_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  const auto dir = gluenn::resolve_out_dir(cfg, args.out_dir);
  std::filesystem::create_directories(dir);
  const auto oracle = gluenn::compute_oracle(cfg);
  const auto grid = gluenn::make_eval_grid(cfg);
  gluenn::write_text_file(dir / "oracle.csv", gluenn::oracle_csv(cfg, oracle, grid));
  gluenn::ordered_json obs;
  switch (cfg.kind) {
    case gluenn::ExperimentKind::chemical:
      obs["final_yield"] = oracle.chem.eval_component(cfg.chem.x_max, 0);
      break;
    case gluenn::ExperimentKind::inflation:
      obs["h_end"] = oracle.infl.h(cfg.infl.a_max);
      break;
    default:
      obs["R2"] = oracle.tun.scattering.r2;
      obs["T2"] = oracle.tun.scattering.t2;
      break;
  }
  gluenn::write_json_file(dir / "oracle.json", obs);
  gluenn::write_run_meta(dir, "oracle");
  std::cout << obs.dump(1) << "\n";
  return 0;
}

int train_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  const auto dir = gluenn::resolve_out_dir(cfg, args.out_dir);
  std::filesystem::create_directories(dir);
  const auto oracle = gluenn::compute_oracle(cfg);
  auto env = gluenn::make_setup(cfg, oracle);
  auto training = gluenn::train(cfg.train, env, [](int step, const gluenn::LossBreakdown& loss) {
    std::printf("step %7d  total %.6e  data %.3e  residual %.3e\n", step, loss.total, loss.data,
                loss.residual);
  });
  gluenn::write_text_file(dir / "samples.csv", gluenn::samples_csv(env));
  gluenn::write_text_file(dir / "history.csv",
                          gluenn::history_csv(training.history,
                                              gluenn::detail::loss_plan(env).size() - 2));
  gluenn::save_checkpoint(dir / "checkpoint.json", cfg.arch, training.params);
  gluenn::write_run_meta(dir, "train");
  std::cout << "best total loss " << gluenn::fmt17(training.best_total) << " at step "
            << training.best_step << " (" << training.steps_run << " steps)\n";
  return 0;
}

int match_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  const auto dir = gluenn::resolve_out_dir(cfg, args.out_dir);
  std::filesystem::create_directories(dir);
  const auto oracle = gluenn::compute_oracle(cfg);
  const auto j = gluenn::matching_json(cfg, oracle);
  gluenn::write_json_file(dir / "matching.json", j);
  gluenn::write_run_meta(dir, "match");
  std::cout << j.dump(1) << "\n";
  return 0;
}

int report_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  const auto dir = gluenn::resolve_out_dir(cfg, args.out_dir);
  auto [arch, params] = gluenn::load_checkpoint(dir / "checkpoint.json");
  const auto oracle = gluenn::compute_oracle(cfg);
  auto env = gluenn::make_setup(cfg, oracle);
  const auto grid = gluenn::make_eval_grid(cfg);
  gluenn::write_text_file(dir / "evaluation.csv",
                          gluenn::evaluation_csv(env, gluenn::evaluate(params, env, grid)));
  gluenn::write_json_file(dir / "summary.json",
                          gluenn::summarize(cfg, oracle, params,
                                            gluenn::TrainResult{params, {}, 0.0, 0, 0, false}, dir));
  gluenn::write_run_meta(dir, "report");
  std::cout << "wrote evaluation.csv and summary.json to " << dir.string() << "\n";
  return 0;
}

int compare_cmd(const CommonArgs& args) {
  auto cfg = load(args);
  const auto dir = gluenn::resolve_out_dir(cfg, args.out_dir);
  const auto j = gluenn::compare_methods(cfg, dir);
  gluenn::write_json_file(dir / "compare.json", j);
  gluenn::write_run_meta(dir, "compare");
  std::cout << j.dump(1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GlueNN: patchwise analytic ansatz training, oracles, and baselines"};
  app.require_subcommand(1);

  CommonArgs run_args, oracle_args, train_args, match_args, report_args, compare_args;
  add_common(app.add_subcommand("run", "oracle + train + report + match + summary"), run_args);
  add_common(app.add_subcommand("oracle", "ground-truth trajectory and observables"), oracle_args,
             false);
  add_common(app.add_subcommand("train", "train and checkpoint"), train_args);
  add_common(app.add_subcommand("match", "classical matching baseline"), match_args, false);
  add_common(app.add_subcommand("report", "evaluation table from a checkpoint"), report_args,
             false);
  add_common(app.add_subcommand("compare", "method comparison table"), compare_args, false);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("run")) return run_cmd(run_args);
    if (app.got_subcommand("oracle")) return oracle_cmd(oracle_args);
    if (app.got_subcommand("train")) return train_cmd(train_args);
    if (app.got_subcommand("match")) return match_cmd(match_args);
    if (app.got_subcommand("report")) return report_cmd(report_args);
    if (app.got_subcommand("compare")) return compare_cmd(compare_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const gluenn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gluenn::TrainError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
