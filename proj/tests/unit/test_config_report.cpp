#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "gluenn/runner.hpp"

using namespace gluenn;
namespace fs = std::filesystem;

#ifndef GLUENN_CONFIG_DIR
#define GLUENN_CONFIG_DIR "configs"
#endif

namespace {

// Tiny but complete chemical config for pipeline tests.
ExperimentConfig tiny_chemical() {
  auto cfg = default_experiment_config(ExperimentKind::chemical);
  cfg.arch.head_hidden = {8};
  cfg.arch.head_output = 6;
  cfg.arch.trunks = {{{6}, "c1_1"}, {{6}, "c2_1"}};
  cfg.samples["alpha"].count = 6;
  cfg.samples["beta"].count = 8;
  cfg.train.max_steps = 40;
  cfg.train.log_every = 10;
  cfg.train.convergence_window = 0;
  cfg.oracle_rel_tol = 1e-8;
  cfg.oracle_abs_tol = 1e-12;
  cfg.eval_grid.count = 12;
  return cfg;
}

}  // namespace

TEST_CASE("bundled configs parse and reproduce the published tables") {
  const fs::path dir = GLUENN_CONFIG_DIR;

  auto chem = load_config(dir / "chemical.json");
  CHECK(chem.kind == ExperimentKind::chemical);
  CHECK(chem.chem.eta == 1e4);
  CHECK(chem.samples.at("alpha").intervals ==
        std::vector<std::pair<double, double>>{{1.0, 1.9}});
  CHECK(chem.samples.at("alpha").count == 28);
  CHECK(chem.samples.at("alpha").spacing == Spacing::logarithmic);
  CHECK(chem.samples.at("beta").intervals == std::vector<std::pair<double, double>>{{7.8, 31.0}});
  CHECK(chem.samples.at("beta").count == 60);
  CHECK(chem.weights.lambda_a == 1600.0);
  CHECK(chem.weights.lambda_b == 700.0);
  CHECK(chem.arch.head_hidden == std::vector<int>{100, 100});

  auto infl = load_config(dir / "inflation.json");
  CHECK(infl.infl.hubble == 150.0);
  CHECK(infl.infl.k == 2.0);
  CHECK(infl.infl.mass == 0.10);
  CHECK(infl.infl.a_star == 0.10);
  CHECK(infl.samples.at("alpha").count == 10);
  CHECK(infl.samples.at("alpha").spacing == Spacing::linear);
  CHECK(infl.samples.at("beta").count == 650);
  CHECK(infl.samples.at("gamma").intervals ==
        std::vector<std::pair<double, double>>{{23.0, 500.0}});
  CHECK(infl.samples.at("gamma").count == 382);
  CHECK(infl.weights.lambda_a == 800.0);
  CHECK(infl.weights.lambda_b == 0.50);
  CHECK(infl.weights.lambda_c == 0.0032);
  CHECK(infl.arch.head_hidden == std::vector<int>{1, 4, 4, 4, 50});

  auto tre = load_config(dir / "tunneling_real.json");
  CHECK(tre.tun.sigma == 0.5);
  CHECK(tre.tun.d == 10.0);
  CHECK(tre.tun.v0 == 4.1);
  CHECK(tre.tun.k == 2.0);
  CHECK(tre.tun.mass == 0.5);
  CHECK(tre.tun.epsilon_reg == 1.0);
  CHECK(tre.samples.at("alpha").count == 140);
  CHECK(tre.samples.at("beta").count == 490);
  CHECK(tre.samples.at("gamma").intervals ==
        std::vector<std::pair<double, double>>{{-4.08, 4.03}});
  CHECK(tre.samples.at("gamma").count == 160);
  CHECK(tre.samples.at("delta").count == 340);
  CHECK(tre.weights.lambda_a == 1.0);
  CHECK(tre.weights.lambda_b == 3.0);
  CHECK(tre.weights.lambda_c == 0.25);
  CHECK(tre.weights.lambda_d == 0.25);

  auto tim = load_config(dir / "tunneling_imag.json");
  CHECK(tim.samples.at("gamma").intervals ==
        std::vector<std::pair<double, double>>{{-3.06, 5.04}});
  CHECK(tim.samples.at("delta").count == 320);
  CHECK(tim.arch.trunks[0].label == "c3_1");

  SECTION("bundled files equal the factory defaults byte for byte") {
    for (auto kind : {ExperimentKind::chemical, ExperimentKind::inflation,
                      ExperimentKind::tunneling_real, ExperimentKind::tunneling_imag}) {
      const auto file = dir / (experiment_name(kind) + ".json");
      const auto factory = config_to_json(default_experiment_config(kind)).dump(1) + "\n";
      CHECK(read_text_file(file) == factory);
    }
  }
}

TEST_CASE("config validation errors name the offending field") {
  auto j = config_to_json(default_experiment_config(ExperimentKind::chemical));

  SECTION("negative lambda_a") {
    j["weights"]["lambda_a"] = -5.0;
    try {
      config_from_json(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path == "config.weights.lambda_a");
    }
  }
  SECTION("unknown key") {
    j["wieghts"] = 1;
    try {
      config_from_json(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path.find("wieghts") != std::string::npos);
    }
  }
  SECTION("unknown nested key") {
    j["train"]["momentum"] = 0.9;
    try {
      config_from_json(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path == "config.train.momentum");
    }
  }
  SECTION("missing required sample set") {
    j["samples"].erase("beta");
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  }
}

TEST_CASE("config JSON round trip preserves the experiment") {
  for (auto kind : {ExperimentKind::chemical, ExperimentKind::inflation,
                    ExperimentKind::tunneling_real}) {
    auto cfg = default_experiment_config(kind);
    auto cfg2 = config_from_json(config_to_json(cfg));
    CHECK(cfg2.kind == cfg.kind);
    CHECK(config_to_json(cfg2) == config_to_json(cfg));
  }
}

TEST_CASE("run_experiment writes the full artifact set deterministically") {
  auto cfg = tiny_chemical();
  const fs::path dir1 = fs::temp_directory_path() / "gluenn_run_a";
  const fs::path dir2 = fs::temp_directory_path() / "gluenn_run_b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  auto r1 = run_experiment(cfg, dir1.string());
  auto r2 = run_experiment(cfg, dir2.string());

  for (const char* name : {"samples.csv", "history.csv", "checkpoint.json", "evaluation.csv",
                           "oracle.csv", "matching.json", "summary.json"}) {
    INFO(name);
    CHECK(fs::exists(dir1 / name));
    CHECK(read_text_file(dir1 / name) == read_text_file(dir2 / name));
  }

  SECTION("summary relative errors recompute from stored observables") {
    auto s = ordered_json::parse(read_text_file(dir1 / "summary.json"));
    const double model = s["observables"]["gluenn"]["final_yield"].get<double>();
    const double oracle = s["observables"]["oracle"]["final_yield"].get<double>();
    CHECK(s["relative_errors"]["gluenn_final_yield"].get<double>() ==
          (model - oracle) / oracle);
  }

  SECTION("evaluation normalized contributions partition unity") {
    auto text = read_text_file(dir1 / "evaluation.csv");
    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("n_c1_1") != std::string::npos);
    std::string line;
    while (std::getline(lines, line)) {
      std::istringstream cells(line);
      std::string cell;
      std::vector<double> vals;
      while (std::getline(cells, cell, ',')) vals.push_back(std::stod(cell));
      // columns: x, y, term x2, n x2, coeffs 3x2, residual
      CHECK(vals[4] + vals[5] == 1.0);  // exact partition
    }
  }

  if (std::getenv("GLUENN_KEEP_DIRS") == nullptr) {
    fs::remove_all(dir1);
    fs::remove_all(dir2);
  }
}

TEST_CASE("seed override changes the run") {
  auto cfg = tiny_chemical();
  cfg.train.max_steps = 10;
  const fs::path dir1 = fs::temp_directory_path() / "gluenn_seed_a";
  const fs::path dir2 = fs::temp_directory_path() / "gluenn_seed_b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  auto r1 = run_experiment(cfg, dir1.string(), 0);
  auto r2 = run_experiment(cfg, dir2.string(), 1);
  CHECK(read_text_file(dir1 / "history.csv") != read_text_file(dir2 / "history.csv"));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("17-digit CSV rendering round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 2.0517e-13, -7.724957157719e-4, 1e300, 0.1}) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}
