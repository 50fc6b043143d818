#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gluenn/trainer.hpp"

using namespace gluenn;

namespace {

LossBreakdown quadratic_loss(const NetworkParams& p, std::vector<double>& grad, double target) {
  grad.assign(p.size(), 0.0);
  const double d = p.flat[0] - target;
  grad[0] = 2.0 * d;
  LossBreakdown b;
  b.total = d * d;
  b.data = b.total;
  return b;
}

}  // namespace

TEST_CASE("quadratic toy loss converges under Adam") {
  TrainConfig cfg;
  cfg.max_steps = 5000;
  cfg.learning_rate = 1e-2;
  cfg.lr_decay = 1.0;
  NetworkParams p;
  p.flat = {0.0};
  auto result = train_loop(cfg, p, [](const NetworkParams& q, std::vector<double>& g) {
    return quadratic_loss(q, g, 2.0);
  });
  CHECK(std::abs(result.params.flat[0] - 2.0) < 1e-6);
}

TEST_CASE("training twice gives an identical history") {
  TrainConfig cfg;
  cfg.max_steps = 400;
  cfg.learning_rate = 5e-3;
  cfg.log_every = 7;
  auto run = [&]() {
    NetworkParams p;
    p.flat = {1.3, -0.4};
    return train_loop(cfg, p, [](const NetworkParams& q, std::vector<double>& g) {
      g.assign(q.size(), 0.0);
      const double a = q.flat[0], b = q.flat[1];
      g[0] = 2.0 * a + b;
      g[1] = a + 4.0 * b * b * b;
      LossBreakdown out;
      out.total = a * a + a * b + b * b * b * b;
      out.data = out.total;
      return out;
    });
  };
  auto r1 = run();
  auto r2 = run();
  REQUIRE(r1.history.rows.size() == r2.history.rows.size());
  for (std::size_t i = 0; i < r1.history.rows.size(); ++i) {
    CHECK(r1.history.rows[i].step == r2.history.rows[i].step);
    CHECK(r1.history.rows[i].loss.total == r2.history.rows[i].loss.total);
    CHECK(r1.history.rows[i].lr == r2.history.rows[i].lr);
  }
  CHECK(r1.params.flat == r2.params.flat);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
  TrainConfig cfg;
  Optimizer opt(cfg, 3);
  std::vector<double> params = {1.0, -2.0, 0.5};
  const auto before = params;
  opt.step(params, {0.0, 0.0, 0.0}, 1e-2);
  opt.step(params, {0.0, 0.0, 0.0}, 1e-2);
  CHECK(params == before);
}

TEST_CASE("history steps are strictly increasing and best is monotone") {
  TrainConfig cfg;
  cfg.max_steps = 300;
  cfg.learning_rate = 0.5;  // deliberately oscillatory
  cfg.log_every = 1;
  NetworkParams p;
  p.flat = {3.0};
  auto result = train_loop(cfg, p, [](const NetworkParams& q, std::vector<double>& g) {
    return quadratic_loss(q, g, 0.0);
  });
  double best = std::numeric_limits<double>::infinity();
  int prev_step = -1;
  for (const auto& row : result.history.rows) {
    CHECK(row.step > prev_step);
    prev_step = row.step;
    CHECK(is_finite(row.loss.total));
    best = std::min(best, row.loss.total);
  }
  CHECK(result.best_total <= best + 1e-300);
  CHECK(result.best_total == Catch::Approx(best));
}

TEST_CASE("early stopping fires on a stalled loss") {
  TrainConfig cfg;
  cfg.max_steps = 100000;
  cfg.learning_rate = 1e-3;
  cfg.convergence_window = 50;
  cfg.convergence_rel_improvement = 1e-9;
  NetworkParams p;
  p.flat = {0.0};
  auto result = train_loop(cfg, p, [](const NetworkParams& q, std::vector<double>& g) {
    g.assign(1, 0.0);  // flat landscape: nothing to improve
    LossBreakdown b;
    b.total = 1.0;
    b.data = 1.0;
    return b;
  });
  CHECK(result.converged_early);
  CHECK(result.steps_run <= 60);
}

TEST_CASE("non-finite loss aborts with the step index") {
  TrainConfig cfg;
  cfg.max_steps = 100;
  NetworkParams p;
  p.flat = {1.0};
  try {
    train_loop(cfg, p, [](const NetworkParams& q, std::vector<double>& g) {
      g.assign(1, 0.0);
      LossBreakdown b;
      b.total = std::numeric_limits<double>::quiet_NaN();
      return b;
    });
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    CHECK(e.step == 0);
  }
}

TEST_CASE("training a tiny chemical setup reduces the loss") {
  ExperimentSetup env;
  env.kind = ExperimentKind::chemical;
  env.arch.input_transform = InputTransform::log_scaled;
  env.arch.x_ref = 1.0;
  env.arch.head_hidden = {8};
  env.arch.head_output = 6;
  env.arch.trunks = {{{6}, "c1_1"}, {{6}, "c2_1"}};
  env.weights = {1600.0, 700.0, 0.0, 0.0};
  env.sets["alpha"] = generate_samples("alpha", {{{1.0, 1.9}}, 8, Spacing::logarithmic});
  env.sets["beta"] = generate_samples("beta", {{{7.8, 31.0}}, 10, Spacing::logarithmic});
  for (double x : env.sets["alpha"].points) env.h_alpha.push_back(equilibrium_yield(x));

  TrainConfig cfg;
  cfg.max_steps = 300;
  cfg.learning_rate = 3e-3;
  cfg.seed = 0;
  cfg.log_every = 299;
  auto result = train(cfg, env);
  REQUIRE(result.history.rows.size() >= 2);
  CHECK(result.best_total < result.history.rows.front().loss.total);
  auto rows = evaluate(result.params, env, {1.0, 5.0, 31.0});
  CHECK(rows.size() == 3);
  CHECK(rows[0].y > 0.0);
  CHECK(rows[0].terms.size() == 2);
  CHECK(rows[0].coeffs.size() == 2);
}
