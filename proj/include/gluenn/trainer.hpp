#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gluenn/loss.hpp"

namespace gluenn {

enum class OptimizerKind { adam, sgd };

struct TrainConfig {
  int max_steps = 100000;
  double learning_rate = 1e-3;
  double lr_decay = 0.9999;  // multiplicative, per step
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int log_every = 100;
  int convergence_window = 0;  // 0 disables early stopping
  double convergence_rel_improvement = 0.0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error("train: learning_rate must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error("train: lr_decay must be in (0, 1]");
    if (max_steps < 1) throw Error("train: max_steps must be at least 1");
    if (log_every < 1) throw Error("train: log_every must be at least 1");
  }
};

struct HistoryRow {
  int step = 0;
  LossBreakdown loss;
  double lr = 0.0;
};

struct TrainHistory {
  std::vector<HistoryRow> rows;
};

struct TrainResult {
  NetworkParams params;  // best-loss parameters seen
  TrainHistory history;
  double best_total = 0.0;
  int best_step = 0;
  int steps_run = 0;
  bool converged_early = false;
};

// Full-batch deterministic Adam/SGD over any loss with a gradient.
// `loss_grad` fills grad (resized by caller contract) and returns the
// breakdown; parameters are updated in place between evaluations.
class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, std::size_t n) : cfg_(cfg) {
    m_.assign(n, 0.0);
    v_.assign(n, 0.0);
  }

  // One update with the given gradient; zero gradient leaves params
  // unchanged (Adam moments stay zero, so the bias-corrected step is 0/eps).
  void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    ++t_;
    if (cfg_.optimizer == OptimizerKind::sgd) {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
      return;
    }
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double bc1 = 1.0 - std::pow(b1, t_);
    const double bc2 = 1.0 - std::pow(b2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
      v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

using LossGradFn = std::function<LossBreakdown(const NetworkParams&, std::vector<double>&)>;

// Deterministic training loop with best-so-far tracking and a windowed
// relative-improvement stop. Aborts with TrainError on non-finite loss or
// gradient, reporting the step and breakdown.
inline TrainResult train_loop(const TrainConfig& cfg, NetworkParams params,
                              const LossGradFn& loss_grad,
                              const std::function<void(int, const LossBreakdown&)>& on_log = {}) {
  cfg.validate();
  TrainResult result;
  Optimizer opt(cfg, params.size());
  std::vector<double> grad;
  double lr = cfg.learning_rate;
  result.params = params;
  result.best_total = std::numeric_limits<double>::infinity();

  // best-so-far totals at window boundaries, for the convergence test
  std::deque<double> best_ring;

  for (int step = 0; step < cfg.max_steps; ++step) {
    LossBreakdown loss = loss_grad(params, grad);
    if (!is_finite(loss.total))
      throw TrainError(step, "non-finite total loss (data=" + fmt17(loss.data) +
                                 ", residual=" + fmt17(loss.residual) + ")");
    for (double g : grad)
      if (!is_finite(g)) throw TrainError(step, "non-finite gradient component");

    if (loss.total < result.best_total) {
      result.best_total = loss.total;
      result.best_step = step;
      result.params = params;
    }
    if (step % cfg.log_every == 0 || step == cfg.max_steps - 1) {
      result.history.rows.push_back({step, loss, lr});
      if (on_log) on_log(step, loss);
    }

    if (cfg.convergence_window > 0) {
      best_ring.push_back(result.best_total);
      if (static_cast<int>(best_ring.size()) > cfg.convergence_window + 1) best_ring.pop_front();
      if (static_cast<int>(best_ring.size()) == cfg.convergence_window + 1) {
        const double before = best_ring.front();
        const double now = best_ring.back();
        if (before > 0.0 && (before - now) / before < cfg.convergence_rel_improvement) {
          result.steps_run = step + 1;
          result.converged_early = true;
          return result;
        }
      }
    }

    opt.step(params.flat, grad, lr);
    lr *= cfg.lr_decay;
    result.steps_run = step + 1;
  }
  return result;
}

// Trains a GlueNN experiment with the batched loss.
inline TrainResult train(const TrainConfig& cfg, const ExperimentSetup& env,
                         const std::function<void(int, const LossBreakdown&)>& on_log = {}) {
  NetworkParams params = build_network(env.arch, cfg.seed);
  FastLoss loss(env);
  return train_loop(
      cfg, std::move(params),
      [&loss](const NetworkParams& p, std::vector<double>& grad) {
        return loss.value_and_grad(p, grad);
      },
      on_log);
}

// Per-point diagnostic row produced by evaluate().
struct EvalRow {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> terms;        // per-term contribution values
  std::vector<Dual2<double>> coeffs;  // per trunk (c, dc/dx, d2c/dx2)
  double residual = 0.0;
};

inline std::vector<std::string> ansatz_term_labels(const ExperimentSetup& env) {
  std::vector<std::string> labels;
  for (const auto& t : env.arch.trunks) labels.push_back(t.label);
  return labels;
}

// Full diagnostic table on a grid: ansatz value, per-term contributions,
// coefficient functions, and the equation residual of the ansatz.
inline std::vector<EvalRow> evaluate(const NetworkParams& params, const ExperimentSetup& env,
                                     const std::vector<double>& grid) {
  std::vector<EvalRow> rows;
  rows.reserve(grid.size());
  for (double x : grid) {
    auto bundle = forward_coeffs(params, env.arch, x);
    EvalRow row;
    row.x = x;
    row.coeffs = bundle.c;
    AnsatzValue ansatz;
    switch (env.kind) {
      case ExperimentKind::chemical:
        ansatz = chemical_ansatz(bundle.c[0], bundle.c[1], x);
        row.residual = freeze_out_residual(ansatz.y.v, ansatz.y.d1, x, env.chem);
        break;
      case ExperimentKind::inflation:
        ansatz = inflation_ansatz(bundle.c[0], bundle.c[1], bundle.c[2], x, env.infl);
        row.residual = vector_mode_residual(ansatz.y.v, ansatz.y.d1, ansatz.y.d2, x, env.infl);
        break;
      default:
        ansatz = tunneling_ansatz(bundle.c[0], bundle.c[1], bundle.c[2], bundle.c[3], x, env.tun,
                                  ansatz_term_labels(env));
        row.residual = schrodinger_residual(ansatz.y.v, ansatz.y.d2, x, env.tun);
        break;
    }
    row.y = ansatz.y.v;
    for (const auto& t : ansatz.terms) row.terms.push_back(t.v);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gluenn
