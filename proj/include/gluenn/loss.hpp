#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gluenn/batch.hpp"
#include "gluenn/network.hpp"
#include "gluenn/problems.hpp"
#include "gluenn/sampling.hpp"
#include "gluenn/tape.hpp"

namespace gluenn {

enum class ExperimentKind { chemical, inflation, tunneling_real, tunneling_imag };

inline std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::chemical: return "chemical";
    case ExperimentKind::inflation: return "inflation";
    case ExperimentKind::tunneling_real: return "tunneling_real";
    case ExperimentKind::tunneling_imag: return "tunneling_imag";
  }
  return "?";
}

inline bool is_tunneling(ExperimentKind k) {
  return k == ExperimentKind::tunneling_real || k == ExperimentKind::tunneling_imag;
}

// Relative weights of the MSE terms.
struct LossWeights {
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  double lambda_c = 0.0;
  double lambda_d = 0.0;
};

// total is always the ordered sum data + residual + patch terms.
struct LossBreakdown {
  double total = 0.0;
  double data = 0.0;
  double residual = 0.0;
  std::vector<double> patch;

  static LossBreakdown assemble(double data, double residual, std::vector<double> patch) {
    LossBreakdown b;
    b.data = data;
    b.residual = residual;
    b.patch = std::move(patch);
    b.total = b.data + b.residual;
    for (double p : b.patch) b.total += p;
    return b;
  }
};

// Everything the loss needs, frozen before training: collocation sets and
// the oracle values h on the alpha set (precomputed once; training never
// re-integrates).
struct ExperimentSetup {
  ExperimentKind kind = ExperimentKind::chemical;
  ChemicalParams chem;
  InflationParams infl;
  TunnelingParams tun;
  ArchSpec arch;
  std::map<std::string, SampleSet> sets;
  LossWeights weights;
  std::vector<double> h_alpha;

  const SampleSet& set(const std::string& label) const {
    auto it = sets.find(label);
    if (it == sets.end())
      throw Error("experiment " + experiment_name(kind) + ": missing sample set '" + label + "'");
    return it->second;
  }

  std::vector<std::string> required_sets() const {
    switch (kind) {
      case ExperimentKind::chemical: return {"alpha", "beta"};
      case ExperimentKind::inflation: return {"alpha", "beta", "gamma"};
      default: return {"alpha", "beta", "gamma", "delta"};
    }
  }

  void validate() const {
    for (const auto& label : required_sets()) set(label);
    if (h_alpha.size() != set("alpha").points.size())
      throw Error("experiment " + experiment_name(kind) + ": h cache does not cover alpha set");
  }
};

namespace detail {

inline double abs_scalar(double v) { return std::abs(v); }
inline ad::Var abs_scalar(const ad::Var& v) { return ad::abs(v); }

// Unweighted squared contribution of one collocation point. `set_id` is
// the set label's first letter; h is the cached truth (alpha only).
template <class S>
S point_term(const ExperimentSetup& env, char set_id, const std::vector<ad::Dual2<S>>& c,
             double x, double h) {
  using ad::Dual2;
  switch (env.kind) {
    case ExperimentKind::chemical: {
      auto ansatz = chemical_ansatz(c[0], c[1], x);
      if (set_id == 'a') {
        S diff = ansatz.y.v - S(h);
        return diff * diff;
      }
      S r = freeze_out_residual(ansatz.y.v, ansatz.y.d1, x, env.chem) / ansatz.y.v;
      return r * r;
    }
    case ExperimentKind::inflation: {
      auto ansatz = inflation_ansatz(c[0], c[1], c[2], x, env.infl);
      if (set_id == 'a') {
        S diff = ansatz.y.v - S(h);
        return diff * diff;
      }
      if (set_id == 'b') {
        S r = vector_mode_residual(ansatz.y.v, ansatz.y.d1, ansatz.y.d2, x, env.infl);
        return r * r;
      }
      S t1 = ansatz.terms[0].v;  // out-of-patch suppression of the growing branch
      return t1 * t1;
    }
    default: {
      static const std::vector<std::string> no_labels;  // loss path skips term labels
      auto ansatz = tunneling_ansatz(c[0], c[1], c[2], c[3], x, env.tun, no_labels);
      if (set_id == 'a') {
        S diff = ansatz.y.v - S(h);
        return diff * diff;
      }
      if (set_id == 'b') {
        S r = schrodinger_residual(ansatz.y.v, ansatz.y.d2, x, env.tun);
        S norm = abs_scalar(ansatz.y.v) + S(env.tun.epsilon_reg);
        S q = r / norm;
        return q * q;
      }
      if (set_id == 'c') {
        S osc = ansatz.terms[0].v + ansatz.terms[1].v;
        return osc * osc;
      }
      S expo = ansatz.terms[2].v + ansatz.terms[3].v;
      return expo * expo;
    }
  }
}

struct SetPlan {
  char id;            // a / b / c / d
  std::string label;  // alpha / beta / gamma / delta
  double lambda;
  int depth;  // streams the term needs: 1 value-only, 2 adds d1, 3 adds d2
};

inline std::vector<SetPlan> loss_plan(const ExperimentSetup& env) {
  switch (env.kind) {
    case ExperimentKind::chemical:
      return {{'a', "alpha", env.weights.lambda_a, 1}, {'b', "beta", env.weights.lambda_b, 2}};
    case ExperimentKind::inflation:
      return {{'a', "alpha", env.weights.lambda_a, 1},
              {'b', "beta", env.weights.lambda_b, 3},
              {'c', "gamma", env.weights.lambda_c, 1}};
    default:
      return {{'a', "alpha", env.weights.lambda_a, 1},
              {'b', "beta", env.weights.lambda_b, 3},
              {'c', "gamma", env.weights.lambda_c, 1},
              {'d', "delta", env.weights.lambda_d, 1}};
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reference route: the whole loss recorded on a scalar tape.
// ---------------------------------------------------------------------------

struct TapedLoss {
  ad::Var total;
  LossBreakdown breakdown;
};

inline TapedLoss composite_loss_taped(ad::Tape& tape, const ExperimentSetup& env,
                                      const NetworkParams& params) {
  env.validate();
  const ParamLayout layout = make_layout(env.arch);
  auto vars = make_taped_params(tape, params);
  const std::span<const ad::Var> pspan(vars);

  std::vector<ad::Var> terms;
  for (const auto& plan : detail::loss_plan(env)) {
    const SampleSet& set = env.set(plan.label);
    ad::Var sum(0.0);
    for (std::size_t i = 0; i < set.points.size(); ++i) {
      const double x = set.points[i];
      const double h = plan.id == 'a' ? env.h_alpha[i] : 0.0;
      auto coeffs = forward_network<ad::Var>(env.arch, layout, pspan, x);
      ad::Var q = detail::point_term<ad::Var>(env, plan.id, coeffs, x, h);
      if (!is_finite(q.v))
        throw AutodiffError("non-finite loss contribution at " + plan.label +
                            " point x = " + fmt17(x));
      sum = sum + q;
    }
    terms.push_back(ad::Var(plan.lambda / static_cast<double>(set.points.size())) * sum);
  }

  TapedLoss out;
  out.total = terms[0] + terms[1];
  for (std::size_t i = 2; i < terms.size(); ++i) out.total = out.total + terms[i];
  std::vector<double> patch;
  for (std::size_t i = 2; i < terms.size(); ++i) patch.push_back(terms[i].v);
  out.breakdown = LossBreakdown::assemble(terms[0].v, terms[1].v, std::move(patch));
  return out;
}

// ---------------------------------------------------------------------------
// Fast route: batched network streams + per-point physics on a small tape.
// ---------------------------------------------------------------------------

class FastLoss {
 public:
  explicit FastLoss(const ExperimentSetup& env) : env_(env) {
    env_.validate();
    for (const auto& plan : detail::loss_plan(env_)) {
      const SampleSet& set = env_.set(plan.label);
      nets_.emplace_back(plan, BatchNet(env_.arch, set.points, plan.depth));
    }
    num_trunks_ = env_.arch.trunks.size();
  }

  const ExperimentSetup& env() const { return env_; }

  // Loss only (no gradient).
  LossBreakdown value(const NetworkParams& params) { return run(params, nullptr); }

  // Loss and gradient with respect to the flat parameter vector.
  LossBreakdown value_and_grad(const NetworkParams& params, std::vector<double>& grad) {
    grad.assign(params.size(), 0.0);
    return run(params, &grad);
  }

 private:
  LossBreakdown run(const NetworkParams& params, std::vector<double>* grad) {
    std::vector<double> term_values;
    for (auto& [plan, net] : nets_) {
      net.forward(params);
      const std::size_t n = net.num_points();
      const double scale = plan.lambda / static_cast<double>(n);

      std::vector<std::array<Eigen::MatrixXd, 3>> seeds;
      if (grad) {
        seeds.resize(num_trunks_);
        for (auto& s : seeds)
          for (int k = 0; k < plan.depth; ++k) {
            s[static_cast<std::size_t>(k)].setZero(1, static_cast<Eigen::Index>(n));
          }
      }

      double sum = 0.0;
      std::vector<ad::Dual2<ad::Var>> coeffs(num_trunks_);
      for (std::size_t i = 0; i < n; ++i) {
        point_tape_.clear();
        for (std::size_t t = 0; t < num_trunks_; ++t) {
          // leaf creation order must match the scatter order below
          ad::Var lv = ad::make_leaf(point_tape_, net.out(t, 0, i));
          ad::Var l1 = plan.depth > 1 ? ad::make_leaf(point_tape_, net.out(t, 1, i)) : ad::Var(0.0);
          ad::Var l2 = plan.depth > 2 ? ad::make_leaf(point_tape_, net.out(t, 2, i)) : ad::Var(0.0);
          coeffs[t] = ad::Dual2<ad::Var>(lv, l1, l2);
        }
        const double x = net.points()[i];
        const double h = plan.id == 'a' ? env_.h_alpha[i] : 0.0;
        ad::Var q = detail::point_term<ad::Var>(env_, plan.id, coeffs, x, h);
        if (!is_finite(q.v))
          throw AutodiffError("non-finite loss contribution at " + plan.label +
                              " point x = " + fmt17(x));
        sum += q.v;
        if (grad) {
          auto leaf_adj = point_tape_.gradient(q.id);
          std::size_t slot = 0;
          for (std::size_t t = 0; t < num_trunks_; ++t)
            for (int k = 0; k < plan.depth; ++k)
              seeds[t][static_cast<std::size_t>(k)](0, static_cast<Eigen::Index>(i)) =
                  scale * leaf_adj[slot++];
        }
      }
      term_values.push_back(scale * sum);
      if (grad) net.backward(params, seeds, *grad);
    }

    std::vector<double> patch(term_values.begin() + 2, term_values.end());
    return LossBreakdown::assemble(term_values[0], term_values[1], std::move(patch));
  }

  ExperimentSetup env_;
  std::vector<std::pair<detail::SetPlan, BatchNet>> nets_;
  std::size_t num_trunks_ = 0;
  ad::Tape point_tape_;
};

}  // namespace gluenn
