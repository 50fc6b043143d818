#pragma once

#include <chrono>
#include <filesystem>
#include <sstream>

#include "gluenn/config.hpp"
#include "gluenn/matching.hpp"
#include "gluenn/scattering.hpp"
#include "gluenn/trainer.hpp"

namespace gluenn {

inline std::vector<double> make_eval_grid(const ExperimentConfig& cfg) {
  auto [lo, hi] = cfg.domain();
  const int n = cfg.eval_grid.count;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    grid[static_cast<std::size_t>(i)] =
        cfg.eval_grid.spacing == Spacing::linear ? lo + (hi - lo) * s : lo * std::pow(hi / lo, s);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

// Oracle bundle shared by setup construction and reporting.
struct OracleBundle {
  ExperimentKind kind;
  OracleSolution chem;       // chemical only
  InflationOracle infl;      // inflation only
  TunnelingOracle tun;       // tunneling only
};

inline OracleBundle compute_oracle(const ExperimentConfig& cfg) {
  OracleBundle b;
  b.kind = cfg.kind;
  switch (cfg.kind) {
    case ExperimentKind::chemical:
      b.chem = oracle_chemical(cfg.chem, cfg.oracle_rel_tol, cfg.oracle_abs_tol);
      break;
    case ExperimentKind::inflation:
      b.infl = oracle_inflation(cfg.infl, cfg.oracle_rel_tol, cfg.oracle_abs_tol);
      break;
    default:
      b.tun = oracle_tunneling(cfg.tun, cfg.oracle_rel_tol, cfg.oracle_abs_tol);
      break;
  }
  return b;
}

// Truth value h(x) for the data loss, in the training gauge.
inline double oracle_h(const OracleBundle& b, ExperimentKind kind, double x) {
  switch (kind) {
    case ExperimentKind::chemical: return b.chem.eval_component(x, 0);
    case ExperimentKind::inflation: return b.infl.h(x);
    case ExperimentKind::tunneling_real: return b.tun.psi(x).real();
    default: return b.tun.psi(x).imag();
  }
}

inline ExperimentSetup make_setup(const ExperimentConfig& cfg, const OracleBundle& oracle) {
  ExperimentSetup env;
  env.kind = cfg.kind;
  env.chem = cfg.chem;
  env.infl = cfg.infl;
  env.tun = cfg.tun;
  env.arch = cfg.arch;
  env.weights = cfg.weights;
  for (const auto& [label, spec] : cfg.samples) env.sets[label] = generate_samples(label, spec);
  for (double x : env.sets.at("alpha").points)
    env.h_alpha.push_back(oracle_h(oracle, cfg.kind, x));
  env.validate();
  return env;
}

// ---------------------------------------------------------------------------
// CSV writers (17 significant digits; byte-stable between reruns)
// ---------------------------------------------------------------------------

inline std::string samples_csv(const ExperimentSetup& env) {
  std::ostringstream out;
  out << "set,point\n";
  for (const auto& [label, set] : env.sets)
    for (double p : set.points) out << label << "," << fmt17(p) << "\n";
  return out.str();
}

inline std::string history_csv(const TrainHistory& history, std::size_t patch_terms) {
  std::ostringstream out;
  out << "step,total,data,residual";
  for (std::size_t i = 0; i < patch_terms; ++i) out << ",patch" << i;
  out << ",lr\n";
  for (const auto& row : history.rows) {
    out << row.step << "," << fmt17(row.loss.total) << "," << fmt17(row.loss.data) << ","
        << fmt17(row.loss.residual);
    for (std::size_t i = 0; i < patch_terms; ++i)
      out << "," << fmt17(i < row.loss.patch.size() ? row.loss.patch[i] : 0.0);
    out << "," << fmt17(row.lr) << "\n";
  }
  return out.str();
}

inline std::string oracle_csv(const ExperimentConfig& cfg, const OracleBundle& oracle,
                              const std::vector<double>& grid) {
  std::ostringstream out;
  switch (cfg.kind) {
    case ExperimentKind::chemical: {
      out << "x,Y,dY\n";
      for (double x : grid) {
        const double y = oracle.chem.eval_component(x, 0);
        const double yeq = equilibrium_yield(x);
        const double dy = -cfg.chem.eta / (x * x) * (y * y - yeq * yeq);
        out << fmt17(x) << "," << fmt17(y) << "," << fmt17(dy) << "\n";
      }
      break;
    }
    case ExperimentKind::inflation: {
      out << "a,h,re_x,im_x\n";
      for (double a : grid) {
        auto u = oracle.infl.sol.eval(a);
        out << fmt17(a) << "," << fmt17(std::hypot(u[0], u[2]) / oracle.infl.norm) << ","
            << fmt17(u[0]) << "," << fmt17(u[2]) << "\n";
      }
      break;
    }
    default: {
      out << "x,re_psi,im_psi,re_dpsi,im_dpsi\n";
      for (double x : grid) {
        auto u = oracle.tun.sol.eval(x);
        out << fmt17(x) << "," << fmt17(u[0]) << "," << fmt17(u[2]) << "," << fmt17(u[1]) << ","
            << fmt17(u[3]) << "\n";
      }
      break;
    }
  }
  return out.str();
}

// Normalized per-term contributions. Chemical/inflation rows divide each
// ansatz term by y itself; tunneling rows use the oscillatory/exponential
// aggregate normalization whose two entries sum to one by construction.
struct ContributionRow {
  double x = 0.0;
  std::vector<double> normalized;
};

inline std::vector<ContributionRow> normalized_contributions(const ExperimentSetup& env,
                                                             const std::vector<EvalRow>& rows) {
  std::vector<ContributionRow> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    ContributionRow c;
    c.x = row.x;
    if (is_tunneling(env.kind)) {
      const double osc = std::hypot(row.coeffs[0].v, row.coeffs[1].v);
      const double kap = env.tun.kappa();
      const double expo = std::abs(row.coeffs[2].v) * std::exp(kap * row.x) +
                          std::abs(row.coeffs[3].v) * std::exp(-kap * row.x);
      const double n = osc + expo;
      const double c1 = osc / n;
      c.normalized = {c1, 1.0 - c1};  // exact complement
    } else {
      double partial = 0.0;
      for (std::size_t i = 0; i + 1 < row.terms.size(); ++i) {
        c.normalized.push_back(row.terms[i] / row.y);
        partial += row.terms[i] / row.y;
      }
      c.normalized.push_back(1.0 - partial);  // exact partition of unity
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string evaluation_csv(const ExperimentSetup& env, const std::vector<EvalRow>& rows) {
  const auto labels = ansatz_term_labels(env);
  const auto contributions = normalized_contributions(env, rows);
  std::ostringstream out;
  out << "x,y";
  for (const auto& l : labels) out << ",term_" << l;
  if (is_tunneling(env.kind)) {
    out << ",n_osc,n_exp";
  } else {
    for (const auto& l : labels) out << ",n_" << l;
  }
  for (const auto& l : labels) out << ",c_" << l << ",dc_" << l << ",d2c_" << l;
  out << ",residual\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    out << fmt17(row.x) << "," << fmt17(row.y);
    for (double t : row.terms) out << "," << fmt17(t);
    for (double n : contributions[i].normalized) out << "," << fmt17(n);
    for (const auto& cc : row.coeffs)
      out << "," << fmt17(cc.v) << "," << fmt17(cc.d1) << "," << fmt17(cc.d2);
    out << "," << fmt17(row.residual) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Matching + summary JSON
// ---------------------------------------------------------------------------

inline ordered_json match_result_json(const MatchResult& m) {
  ordered_json j;
  j["matching_point"] = m.matching_point;
  ordered_json central;
  for (const auto& [name, v] : m.central) central[name] = v;
  j["central"] = central;
  ordered_json band;
  for (const auto& [name, lohi] : m.band) {
    band[name] = {{"low", lohi.first}, {"high", lohi.second}};
  }
  j["band"] = band;
  ordered_json sweep = ordered_json::array();
  for (const auto& [p, obs] : m.sweep) {
    ordered_json row;
    row["point"] = p;
    row["observables"] = obs;
    sweep.push_back(row);
  }
  j["sweep"] = sweep;
  return j;
}

inline ordered_json matching_json(const ExperimentConfig& cfg, const OracleBundle& oracle) {
  ordered_json j;
  j["experiment"] = experiment_name(cfg.kind);
  switch (cfg.kind) {
    case ExperimentKind::chemical: {
      auto m = match_c0_chemical(7.8);
      j["scheme"] = "C0";
      j["result"] = match_result_json(m);
      break;
    }
    case ExperimentKind::inflation: {
      auto h = [&](double a) { return oracle.infl.h(a); };
      auto m = match_c1_inflation(cfg.infl.k / cfg.infl.mass, cfg.infl, h);
      j["scheme"] = "C1";
      j["result"] = match_result_json(m.result);
      break;
    }
    default: {
      auto m = match_c1_tunneling(-cfg.tun.d / 2.0, cfg.tun, oracle.tun);
      j["scheme"] = "C1";
      j["result"] = match_result_json(m.result);
      j["metadata"] = {{"swept_point", "left interface only"},
                       {"right_reference", "transmitted-side solution continued from x_max"}};
      break;
    }
  }
  return j;
}

// Observables of one method, as stored in summary.json. Relative errors are
// computed from the stored values at read/write time, never independently.
inline double relative_error(double method, double oracle) { return (method - oracle) / oracle; }

}  // namespace gluenn
