#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <vector>

#include "gluenn/bessel.hpp"
#include "gluenn/oracles.hpp"

namespace gluenn {

// Classical C^n matching baseline: central observable(s) at the chosen
// matching point plus the min/max band over a +-20% sweep of that point.
// Band endpoints are extrema over the sweep and need not bracket the
// central value symmetrically.
struct MatchResult {
  double matching_point = 0.0;
  std::vector<std::pair<std::string, double>> central;  // named observables
  std::vector<std::pair<std::string, std::pair<double, double>>> band;
  std::vector<std::pair<double, std::vector<double>>> sweep;  // point -> observables
};

namespace detail_match {

inline MatchResult sweep_band(double central_point,
                              const std::vector<std::string>& names,
                              const std::function<std::vector<double>(double)>& observables,
                              int sweep_points = 21) {
  MatchResult result;
  result.matching_point = central_point;
  const auto central = observables(central_point);
  for (std::size_t i = 0; i < names.size(); ++i) result.central.emplace_back(names[i], central[i]);

  std::vector<double> lo(names.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(names.size(), -std::numeric_limits<double>::infinity());
  for (int s = 0; s < sweep_points; ++s) {
    const double frac = 0.8 + 0.4 * s / (sweep_points - 1);
    const double p = central_point * frac;
    auto obs = observables(p);
    for (std::size_t i = 0; i < names.size(); ++i) {
      lo[i] = std::min(lo[i], obs[i]);
      hi[i] = std::max(hi[i], obs[i]);
    }
    result.sweep.emplace_back(p, std::move(obs));
  }
  for (std::size_t i = 0; i < names.size(); ++i)
    result.band.emplace_back(names[i], std::make_pair(lo[i], hi[i]));
  std::sort(result.sweep.begin(), result.sweep.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return result;
}

}  // namespace detail_match

// ---------------------------------------------------------------------------
// Chemical: C0 matching
// ---------------------------------------------------------------------------

// The late-time patch solution is a constant yield fixed by continuity with
// the equilibrium curve at the matching point: Y_inf = Y_eq(x_m). Exponential
// sensitivity to x_m is the instability this baseline demonstrates.
inline MatchResult match_c0_chemical(double x_m) {
  if (!(x_m > 0.0)) throw Error("match_c0_chemical: x_m must be positive");
  return detail_match::sweep_band(x_m, {"final_yield"},
                                  [](double xm) { return std::vector<double>{equilibrium_yield(xm)}; });
}

// ---------------------------------------------------------------------------
// Inflation: C1 matching at a = k/m
// ---------------------------------------------------------------------------

// Piecewise amplitude curve: the literal patch-1 form (single Hankel branch,
// oracle-normalized) below a_m, and the patch-2 Bessel pair C^1-matched to it
// at a_m.
struct InflationMatch {
  MatchResult result;
  std::function<double(double)> curve;  // |X(a)| in the oracle gauge
  std::complex<double> c2_minus;        // matched J_{-1/2} coefficient
  std::complex<double> c2_plus;         // matched J_{+1/2} coefficient
};

inline InflationMatch match_c1_inflation(double a_m, const InflationParams& p,
                                         const std::function<double(double)>& oracle_h = {}) {
  if (!(a_m > 0.0)) throw Error("match_c1_inflation: a_m must be positive");
  const double a0 = p.a_min;
  const double norm = std::abs(hankel1_3half(p.k / (a0 * p.hubble)));

  auto patch1 = [&](double a) {
    return hankel1_3half(p.k / (a * p.hubble)) / norm;
  };
  auto patch1_deriv = [&](double a) {
    const double z = p.k / (a * p.hubble);
    return hankel1_3half_prime(z) * (-z / a) / norm;
  };

  auto solve_at = [&](double am) {
    const double w = p.k / (p.mass * am);
    const double dw = -w / am;
    // 2x2 complex system: value and derivative continuity
    const std::complex<double> m11 = bessel_j_mhalf(w), m12 = bessel_j_half(w);
    const std::complex<double> m21 = bessel_j_mhalf_prime(w) * dw, m22 = bessel_j_half_prime(w) * dw;
    const std::complex<double> det = m11 * m22 - m12 * m21;
    if (std::abs(det) < 1e-300)
      throw Error("match_c1_inflation: singular matching system (Wronskian vanished)");
    const std::complex<double> r1 = patch1(am), r2 = patch1_deriv(am);
    const std::complex<double> ca = (r1 * m22 - m12 * r2) / det;
    const std::complex<double> cb = (m11 * r2 - r1 * m21) / det;
    return std::make_pair(ca, cb);
  };

  auto matched_curve = [&, solve_at](double am) {
    auto [ca, cb] = solve_at(am);
    return [=, this_p = p](double a) {
      if (a < am) return std::abs(hankel1_3half(this_p.k / (a * this_p.hubble))) / norm;
      const double w = this_p.k / (this_p.mass * a);
      return std::abs(ca * bessel_j_mhalf(w) + cb * bessel_j_half(w));
    };
  };

  // observables: amplitude at the domain end, plus relative L2 error vs the
  // oracle when one is supplied
  std::vector<std::string> names = {"h_end"};
  if (oracle_h) names.push_back("l2_rel_error");
  std::vector<double> grid;
  const int n_grid = 400;
  for (int i = 0; i < n_grid; ++i)
    grid.push_back(p.a_min * std::pow(p.a_max / p.a_min, static_cast<double>(i) / (n_grid - 1)));

  auto observables = [&](double am) {
    auto curve = matched_curve(am);
    std::vector<double> obs = {curve(p.a_max)};
    if (oracle_h) {
      double num = 0.0, den = 0.0;
      for (double a : grid) {
        const double diff = curve(a) - oracle_h(a);
        num += diff * diff;
        den += oracle_h(a) * oracle_h(a);
      }
      obs.push_back(std::sqrt(num / den));
    }
    return obs;
  };

  InflationMatch out;
  out.result = detail_match::sweep_band(a_m, names, observables);
  auto [ca, cb] = solve_at(a_m);
  out.c2_minus = ca;
  out.c2_plus = cb;
  out.curve = matched_curve(a_m);
  return out;
}

// ---------------------------------------------------------------------------
// Tunneling: C1 matching at x = -d/2
// ---------------------------------------------------------------------------

// Matches the left plane-wave form to the transmitted-side solution (the
// exact solution continued from the unit transmitted far-field condition)
// at x_left: A e^{ikx} + B e^{-ikx} with (psi, psi') continuity. The right
// interface needs no solve: the continued solution equals the transmitted
// plane wave at x_max identically.
struct TunnelingMatch {
  MatchResult result;
  ScatteringSummary central;
  std::complex<double> a_left, b_left;
};

inline TunnelingMatch match_c1_tunneling(double x_left, const TunnelingParams& p,
                                         const TunnelingOracle& oracle) {
  auto observables = [&](double xl) {
    auto [a, b] = plane_wave_amplitudes(oracle.psi(xl), oracle.dpsi(xl), xl, p.k);
    return std::vector<double>{std::norm(b / a), 1.0 / std::norm(a)};
  };
  TunnelingMatch out;
  out.result = detail_match::sweep_band(x_left, {"R2", "T2"}, observables);
  auto [a, b] = plane_wave_amplitudes(oracle.psi(x_left), oracle.dpsi(x_left), x_left, p.k);
  out.a_left = a;
  out.b_left = b;
  out.central.r2 = std::norm(b / a);
  out.central.t2 = 1.0 / std::norm(a);
  return out;
}

}  // namespace gluenn
