#pragma once

#include <complex>
#include <vector>

#include "gluenn/bessel.hpp"
#include "gluenn/ode.hpp"
#include "gluenn/problems.hpp"

namespace gluenn {

// Far-field flux ratios. For the oracle (real potential, full domain)
// R2 + T2 = 1 to integrator accuracy.
struct ScatteringSummary {
  double r2 = 0.0;
  double t2 = 0.0;
};

// ---------------------------------------------------------------------------
// Chemical freeze-out
// ---------------------------------------------------------------------------

// Integrates the full yield equation in stiff mode from equilibrium at
// x_min; the equilibrium attractor erases initial-condition sensitivity.
inline OracleSolution oracle_chemical(const ChemicalParams& p, double rel_tol = 1e-10,
                                      double abs_tol = 1e-14) {
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.mode = OdeMode::implicit_trapezoidal;
  opt.max_step = 0.25;
  auto rhs = [p](double x, std::span<const double> y, std::span<double> dy) {
    const double yeq = equilibrium_yield(x);
    dy[0] = -p.eta / (x * x) * (y[0] * y[0] - yeq * yeq);
  };
  return integrate_ode(rhs, {equilibrium_yield(p.x_min)}, p.x_min, p.x_max, opt);
}

// ---------------------------------------------------------------------------
// Inflationary vector production
// ---------------------------------------------------------------------------

// Complex mode trajectory stored as (Re X, Re X', Im X, Im X'); h(a) is the
// amplitude |X(a)| in the gauge h(a_min) = 1.
struct InflationOracle {
  OracleSolution sol;
  double norm = 1.0;  // |X(a0)| before rescaling

  double h(double a) const {
    auto u = sol.eval(a);
    return std::hypot(u[0], u[2]) / norm;
  }
};

inline InflationOracle oracle_inflation(const InflationParams& p, double rel_tol = 1e-10,
                                        double abs_tol = 1e-12) {
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.max_step = 2.0;
  auto rhs = [p](double a, std::span<const double> u, std::span<double> du) {
    const double b = inflation_brace(a, p);
    du[0] = u[1];
    du[1] = -2.0 / a * u[1] - b * u[0];
    du[2] = u[3];
    du[3] = -2.0 / a * u[3] - b * u[2];
  };
  const double a0 = p.a_min;
  const double z0 = p.k / (a0 * p.hubble);
  const std::complex<double> x0 = hankel1_3half(z0);
  // dX/da = H'(z) dz/da with dz/da = -z/a; single-branch vacuum condition
  const std::complex<double> dx0 = hankel1_3half_prime(z0) * (-z0 / a0);
  InflationOracle oracle;
  oracle.sol = integrate_ode(rhs, {x0.real(), dx0.real(), x0.imag(), dx0.imag()}, p.a_min,
                             p.a_max, opt);
  oracle.norm = std::abs(x0);
  return oracle;
}

// ---------------------------------------------------------------------------
// Quantum tunneling
// ---------------------------------------------------------------------------

// Complex wavefunction as (Re psi, Re psi', Im psi, Im psi'), integrated
// backward from a unit transmitted plane wave at x_max.
struct TunnelingOracle {
  OracleSolution sol;
  ScatteringSummary scattering;

  std::complex<double> psi(double x) const {
    auto u = sol.eval(x);
    return {u[0], u[2]};
  }
  std::complex<double> dpsi(double x) const {
    auto u = sol.eval(x);
    return {u[1], u[3]};
  }
};

// Decomposes (psi, psi') at x into A e^{ikx} + B e^{-ikx}.
inline std::pair<std::complex<double>, std::complex<double>> plane_wave_amplitudes(
    const std::complex<double>& psi, const std::complex<double>& dpsi, double x, double k) {
  const std::complex<double> ik(0.0, k);
  const std::complex<double> a = 0.5 * (psi + dpsi / ik) * std::exp(-ik * x);
  const std::complex<double> b = 0.5 * (psi - dpsi / ik) * std::exp(ik * x);
  return {a, b};
}

inline TunnelingOracle oracle_tunneling(const TunnelingParams& p, double rel_tol = 1e-10,
                                        double abs_tol = 1e-12) {
  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  opt.max_step = 0.2;
  auto rhs = [p](double x, std::span<const double> u, std::span<double> du) {
    const double f = 2.0 * p.mass / (p.hbar * p.hbar) * (barrier_potential(x, p) - p.energy());
    du[0] = u[1];
    du[1] = f * u[0];
    du[2] = u[3];
    du[3] = f * u[2];
  };
  const std::complex<double> ik(0.0, p.k);
  const std::complex<double> psi_end = std::exp(ik * p.x_max);
  const std::complex<double> dpsi_end = ik * psi_end;
  TunnelingOracle oracle;
  oracle.sol = integrate_ode(rhs, {psi_end.real(), dpsi_end.real(), psi_end.imag(), dpsi_end.imag()},
                             p.x_max, p.x_min, opt);
  auto [a, b] = plane_wave_amplitudes(oracle.psi(p.x_min), oracle.dpsi(p.x_min), p.x_min, p.k);
  oracle.scattering.r2 = std::norm(b / a);
  oracle.scattering.t2 = 1.0 / std::norm(a);
  return oracle;
}

}  // namespace gluenn
