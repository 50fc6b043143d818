#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gluenn/common.hpp"
#include "gluenn/dual2.hpp"
#include "gluenn/network.hpp"

namespace gluenn {

// ---------------------------------------------------------------------------
// Physics parameter sets
// ---------------------------------------------------------------------------

struct ChemicalParams {
  double eta = 1e4;  // normalized interaction strength
  double x_min = 1.0;
  double x_max = 31.0;
};

struct InflationParams {
  double hubble = 150.0;
  double k = 2.0;
  double mass = 0.10;
  double a_star = 0.10;
  double a_min = 0.1;
  double a_max = 500.0;
};

struct TunnelingParams {
  double sigma = 0.5;  // edge width; barrier is wide compared to this
  double d = 10.0;
  double v0 = 4.1;
  double k = 2.0;
  double mass = 0.5;
  double hbar = 1.0;
  double epsilon_reg = 1.0;  // residual-normalizer regulator
  double x_min = -13.14;
  double x_max = 13.14;

  double energy() const { return hbar * hbar * k * k / (2.0 * mass); }
  double kappa() const { return std::sqrt(2.0 * mass * (v0 - energy())) / hbar; }
};

// ---------------------------------------------------------------------------
// Scalar physics
// ---------------------------------------------------------------------------

// Equilibrium yield 0.145 * x^{3/2} * e^{-x}.
inline double equilibrium_yield(double x) {
  if (!(x > 0.0)) throw Error("equilibrium_yield: x must be positive");
  return 0.145 * std::pow(x, 1.5) * std::exp(-x);
}

// dY/dx + eta x^{-2} (Y^2 - Y_eq^2), generic so it can be taped.
template <class S>
S freeze_out_residual(const S& y, const S& dy, double x, const ChemicalParams& p) {
  const double yeq = equilibrium_yield(x);
  return dy + S(p.eta / (x * x)) * (y * y - S(yeq * yeq));
}

// Numerically stable logistic; the branch avoids exp overflow for |t| > 30.
inline double logistic(double t) {
  if (t > 30.0) return 1.0 / (std::exp(-t) + 1.0);
  if (t < -30.0) {
    const double e = std::exp(t);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(-t) + 1.0);
}

// Flat-topped smooth barrier of height v0 and width d.
inline double barrier_potential(double x, const TunnelingParams& p) {
  return p.v0 * (logistic((x + p.d / 2.0) / p.sigma) + logistic(-(x - p.d / 2.0) / p.sigma) - 1.0);
}

// -(hbar^2/2m) psi'' + (V - E) psi for one real component.
template <class S>
S schrodinger_residual(const S& psi, const S& d2psi, double x, const TunnelingParams& p) {
  const double kinetic = -p.hbar * p.hbar / (2.0 * p.mass);
  return S(kinetic) * d2psi + S(barrier_potential(x, p) - p.energy()) * psi;
}

// Coefficient of X in the full mode equation (the brace term).
inline double inflation_brace(double a, const InflationParams& p) {
  const double h2 = p.hubble * p.hubble;
  const double k2 = p.k * p.k;
  const double m2 = p.mass * p.mass;
  const double a2 = a * a;
  const double denom = k2 + m2 * a2;
  return k2 / (h2 * a2 * a2) + m2 / (h2 * a2) - k2 / denom * (2.0 / a2 - 3.0 * m2 / denom);
}

// X'' + (2/a) X' + brace(a) X.
template <class S>
S vector_mode_residual(const S& x_val, const S& dx, const S& d2x, double a,
                       const InflationParams& p) {
  if (!(a > 0.0)) throw Error("vector_mode_residual: a must be positive");
  return d2x + S(2.0 / a) * dx + S(inflation_brace(a, p)) * x_val;
}

// ---------------------------------------------------------------------------
// Ansatz assembly
// ---------------------------------------------------------------------------

// Value of the global ansatz at a point, with per-term contributions.
// The stored y is the ordered sum of the stored terms, bit for bit.
template <class S>
struct AnsatzValueT {
  ad::Dual2<S> y;
  std::vector<std::string> term_labels;
  std::vector<ad::Dual2<S>> terms;
};

using AnsatzValue = AnsatzValueT<double>;

namespace detail {

template <class S>
AnsatzValueT<S> sum_terms(std::vector<std::string> labels, std::vector<ad::Dual2<S>> terms) {
  AnsatzValueT<S> out;
  out.y = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) out.y = out.y + terms[i];
  out.term_labels = std::move(labels);
  out.terms = std::move(terms);
  return out;
}

template <class S>
void check_term_finite(const ad::Dual2<S>& term, const char* what, double x) {
  if (!is_finite(ad::value_of(term.v)))
    throw AutodiffError(std::string("overflow in ") + what + " at x = " + fmt17(x));
}

}  // namespace detail

// y = e^{c1}(x) x^{3/2} e^{-x} + e^{c2}(x); positivity by construction.
template <class S>
AnsatzValueT<S> chemical_ansatz(const ad::Dual2<S>& c1, const ad::Dual2<S>& c2, double x) {
  if (!(x > 0.0)) throw Error("chemical_ansatz: x must be positive");
  using ad::Dual2;
  const Dual2<S> xd = Dual2<S>::seeded(S(x), S(1.0), S(0.0));
  const Dual2<S> basis = pow(xd, 1.5) * exp(-xd);
  Dual2<S> t1 = exp(c1) * basis;
  Dual2<S> t2 = exp(c2);
  detail::check_term_finite(t1, "chemical ansatz equilibrium term", x);
  detail::check_term_finite(t2, "chemical ansatz constant term", x);
  return detail::sum_terms<S>({"c1_1", "c2_1"}, {t1, t2});
}

// y = e^{c1}(a) a/a* + e^{c21}(a) + e^{c22}(a) a*/a.
template <class S>
AnsatzValueT<S> inflation_ansatz(const ad::Dual2<S>& c1, const ad::Dual2<S>& c21,
                                 const ad::Dual2<S>& c22, double a, const InflationParams& p) {
  if (!(a > 0.0)) throw Error("inflation_ansatz: a must be positive");
  using ad::Dual2;
  const Dual2<S> ad_ = Dual2<S>::seeded(S(a), S(1.0), S(0.0));
  const Dual2<S> growing = scale(1.0 / p.a_star, ad_);
  const Dual2<S> decaying = Dual2<S>::constant(S(p.a_star)) / ad_;
  Dual2<S> t1 = exp(c1) * growing;
  Dual2<S> t2 = exp(c21);
  Dual2<S> t3 = exp(c22) * decaying;
  detail::check_term_finite(t1, "inflation ansatz growing term", a);
  detail::check_term_finite(t2, "inflation ansatz constant term", a);
  detail::check_term_finite(t3, "inflation ansatz decaying term", a);
  return detail::sum_terms<S>({"c1_1", "c2_1", "c2_2"}, {t1, t2, t3});
}

// One component (real or imaginary) of the tunneling ansatz:
// c_osc1 cos(kx) + c_osc2 sin(kx) + c_exp1 e^{kappa x} + c_exp2 e^{-kappa x}.
// Coefficients are signed reals, not exponentiated.
template <class S>
AnsatzValueT<S> tunneling_ansatz(const ad::Dual2<S>& c_osc1, const ad::Dual2<S>& c_osc2,
                                 const ad::Dual2<S>& c_exp1, const ad::Dual2<S>& c_exp2,
                                 double x, const TunnelingParams& p,
                                 const std::vector<std::string>& labels) {
  using ad::Dual2;
  const Dual2<S> xd = Dual2<S>::seeded(S(x), S(1.0), S(0.0));
  const Dual2<S> kx = scale(p.k, xd);
  const Dual2<S> kapx = scale(p.kappa(), xd);
  Dual2<S> t1 = c_osc1 * cos(kx);
  Dual2<S> t2 = c_osc2 * sin(kx);
  Dual2<S> t3 = c_exp1 * exp(kapx);
  Dual2<S> t4 = c_exp2 * exp(-kapx);
  detail::check_term_finite(t3, "tunneling ansatz growing exponential", x);
  detail::check_term_finite(t4, "tunneling ansatz decaying exponential", x);
  return detail::sum_terms<S>(std::vector<std::string>(labels), {t1, t2, t3, t4});
}

}  // namespace gluenn
