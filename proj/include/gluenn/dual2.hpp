#pragma once

#include <cmath>

namespace gluenn::ad {

// Second-order truncated-Taylor ("hyper-dual") scalar: carries the value
// and the first/second derivatives with respect to one scalar input.
// S is the underlying scalar (double, or Var for taped evaluation), so
// the same arithmetic serves plain evaluation and parameter-gradient
// recording.
template <class S>
struct Dual2 {
  S v{};
  S d1{};
  S d2{};

  Dual2() = default;
  Dual2(S value, S first, S second) : v(value), d1(first), d2(second) {}

  // Constant lift: no input dependence.
  static Dual2 constant(S value) { return Dual2(value, S(0.0), S(0.0)); }
  // Input seed: d/dx x = 1.
  static Dual2 input(S value) { return Dual2(value, S(1.0), S(0.0)); }
  // Seed through a transform u(x): components are (u, u', u'').
  static Dual2 seeded(S value, S first, S second) { return Dual2(value, first, second); }
};

template <class S>
Dual2<S> operator+(const Dual2<S>& a, const Dual2<S>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

template <class S>
Dual2<S> operator-(const Dual2<S>& a, const Dual2<S>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

template <class S>
Dual2<S> operator-(const Dual2<S>& a) {
  return {-a.v, -a.d1, -a.d2};
}

template <class S>
Dual2<S> operator*(const Dual2<S>& a, const Dual2<S>& b) {
  return {a.v * b.v,
          a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + S(2.0) * a.d1 * b.d1 + a.v * b.d2};
}

template <class S>
Dual2<S> operator/(const Dual2<S>& a, const Dual2<S>& b) {
  const S q = a.v / b.v;
  const S q1 = (a.d1 - q * b.d1) / b.v;
  const S q2 = (a.d2 - S(2.0) * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

// Constant-in-x scalar times a dual: cheap lift, three products.
template <class S>
Dual2<S> operator*(const S& c, const Dual2<S>& a) {
  return {c * a.v, c * a.d1, c * a.d2};
}

template <class S>
Dual2<S> operator+(const S& c, const Dual2<S>& a) {
  return {c + a.v, a.d1, a.d2};
}

// `double` coefficients on a Dual2<Var> (common in ansatz assembly).
template <class S>
Dual2<S> scale(double c, const Dual2<S>& a) {
  return {S(c) * a.v, S(c) * a.d1, S(c) * a.d2};
}

namespace detail {
// Chain rule through a univariate primitive with precomputed f, f', f''.
template <class S>
Dual2<S> chain(const Dual2<S>& u, S f, S df, S d2f) {
  return {f, df * u.d1, d2f * u.d1 * u.d1 + df * u.d2};
}
}  // namespace detail

template <class S>
Dual2<S> exp(const Dual2<S>& u) {
  using std::exp;
  const S e = exp(u.v);
  return detail::chain(u, e, e, e);
}

template <class S>
Dual2<S> log(const Dual2<S>& u) {
  using std::log;
  const S inv = S(1.0) / u.v;
  return detail::chain(u, log(u.v), inv, -inv * inv);
}

template <class S>
Dual2<S> sin(const Dual2<S>& u) {
  using std::cos;
  using std::sin;
  const S s = sin(u.v);
  const S c = cos(u.v);
  return detail::chain(u, s, c, -s);
}

template <class S>
Dual2<S> cos(const Dual2<S>& u) {
  using std::cos;
  using std::sin;
  const S c = cos(u.v);
  const S s = sin(u.v);
  return detail::chain(u, c, -s, -c);
}

template <class S>
Dual2<S> tanh(const Dual2<S>& u) {
  using std::tanh;
  const S t = tanh(u.v);
  const S sech2 = S(1.0) - t * t;
  return detail::chain(u, t, sech2, S(-2.0) * t * sech2);
}

template <class S>
Dual2<S> pow(const Dual2<S>& u, double p) {
  using std::pow;
  const S f = pow(u.v, p);
  const S df = S(p) * pow(u.v, p - 1.0);
  const S d2f = S(p * (p - 1.0)) * pow(u.v, p - 2.0);
  return detail::chain(u, f, df, d2f);
}

}  // namespace gluenn::ad
