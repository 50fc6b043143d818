#pragma once

#include <complex>

#include "gluenn/oracles.hpp"

namespace gluenn {

// Oscillatory-coefficient values of one side of the domain: cos/sin
// coefficients from the real-part net and the imaginary-part net.
struct OscCoeffs {
  double re_cos = 0.0;  // c1^(1) (or c3^(1) for the imaginary net)
  double re_sin = 0.0;  // c1^(2)
  double im_cos = 0.0;  // c3^(1)
  double im_sin = 0.0;  // c3^(2)
};

// psi_osc = (re_cos + i im_cos) cos kx + (re_sin + i im_sin) sin kx
//         = A e^{ikx} + B e^{-ikx}
// with A = (C_c - i C_s)/2, B = (C_c + i C_s)/2.
inline std::pair<std::complex<double>, std::complex<double>> amplitudes_from_coeffs(
    const OscCoeffs& c) {
  const std::complex<double> cc(c.re_cos, c.im_cos);
  const std::complex<double> cs(c.re_sin, c.im_sin);
  const std::complex<double> i(0.0, 1.0);
  return {0.5 * (cc - i * cs), 0.5 * (cc + i * cs)};
}

// Inverse map, for the round-trip property test.
inline OscCoeffs coeffs_from_amplitudes(const std::complex<double>& a,
                                        const std::complex<double>& b) {
  const std::complex<double> cc = a + b;
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> cs = i * (a - b);
  return {cc.real(), cs.real(), cc.imag(), cs.imag()};
}

// Physical observables from trained coefficient functions evaluated in the
// two far fields. The right side must be an almost pure outgoing wave; 1%
// incoming contamination means training failed the transmitted condition.
inline ScatteringSummary extract_scattering(const OscCoeffs& left, const OscCoeffs& right) {
  auto [a_left, b_left] = amplitudes_from_coeffs(left);
  auto [a_right, b_right] = amplitudes_from_coeffs(right);
  const double contamination = std::norm(b_right / a_right);
  if (!(contamination < 0.01))
    throw Error("extract_scattering: right side incoming contamination " + fmt17(contamination) +
                " >= 0.01 (outgoing condition not met)");
  ScatteringSummary s;
  s.r2 = std::norm(b_left / a_left);
  s.t2 = std::norm(a_right / a_left);
  return s;
}

}  // namespace gluenn
