#pragma once

#include <cmath>
#include <complex>

namespace gluenn {

// Half-integer Bessel/Hankel functions in elementary closed form, used for
// oracle initial conditions and the classical matching baselines.

inline double bessel_j_half(double z) {  // J_{1/2}
  return std::sqrt(2.0 / (M_PI * z)) * std::sin(z);
}

inline double bessel_j_mhalf(double z) {  // J_{-1/2}
  return std::sqrt(2.0 / (M_PI * z)) * std::cos(z);
}

inline double bessel_j_3half(double z) {  // J_{3/2}
  return std::sqrt(2.0 / (M_PI * z)) * (std::sin(z) / z - std::cos(z));
}

inline double bessel_y_3half(double z) {  // Y_{3/2}
  return -std::sqrt(2.0 / (M_PI * z)) * (std::cos(z) / z + std::sin(z));
}

inline std::complex<double> hankel1_half(double z) {  // H^(1)_{1/2}
  return std::sqrt(2.0 / (M_PI * z)) *
         std::complex<double>(std::sin(z), -std::cos(z));
}

inline std::complex<double> hankel1_3half(double z) {  // H^(1)_{3/2}
  return {bessel_j_3half(z), bessel_y_3half(z)};
}

// dB_nu/dz via the recurrence B'_nu = B_{nu-1} - (nu/z) B_nu.
inline std::complex<double> hankel1_3half_prime(double z) {
  return hankel1_half(z) - 1.5 / z * hankel1_3half(z);
}

inline double bessel_j_half_prime(double z) {
  return bessel_j_mhalf(z) - 0.5 / z * bessel_j_half(z);
}

inline double bessel_j_mhalf_prime(double z) {  // B'_nu = -B_{nu+1} + (nu/z) B_nu
  return -bessel_j_half(z) - 0.5 / z * bessel_j_mhalf(z);
}

}  // namespace gluenn
