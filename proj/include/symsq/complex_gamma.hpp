#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace symsq {

using cld = std::complex<long double>;

namespace detail {

// log sin(pi z), stable for large |Im z|.
inline cld log_sin_pi(cld z) {
  const long double pi = std::numbers::pi_v<long double>;
  long double y = z.imag();
  if (std::fabs(y) < 20) return std::log(std::sin(pi * z));
  // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i) for y > 0, mirrored for y < 0.
  cld i(0, 1);
  if (y > 0) return -i * pi * z + std::log(cld(1) - std::exp(2.0L * i * pi * z)) - std::log(-2.0L * i);
  return i * pi * z + std::log(cld(1) - std::exp(-2.0L * i * pi * z)) - std::log(2.0L * i);
}

}  // namespace detail

// log Gamma(z) up to a multiple of 2 pi i; exp() of it is Gamma(z).
inline cld complex_lgamma(cld z) {
  const long double pi = std::numbers::pi_v<long double>;
  if (z.real() < 0.5L) return std::log(pi) - detail::log_sin_pi(z) - complex_lgamma(cld(1) - z);
  cld shift = 0;
  while (std::abs(z) < 18) {
    shift -= std::log(z);
    z += 1.0L;
  }
  static const long double b[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730, 7.0L / 6,
                                  -3617.0L / 510};
  cld r = (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2 * pi);
  cld zp = z, z2 = z * z;
  for (int j = 1; j <= 8; ++j) {
    r += b[j - 1] / (static_cast<long double>(2 * j) * (2 * j - 1)) / zp;
    zp *= z2;
  }
  return r + shift;
}

}  // namespace symsq
