#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "eqres/error.hpp"

namespace eqres {

namespace detail {

// B_{2j} for j = 1..15
inline constexpr std::array<double, 15> bernoulli_even = {
    1.0 / 6,         -1.0 / 30,     1.0 / 42,        -1.0 / 30,         5.0 / 66,
    -691.0 / 2730,   7.0 / 6,       -3617.0 / 510,   43867.0 / 798,     -174611.0 / 330,
    854513.0 / 138,  -236364091.0 / 2730, 8553103.0 / 6, -23749461029.0 / 870, 8615841276005.0 / 14322};

}  // namespace detail

/// Hurwitz zeta sum_{k>=0} (q+k)^{-s} for q > 0, continued to s != 1 by Euler-Maclaurin.
inline std::complex<double> hurwitz_zeta(std::complex<double> s, double q) {
  using C = std::complex<double>;
  require(q > 0, ErrorKind::invalid_parameter, "hurwitz_zeta needs q > 0");
  require(std::abs(s - C(1)) > 1e-14, ErrorKind::invalid_parameter, "hurwitz_zeta has a pole at s = 1");
  const double shift_to = 25.0 + std::abs(s);
  const int n = q >= shift_to ? 0 : static_cast<int>(std::ceil(shift_to - q));
  C acc = 0;
  for (int k = 0; k < n; ++k) acc += std::pow(q + k, -s);
  const double a = q + n;
  acc += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * a^{-s-2j+1}
  C rising = s;
  double fact = 2.0;
  C pw = std::pow(a, -s - 1.0);
  for (std::size_t j = 1; j <= detail::bernoulli_even.size(); ++j) {
    const C term = detail::bernoulli_even[j - 1] / fact * rising * pw;
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    const double k = 2.0 * double(j);
    rising *= (s + k - 1.0) * (s + k);
    fact *= (k + 1.0) * (k + 2.0);
    pw /= a * a;
  }
  return acc;
}

/// Gamma function for complex arguments (Lanczos, g = 7), with reflection for Re z < 1/2.
inline std::complex<double> gamma(std::complex<double> z) {
  using C = std::complex<double>;
  static constexpr std::array<double, 9> c = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double pi = 3.14159265358979323846;
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma(1.0 - z));
  z -= 1.0;
  C x = c[0];
  for (int i = 1; i < 9; ++i) x += c[static_cast<std::size_t>(i)] / (z + double(i));
  const C t = z + 7.5;
  return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

/// Digamma function for real q > 0.
inline double digamma(double q) {
  require(q > 0, ErrorKind::invalid_parameter, "digamma needs q > 0");
  double acc = 0;
  while (q < 12) acc -= 1 / q++;
  const double r = 1 / (q * q);
  return acc + std::log(q) - 0.5 / q - r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r / 132))));
}

/// Finite part of P^{-s} zeta(s, q) at s = 1, where the Hurwitz pole is dropped.
/// Used where poles cancel across residue classes.
inline std::complex<double> scaled_hurwitz(std::complex<double> s, double q, double P) {
  if (std::abs(s - 1.0) < 1e-12) return (-std::log(P) - digamma(q)) / P;
  return std::pow(P, -s) * hurwitz_zeta(s, q);
}

inline std::complex<double> riemann_zeta(std::complex<double> s) { return hurwitz_zeta(s, 1.0); }

}  // namespace eqres
