#pragma once

// Cylinder functions of order 0 and 1 for real positive arguments, and the
// free-space fundamental solution of the 2-D Helmholtz operator.
//
// Small arguments use the ascending series, evaluated in long double to
// absorb the cancellation between large alternating terms. Large arguments
// use the Hankel asymptotic expansion truncated at its smallest term.

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "roughlsm/errors.hpp"

namespace roughlsm {

using Complex = std::complex<double>;
using Point = Eigen::Vector2d;

namespace specfun_detail {

using Wide = long double;

// Below this argument the ascending series is used. Both branches agree to
// ~5e-12 relative here; the asymptotic branch improves quickly beyond it.
inline constexpr double kSeriesCrossover = 12.0;

struct BesselPair {
  Wide j;
  Wide y;
};

inline BesselPair series_order0(Wide x) {
  const Wide q = x * x / 4;
  const Wide gamma = 0.577215664901532860606512090082402431L;
  Wide term = 1;  // (-q)^k / (k!)^2
  Wide j0 = 1;
  Wide harmonic = 0;
  Wide ysum = 0;  // sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
  for (int k = 1; k < 200; ++k) {
    term *= -q / (Wide(k) * Wide(k));
    harmonic += Wide(1) / k;
    j0 += term;
    ysum -= harmonic * term;
    if (std::fabs(term) * (1 + harmonic) < 1e-22L * std::fabs(j0) + 1e-24L) break;
  }
  const Wide two_over_pi = 2 / std::numbers::pi_v<Wide>;
  const Wide y0 = two_over_pi * ((std::log(x / 2) + gamma) * j0 + ysum);
  return {j0, y0};
}

inline BesselPair series_order1(Wide x) {
  const Wide q = x * x / 4;
  const Wide gamma = 0.577215664901532860606512090082402431L;
  Wide term = x / 2;  // (-1)^k (x/2)^{2k+1} / (k!(k+1)!)
  Wide j1 = term;
  Wide psi_k1 = -gamma;     // psi(k+1)
  Wide psi_k2 = 1 - gamma;  // psi(k+2)
  Wide ysum = (psi_k1 + psi_k2) * term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (Wide(k) * Wide(k + 1));
    psi_k1 += Wide(1) / k;
    psi_k2 += Wide(1) / (k + 1);
    j1 += term;
    ysum += (psi_k1 + psi_k2) * term;
    if (std::fabs(term) * (1 + psi_k2) < 1e-22L * std::fabs(j1) + 1e-24L) break;
  }
  const Wide pi = std::numbers::pi_v<Wide>;
  const Wide y1 = -2 / (pi * x) + (2 / pi) * std::log(x / 2) * j1 - ysum / pi;
  return {j1, y1};
}

// H_nu^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_k i^k a_k(nu) / x^k
inline std::complex<Wide> asymptotic_hankel1(int nu, Wide x) {
  const Wide mu = 4 * Wide(nu) * nu;
  std::complex<Wide> sum = 1;
  std::complex<Wide> term = 1;
  const std::complex<Wide> i_over_x(0, 1 / x);
  Wide previous = std::numeric_limits<Wide>::infinity();
  for (int k = 1; k < 400; ++k) {
    const Wide odd = 2 * Wide(k) - 1;
    const std::complex<Wide> next = term * i_over_x * (mu - odd * odd) / (8 * Wide(k));
    const Wide mag = std::abs(next);
    if (mag >= previous) break;  // series starts diverging
    term = next;
    sum += term;
    previous = mag;
    if (mag < 1e-21L) break;
  }
  const Wide pi = std::numbers::pi_v<Wide>;
  const Wide phase = x - nu * pi / 2 - pi / 4;
  const Wide amp = std::sqrt(2 / (pi * x));
  return amp * std::complex<Wide>(std::cos(phase), std::sin(phase)) * sum;
}

template <std::floating_point Real>
void check_argument(Real x, const char* name) {
  if (!std::isfinite(x) || !(x > 0)) {
    throw DomainError(std::string(name) + ": argument must be finite and positive");
  }
}

}  // namespace specfun_detail

/// H_0^(1)(x) = J_0(x) + i Y_0(x) for x > 0.
template <std::floating_point Real>
std::complex<Real> hankel1_0(Real x) {
  using namespace specfun_detail;
  check_argument(x, "hankel1_0");
  const Wide xw = x;
  if (x < kSeriesCrossover) {
    const BesselPair p = series_order0(xw);
    return {static_cast<Real>(p.j), static_cast<Real>(p.y)};
  }
  const std::complex<Wide> h = asymptotic_hankel1(0, xw);
  return {static_cast<Real>(h.real()), static_cast<Real>(h.imag())};
}

/// H_1^(1)(x) = J_1(x) + i Y_1(x) for x > 0.
template <std::floating_point Real>
std::complex<Real> hankel1_1(Real x) {
  using namespace specfun_detail;
  check_argument(x, "hankel1_1");
  const Wide xw = x;
  if (x < kSeriesCrossover) {
    const BesselPair p = series_order1(xw);
    return {static_cast<Real>(p.j), static_cast<Real>(p.y)};
  }
  const std::complex<Wide> h = asymptotic_hankel1(1, xw);
  return {static_cast<Real>(h.real()), static_cast<Real>(h.imag())};
}

/// Phi_kappa evaluated at distance r: (i/4) H_0^(1)(kappa r).
inline Complex phi_at_distance(double kappa, double r) {
  if (r < 1e-14) throw DomainError("phi: coincident points");
  return Complex(0.0, 0.25) * hankel1_0(kappa * r);
}

/// Fundamental solution of Delta u + kappa^2 u = -delta_y in the plane.
inline Complex phi(double kappa, const Point& x, const Point& y) {
  if (!(kappa > 0)) throw DomainError("phi: kappa must be positive");
  return phi_at_distance(kappa, (x - y).norm());
}

/// Integral of Phi_kappa(c, .) over the disk of radius R centred at c:
/// (i pi R / (2 kappa)) H_1^(1)(kappa R) - 1/kappa^2.
inline Complex disk_integral_phi(double kappa, double radius) {
  const double pi = std::numbers::pi;
  return Complex(0.0, pi * radius / (2.0 * kappa)) * hankel1_1(kappa * radius) -
         1.0 / (kappa * kappa);
}

}  // namespace roughlsm
