#pragma once

#include <cmath>
#include <numbers>

#include "roughlsm/errors.hpp"

namespace roughlsm {

/// Two homogeneous half-planes: kappa1 above the interface, kappa2 below.
class Medium {
 public:
  Medium(double kappa1, double kappa2) : kappa1_(kappa1), kappa2_(kappa2) {
    if (!(kappa1 > 0) || !(kappa2 > 0) || !std::isfinite(kappa1) || !std::isfinite(kappa2)) {
      throw DomainError("Medium: wavenumbers must be finite and positive");
    }
  }

  double kappa1() const { return kappa1_; }
  double kappa2() const { return kappa2_; }

  /// Contrast eta = kappa1^2 - kappa2^2.
  double eta() const { return kappa1_ * kappa1_ - kappa2_ * kappa2_; }

  double wavelength() const { return 2.0 * std::numbers::pi / kappa1_; }
  double wavelength2() const { return 2.0 * std::numbers::pi / kappa2_; }

  /// Wavenumber of the flat-interface reference medium at height x2.
  double reference_kappa(double x2) const { return x2 > 0 ? kappa1_ : kappa2_; }

  double kappa_min() const { return std::fmin(kappa1_, kappa2_); }
  double kappa_max() const { return std::fmax(kappa1_, kappa2_); }

 private:
  double kappa1_;
  double kappa2_;
};

}  // namespace roughlsm
