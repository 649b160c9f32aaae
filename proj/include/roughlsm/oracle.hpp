#pragma once

// Finite-difference reference solver for the transmission problem, used to
// cross-check the integral-equation data.
//
// Five-point Helmholtz stencil on a uniform grid, complex coordinate
// stretching s = 1 + i sigma(d) / kappa1 with sigma = sigma_max (d / L)^2 in
// an absorbing frame of width L around the box, zero Dirichlet data outside.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "roughlsm/geometry.hpp"
#include "roughlsm/specfun.hpp"

namespace roughlsm {

struct FDFDConfig {
  // Physical box; the absorbing frame lies outside it.
  double x_min = -16.0;
  double x_max = 16.0;
  double y_min = -3.0;
  double y_max = 2.5;
  double grid_step = 0.05;
  double pml_thickness = 4.0;
  double pml_strength = 8.0;  // sigma_max

  /// Box covering [-M - 2 lambda1, M + 2 lambda1] and all given points with
  /// a one-wavelength margin, grid step lambda2 / steps_per_wavelength.
  static FDFDConfig for_problem(const InterfaceProfile& profile, const Medium& medium,
                                std::span<const Point> points, double steps_per_wavelength = 20.0);
};

/// Throws DomainError when the configuration breaks the resolution, absorbing
/// layer or box-extent requirements for this profile and medium.
void validate(const FDFDConfig& cfg, const InterfaceProfile& profile, const Medium& medium);

/// u - Phi_kappa1(., source) at the receivers, from the finite-difference total field.
Eigen::VectorXcd fdfd_scattered(const InterfaceProfile& profile, const Medium& medium, const FDFDConfig& cfg,
                                const Point& source, std::span<const Point> receivers);

}  // namespace roughlsm
