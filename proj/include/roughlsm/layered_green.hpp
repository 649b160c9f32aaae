#pragma once

// Green's function of two homogeneous half-planes separated by x2 = 0,
// kappa1 above and kappa2 below, radiating in both half-planes.
//
// The non-singular part is a Sommerfeld-type spectral integral
//
//   (i / 4 pi) \int S(xi) e^{i xi dx} dxi,   beta_j = sqrt(kappa_j^2 - xi^2), Im beta_j >= 0,
//
// with S = R beta^{-1} e^{i beta H} for same-side pairs and the transmitted
// kernel 2/(beta1 + beta2) e^{i beta1 h_up + i beta2 h_down} for mixed pairs.
// S is even in xi, so the integral is folded onto t >= 0 and evaluated on
// the path xi(t) = t - i tau(t), where tau is a plateau bump that lifts the
// path below the branch points +kappa1, +kappa2.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "roughlsm/medium.hpp"
#include "roughlsm/specfun.hpp"

namespace roughlsm {

using Eigen::MatrixXcd;

struct SpectralOptions {
  /// Absolute accuracy target for each Green's function value.
  double tolerance = 1e-11;
  /// Quadrature nodes allowed per spectral integral.
  std::size_t max_nodes = std::size_t{1} << 14;
  /// Plateau height of the path deformation, relative to min(kappa1, kappa2).
  double deformation = 0.4;
};

/// Which half-plane a point on x2 = 0 is taken to belong to.
enum class Side { upper, lower };

class LayeredGreen {
 public:
  explicit LayeredGreen(Medium medium, SpectralOptions options = {});

  const Medium& medium() const { return medium_; }
  const SpectralOptions& options() const { return options_; }

  /// G0(x, y). Requires x != y and x2, y2 != 0.
  Complex g0(const Point& x, const Point& y) const;

  /// G0 with x on or near x2 = 0 assigned to the given side.
  Complex g0_one_sided(const Point& x, Side x_side, const Point& y) const;

  /// G0(x, y) - Phi_kappa1(x, y) for x above, G0(x, y) for x below.
  /// Requires y2 > 0; finite at x = y.
  Complex g0_scattered(const Point& x, const Point& y) const;

  /// G0 minus the free-space singularity of the local wavenumber for
  /// same-side pairs; G0 itself for mixed pairs.
  Complex smooth_part(const Point& x, const Point& y) const;

  /// Spectral integral for horizontal offset dx and signed heights.
  Complex smooth_part(double dx, double x2, Side x_side, double y2, Side y_side) const;

  /// Nodes used by the most expensive integral so far on this thread.
  static std::size_t last_node_count();

 private:
  enum class Pairing { upper_upper, lower_lower, mixed };

  Complex spectral_integral(Pairing pairing, double dx, double h_first, double h_second) const;

  Medium medium_;
  SpectralOptions options_;
};

Complex g0(const Medium& medium, const Point& x, const Point& y);
Complex g0_scattered(const Medium& medium, const Point& x, const Point& y);

enum class KernelKind {
  full,    // G0
  smooth,  // smooth_part, i.e. g0_scattered for sources above the plane
};

struct TabulationStats {
  std::size_t entries = 0;
  std::size_t spectral_evaluations = 0;  // distinct integrals actually computed
  bool cache_hit = false;
};

/// Matrix T(i, j) = G(targets[i], sources[j]). Spectral integrals are shared
/// between entries with equal (|dx1|, heights); horizontal offsets that are
/// integer multiples of `pitch` (within 1e-9) are snapped to that multiple.
MatrixXcd tabulate_kernel(const LayeredGreen& green, std::span<const Point> sources,
                          std::span<const Point> targets, KernelKind kind = KernelKind::full,
                          double pitch = 0.0, TabulationStats* stats = nullptr);

/// As tabulate_kernel, reading from and writing to a binary cache directory
/// keyed by a hash of the medium, options, kind, pitch and point coordinates.
MatrixXcd tabulate_kernel_cached(const LayeredGreen& green, std::span<const Point> sources,
                                 std::span<const Point> targets, KernelKind kind, double pitch,
                                 const std::filesystem::path& cache_dir,
                                 TabulationStats* stats = nullptr);

}  // namespace roughlsm
