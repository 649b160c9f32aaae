#pragma once

// Scattering data for the locally perturbed interface.
//
// The total field solves the volume integral equation
//
//   u(x) - \int_D G0(x, z) c(z) u(z) dz = G0(x, y),   c = kappa^2 - kappa_ref^2,
//
// over the region D between the interface and the plane x2 = 0, with the
// flat-interface Green's function G0 as reference. Midpoint quadrature on
// square cells turns it into (I - K diag(c A)) u = G0(., y). Diagonal
// entries of K integrate the free-space singularity over the equal-area disk.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "roughlsm/geometry.hpp"
#include "roughlsm/layered_green.hpp"

namespace roughlsm {

using Eigen::VectorXcd;

enum class Variant { raw, modified };

const char* to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Dense N x N samples u^s(x_p, y_q) (raw) or u^s - G_r^s (modified) on a
/// measurement line, with sources and receivers on the same points.
struct NearFieldMatrix {
  MatrixXcd entries;
  MeasurementLine line;
  Medium medium;
  Variant variant = Variant::raw;
  double noise_level = 0.0;
  std::optional<std::uint64_t> seed{};
  std::string profile_id{};
  double cell_width = 0.0;
  double gr_radius = 0.0;  // half-disk radius for the modified variant, 0 otherwise
};

/// Factorized midpoint discretization of the volume integral equation.
class LSSystem {
 public:
  LSSystem(const LayeredGreen& green, PerturbationMesh mesh);

  const PerturbationMesh& mesh() const { return mesh_; }
  const LayeredGreen& green() const { return green_; }
  const Medium& medium() const { return green_.medium(); }
  std::size_t size() const { return mesh_.size(); }

  /// 1-norm condition estimate of the system matrix.
  double condition_estimate() const { return condition_; }
  const MatrixXcd& system_matrix() const { return system_; }
  /// contrast * area per cell.
  const VectorXcd& weights() const { return weights_; }

  MatrixXcd solve(const MatrixXcd& rhs) const;

  /// Total field at the cell centres for a point source.
  VectorXcd solve_total_field(const Point& source) const;
  MatrixXcd solve_total_fields(std::span<const Point> sources) const;

  /// u^s(receiver, source): total field minus Phi_kappa1 for receivers above.
  Complex scattered_field(const Point& source, const Point& receiver) const;
  /// Matrix (p, q) -> u^s(receivers[p], sources[q]).
  MatrixXcd scattered_fields(std::span<const Point> receivers, std::span<const Point> sources) const;

  /// G0(points[k], centre_n), with points inside a cell using the cell average.
  MatrixXcd kernel_to_cells(std::span<const Point> points) const;

 private:
  LayeredGreen green_;
  PerturbationMesh mesh_;
  std::vector<Point> centers_;
  VectorXcd weights_;
  MatrixXcd system_;
  Eigen::PartialPivLU<MatrixXcd> lu_;
  double condition_ = 1.0;
};

LSSystem assemble_ls(const PerturbationMesh& mesh, const Medium& medium);

/// Integral of the reference-medium singularity over a square cell, divided
/// by its area, using the equal-area disk.
Complex self_cell_average(const Medium& medium, const Cell& cell);

/// Green's function of the half-disk reference interface, by the same
/// integral equation with the half-disk filled with kappa1 (contrast +eta).
class HalfDiskReference {
 public:
  static constexpr std::size_t kDefaultMaxCells = 20000;

  HalfDiskReference(const Medium& medium, HalfDiskInterface gr, double cell_width,
                    std::size_t max_cells = kDefaultMaxCells);

  const HalfDiskInterface& interface() const { return gr_; }
  double cell_width() const { return cell_width_; }
  std::size_t cells() const { return system_ ? system_->size() : 0; }

  /// G_r^s(receiver, source) = G_r - Phi_kappa1; both points above Gamma_r.
  Complex scattered(const Point& receiver, const Point& source) const;
  MatrixXcd scattered(std::span<const Point> receivers, std::span<const Point> sources) const;

  /// G_r(receivers[p], points[k]) for receivers above Gamma_r, any other point.
  MatrixXcd total(std::span<const Point> receivers, std::span<const Point> points) const;

 private:
  void require_above(const Point& p, const char* what) const;

  LayeredGreen green_;
  HalfDiskInterface gr_;
  double cell_width_;
  std::optional<LSSystem> system_;
};

Complex gr_scattered(const Medium& medium, const HalfDiskInterface& gr, const Point& source,
                     const Point& receiver, double cell_width);

struct SynthesisReport {
  std::size_t cells = 0;
  std::size_t reference_cells = 0;
  double condition_estimate = 1.0;
};

/// Near-field matrix for every source/receiver pair on the line. One
/// factorization serves all N sources.
NearFieldMatrix synthesize(const InterfaceProfile& profile, const Medium& medium, const MeasurementLine& line,
                           Variant variant, std::optional<HalfDiskInterface> gr, double cell_width,
                           SynthesisReport* report = nullptr);

/// E + delta * (zeta / |zeta|_2) * |E|_2 with zeta = zeta1 + i zeta2, entries
/// i.i.d. N(0, 1) drawn row-major as (re, im) pairs from mt19937_64(seed).
NearFieldMatrix add_noise(const NearFieldMatrix& matrix, double delta, std::uint64_t seed);

/// Largest singular value.
double spectral_norm(const MatrixXcd& m);

}  // namespace roughlsm
