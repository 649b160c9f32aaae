#pragma once

// Linear sampling reconstruction. For each sampling point z the near-field
// equation E g = phi_z is solved by Tikhonov regularization through the SVD
// of E, and the indicator is 1 / |g_z|.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roughlsm/forward.hpp"

namespace roughlsm {

using Eigen::VectorXd;

struct TikhonovConfig {
  double alpha = 5e-5;
};

/// Singular system of a data matrix, computed once and reused for every rhs.
class TikhonovSolver {
 public:
  explicit TikhonovSolver(const MatrixXcd& matrix);

  const VectorXd& singular_values() const { return sigma_; }
  Eigen::Index size() const { return sigma_.size(); }

  /// sum_i sigma_i / (alpha + sigma_i^2) <u_i, rhs> v_i
  VectorXcd solve(const VectorXcd& rhs, double alpha) const;

  /// Column norms of the solutions for each column of rhs. V is unitary, so
  /// no multiplication by V is needed.
  VectorXd solution_norms(const MatrixXcd& rhs, double alpha) const;

 private:
  VectorXd filter(double alpha) const;

  MatrixXcd u_;
  MatrixXcd v_;
  VectorXd sigma_;
  Eigen::Index rows_;
};

VectorXcd svd_filter_solve(const NearFieldMatrix& matrix, const VectorXcd& rhs, const TikhonovConfig& cfg);

/// Right-hand side on the measurement line: Phi_kappa1(x_p, z) (raw) or
/// G_r(x_p, z) (modified, needs the half-disk reference).
VectorXcd test_rhs(const Medium& medium, const MeasurementLine& line, const Point& z, Variant variant,
                   const HalfDiskReference* reference = nullptr);

/// test_rhs for many points at once; column k belongs to points[k].
MatrixXcd test_rhs_matrix(const Medium& medium, const MeasurementLine& line, std::span<const Point> points,
                          Variant variant, const HalfDiskReference* reference = nullptr);

struct IndicatorField {
  SamplingGrid grid;
  VectorXd values;     // NInd, max exactly 1
  VectorXd raw_norms;  // |g_z|
  double alpha = 0.0;
  Variant variant = Variant::raw;

  double at(int i, int j) const { return values(j * grid.nx() + i); }
};

/// NInd over the grid. For modified data the half-disk reference is rebuilt
/// from the matrix metadata.
IndicatorField indicator_map(const NearFieldMatrix& matrix, const SamplingGrid& grid, const TikhonovConfig& cfg,
                             Variant variant);

struct ColumnEstimate {
  double x1 = 0.0;
  std::vector<double> kept;         // x2 with NInd >= C, ascending
  std::optional<double> envelope;   // max of kept
};

struct InterfaceEstimate {
  double cutoff = 0.5;
  std::vector<ColumnEstimate> columns;

  bool empty() const;
  /// Columns with at least one kept point.
  std::vector<double> active_columns() const;
};

/// Points with NInd >= cutoff, grouped per grid column.
InterfaceEstimate extract_interface(const IndicatorField& field, double cutoff = 0.5);

/// Distance from z to the boundary of the region between the profile and x2 = 0.
double distance_to_perturbation_boundary(const InterfaceProfile& profile, const Point& z);

struct SeparationMetric {
  double inside_mean = 0.0;
  double outside_mean = 0.0;
  std::size_t inside_count = 0;
  std::size_t outside_count = 0;
  /// inside_mean / outside_mean; NaN when either set is empty.
  double ratio = 0.0;
};

/// Mean NInd over grid points strictly inside the perturbation at distance
/// >= margin from its boundary, against points with x2 > f(x1) + margin.
SeparationMetric separation_metric(const IndicatorField& field, const InterfaceProfile& profile,
                                   double margin = 0.2);

}  // namespace roughlsm
