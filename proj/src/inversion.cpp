#include "roughlsm/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/SVD>

#include "roughlsm/errors.hpp"

namespace roughlsm {

TikhonovSolver::TikhonovSolver(const MatrixXcd& matrix) : rows_(matrix.rows()) {
  if (matrix.size() == 0) throw DomainError("Tikhonov solver: empty matrix");
  if (!matrix.allFinite()) throw NumericalError("Tikhonov solver: matrix has non-finite entries");
  Eigen::BDCSVD<MatrixXcd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("Tikhonov solver: singular value decomposition failed");
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  sigma_ = svd.singularValues();
}

VectorXd TikhonovSolver::filter(double alpha) const {
  if (!(alpha > 0)) throw DomainError("Tikhonov solver: alpha must be positive");
  return sigma_.array() / (alpha + sigma_.array().square());
}

VectorXcd TikhonovSolver::solve(const VectorXcd& rhs, double alpha) const {
  if (rhs.size() != rows_) throw DomainError("Tikhonov solver: rhs length does not match the matrix");
  const VectorXcd coeff = filter(alpha).cwiseProduct(u_.adjoint() * rhs);
  return v_ * coeff;
}

VectorXd TikhonovSolver::solution_norms(const MatrixXcd& rhs, double alpha) const {
  if (rhs.rows() != rows_) throw DomainError("Tikhonov solver: rhs length does not match the matrix");
  const MatrixXcd coeff = filter(alpha).asDiagonal() * (u_.adjoint() * rhs);
  return coeff.colwise().norm().transpose();
}

VectorXcd svd_filter_solve(const NearFieldMatrix& matrix, const VectorXcd& rhs, const TikhonovConfig& cfg) {
  return TikhonovSolver(matrix.entries).solve(rhs, cfg.alpha);
}

MatrixXcd test_rhs_matrix(const Medium& medium, const MeasurementLine& line, std::span<const Point> points,
                          Variant variant, const HalfDiskReference* reference) {
  const std::vector<Point> receivers = line.points();
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!(points[k].y() < line.height())) {
      throw DomainError("test point " + std::to_string(k) + " is not below the measurement line");
    }
  }
  if (variant == Variant::modified) {
    if (!reference) throw DomainError("modified test function needs the half-disk reference");
    return reference->total(receivers, points);
  }
  MatrixXcd out(static_cast<Eigen::Index>(receivers.size()), static_cast<Eigen::Index>(points.size()));
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    for (Eigen::Index p = 0; p < out.rows(); ++p) {
      out(p, k) = phi(medium.kappa1(), receivers[static_cast<std::size_t>(p)], points[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

VectorXcd test_rhs(const Medium& medium, const MeasurementLine& line, const Point& z, Variant variant,
                   const HalfDiskReference* reference) {
  return test_rhs_matrix(medium, line, std::span<const Point>(&z, 1), variant, reference).col(0);
}

IndicatorField indicator_map(const NearFieldMatrix& matrix, const SamplingGrid& grid, const TikhonovConfig& cfg,
                             Variant variant) {
  if (matrix.variant != variant) {
    throw DomainError(std::string("indicator: data variant '") + to_string(matrix.variant) +
                      "' does not match requested variant '" + to_string(variant) + "'");
  }
  std::optional<HalfDiskReference> reference;
  if (variant == Variant::modified) {
    reference.emplace(matrix.medium, HalfDiskInterface{matrix.gr_radius}, matrix.cell_width);
  }

  const TikhonovSolver solver(matrix.entries);
  const std::vector<Point> points = grid.points();
  const MatrixXcd rhs =
      test_rhs_matrix(matrix.medium, matrix.line, points, variant, reference ? &*reference : nullptr);
  const VectorXd norms = solver.solution_norms(rhs, cfg.alpha);

  IndicatorField field{grid, VectorXd(norms.size()), norms, cfg.alpha, variant};
  for (Eigen::Index k = 0; k < norms.size(); ++k) {
    if (!(norms(k) > 0) || !std::isfinite(norms(k))) {
      throw NumericalError("indicator: density norm is zero or non-finite at grid point " + std::to_string(k));
    }
    field.values(k) = 1.0 / norms(k);
  }
  field.values /= field.values.maxCoeff();
  return field;
}

bool InterfaceEstimate::empty() const {
  return std::none_of(columns.begin(), columns.end(), [](const ColumnEstimate& c) { return c.envelope.has_value(); });
}

std::vector<double> InterfaceEstimate::active_columns() const {
  std::vector<double> out;
  for (const ColumnEstimate& c : columns) {
    if (c.envelope) out.push_back(c.x1);
  }
  return out;
}

InterfaceEstimate extract_interface(const IndicatorField& field, double cutoff) {
  if (!(cutoff > 0) || !(cutoff <= 1)) throw DomainError("cutoff must lie in (0, 1]");
  const SamplingGrid& g = field.grid;
  InterfaceEstimate out;
  out.cutoff = cutoff;
  for (int i = 0; i < g.nx(); ++i) {
    ColumnEstimate col;
    col.x1 = g.x(i);
    for (int j = 0; j < g.ny(); ++j) {
      if (field.at(i, j) >= cutoff) col.kept.push_back(g.y(j));
    }
    if (!col.kept.empty()) col.envelope = col.kept.back();
    out.columns.push_back(std::move(col));
  }
  if (out.empty()) std::cerr << "warning: no grid point reaches the cutoff " << cutoff << "\n";
  return out;
}

double distance_to_perturbation_boundary(const InterfaceProfile& profile, const Point& z) {
  double best = std::fabs(z.y());
  // Beyond |x1 - z1| = best the graph cannot be closer.
  const double step = 1e-3;
  const double lo = std::max(z.x() - best, -profile.support_radius());
  const double hi = std::min(z.x() + best, profile.support_radius());
  for (double x = lo; x <= hi; x += step) {
    best = std::min(best, std::hypot(z.x() - x, z.y() - profile.evaluate(x)));
  }
  return best;
}

SeparationMetric separation_metric(const IndicatorField& field, const InterfaceProfile& profile, double margin) {
  constexpr double kSlack = 1e-9;
  SeparationMetric m;
  double inside = 0.0;
  double outside = 0.0;
  for (int k = 0; k < field.grid.size(); ++k) {
    const Point z = field.grid.point(k);
    const double f = profile.evaluate(z.x());
    const bool in_d = (f < z.y() && z.y() < 0.0) || (0.0 < z.y() && z.y() < f);
    if (in_d && distance_to_perturbation_boundary(profile, z) >= margin - kSlack) {
      inside += field.values(k);
      ++m.inside_count;
    } else if (z.y() > f + margin + kSlack) {
      outside += field.values(k);
      ++m.outside_count;
    }
  }
  if (m.inside_count == 0 || m.outside_count == 0) {
    m.ratio = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.inside_mean = inside / static_cast<double>(m.inside_count);
  m.outside_mean = outside / static_cast<double>(m.outside_count);
  m.ratio = m.inside_mean / m.outside_mean;
  return m;
}

}  // namespace roughlsm
