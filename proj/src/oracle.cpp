#include "roughlsm/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "roughlsm/errors.hpp"

namespace roughlsm {

FDFDConfig FDFDConfig::for_problem(const InterfaceProfile& profile, const Medium& medium,
                                   std::span<const Point> points, double steps_per_wavelength) {
  const double lambda1 = medium.wavelength();
  double xr = profile.support_radius() + 2.0 * lambda1;
  double top = profile.max_value();
  double bottom = profile.min_value();
  for (const Point& p : points) {
    xr = std::max(xr, std::fabs(p.x()));
    top = std::max(top, p.y());
    bottom = std::min(bottom, p.y());
  }
  FDFDConfig cfg;
  cfg.grid_step = medium.wavelength2() / steps_per_wavelength;
  const double margin = lambda1;
  cfg.x_min = -(xr + margin);
  cfg.x_max = xr + margin;
  cfg.y_min = bottom - margin;
  cfg.y_max = top + margin;
  cfg.pml_thickness = 0.65 * lambda1;
  cfg.pml_strength = 8.0 * medium.kappa1();
  return cfg;
}

void validate(const FDFDConfig& cfg, const InterfaceProfile& profile, const Medium& medium) {
  std::ostringstream msg;
  if (!(cfg.grid_step > 0) || cfg.grid_step > medium.wavelength2() / 20.0 * (1.0 + 1e-12)) {
    msg << "FDFD grid step " << cfg.grid_step << " must be positive and at most lambda2/20 = "
        << medium.wavelength2() / 20.0;
  } else if (cfg.pml_thickness < medium.wavelength() / 2.0) {
    msg << "FDFD absorbing layer " << cfg.pml_thickness << " is thinner than lambda1/2 = "
        << medium.wavelength() / 2.0;
  } else if (!(cfg.pml_strength > 0)) {
    msg << "FDFD absorbing strength must be positive";
  } else {
    const double need = profile.support_radius() + 2.0 * medium.wavelength();
    if (cfg.x_min > -need || cfg.x_max < need) {
      msg << "FDFD box must contain |x1| <= " << need;
    } else if (!(cfg.y_min < profile.min_value()) || !(cfg.y_max > profile.max_value())) {
      msg << "FDFD box must contain the interface";
    }
  }
  if (!msg.str().empty()) throw DomainError(msg.str());
}

namespace {

struct Axis {
  double start;  // coordinate of node 0 (on the outer Dirichlet boundary)
  double step;
  int nodes;
  double lo, hi;  // physical box
  double layer;
  double strength;
  double kappa;

  double coord(double i) const { return start + i * step; }

  Complex stretch(double i) const {
    const double x = coord(i);
    const double d = std::max({lo - x, x - hi, 0.0});
    const double t = std::min(d / layer, 1.0);
    return {1.0, strength * t * t / kappa};
  }
};

// Nodes at anchor + k h covering [lo - layer, hi + layer].
Axis make_axis(double lo, double hi, double anchor, double h, const FDFDConfig& cfg, double kappa) {
  const double first = lo - cfg.pml_thickness;
  const double last = hi + cfg.pml_thickness;
  const double start = anchor - std::ceil((anchor - first) / h - 1e-9) * h;
  const int nodes = static_cast<int>(std::ceil((last - start) / h - 1e-9)) + 1;
  return {start, h, nodes, lo, hi, cfg.pml_thickness, cfg.pml_strength, kappa};
}

// Bilinear weights of the four nodes around p.
struct Stencil {
  std::array<int, 4> ix, iy;
  std::array<double, 4> w;
};

Stencil bilinear(const Axis& ax, const Axis& ay, const Point& p) {
  const double fx = (p.x() - ax.start) / ax.step;
  const double fy = (p.y() - ay.start) / ay.step;
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fy));
  const double tx = fx - i;
  const double ty = fy - j;
  return {{i, i + 1, i, i + 1},
          {j, j, j + 1, j + 1},
          {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty}};
}

bool inside_box(const FDFDConfig& cfg, const Point& p) {
  return p.x() >= cfg.x_min && p.x() <= cfg.x_max && p.y() >= cfg.y_min && p.y() <= cfg.y_max;
}

}  // namespace

Eigen::VectorXcd fdfd_scattered(const InterfaceProfile& profile, const Medium& medium, const FDFDConfig& cfg,
                                const Point& source, std::span<const Point> receivers) {
  validate(cfg, profile, medium);
  if (!inside_box(cfg, source)) throw DomainError("FDFD: source lies outside the box or in the absorbing layer");
  for (std::size_t k = 0; k < receivers.size(); ++k) {
    if (!inside_box(cfg, receivers[k])) {
      throw DomainError("FDFD: receiver " + std::to_string(k) + " lies outside the box or in the absorbing layer");
    }
  }

  // The grid passes through the source, and the step is shortened so that
  // x2 = 0 is a grid line as well.
  double h = cfg.grid_step;
  if (source.y() != 0.0) h = std::fabs(source.y()) / std::ceil(std::fabs(source.y()) / h - 1e-9);
  const Axis ax = make_axis(cfg.x_min, cfg.x_max, source.x(), h, cfg, medium.kappa1());
  const Axis ay = make_axis(cfg.y_min, cfg.y_max, source.y(), h, cfg, medium.kappa1());
  const int nx = ax.nodes - 2;  // interior unknowns; outer ring is Dirichlet
  const int ny = ay.nodes - 2;
  const auto index = [nx](int i, int j) { return (j - 1) * nx + (i - 1); };

  const double k1 = medium.kappa1() * medium.kappa1();
  const double k2 = medium.kappa2() * medium.kappa2();

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(nx) * ny * 5);
  for (int j = 1; j <= ny; ++j) {
    const Complex sy = ay.stretch(j);
    const Complex an = 1.0 / (sy * ay.stretch(j + 0.5) * h * h);
    const Complex as = 1.0 / (sy * ay.stretch(j - 0.5) * h * h);
    const double y = ay.coord(j);
    for (int i = 1; i <= nx; ++i) {
      const Complex sx = ax.stretch(i);
      const Complex ae = 1.0 / (sx * ax.stretch(i + 0.5) * h * h);
      const Complex aw = 1.0 / (sx * ax.stretch(i - 0.5) * h * h);
      // Fraction of the node's vertical extent lying above the interface.
      const double f = profile.evaluate(ax.coord(i));
      const double above = std::clamp((y + 0.5 * h - f) / h, 0.0, 1.0);
      const double kappa_sq = above * k1 + (1.0 - above) * k2;

      const int row = index(i, j);
      triplets.emplace_back(row, row, -(ae + aw + an + as) + kappa_sq);
      if (i > 1) triplets.emplace_back(row, index(i - 1, j), aw);
      if (i < nx) triplets.emplace_back(row, index(i + 1, j), ae);
      if (j > 1) triplets.emplace_back(row, index(i, j - 1), as);
      if (j < ny) triplets.emplace_back(row, index(i, j + 1), an);
    }
  }
  Eigen::SparseMatrix<Complex> a(nx * ny, nx * ny);
  a.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nx * ny);
  const Stencil src = bilinear(ax, ay, source);
  for (int k = 0; k < 4; ++k) rhs(index(src.ix[k], src.iy[k])) -= src.w[k] / (h * h);

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw NumericalError("FDFD: sparse factorization failed: " + lu.lastErrorMessage());
  const Eigen::VectorXcd u = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !u.allFinite()) throw NumericalError("FDFD: sparse solve failed");

  Eigen::VectorXcd out(static_cast<Eigen::Index>(receivers.size()));
  for (std::size_t r = 0; r < receivers.size(); ++r) {
    const Stencil st = bilinear(ax, ay, receivers[r]);
    Complex v = 0.0;
    for (int k = 0; k < 4; ++k) v += st.w[k] * u(index(st.ix[k], st.iy[k]));
    out(static_cast<Eigen::Index>(r)) = v - phi(medium.kappa1(), receivers[r], source);
  }
  return out;
}

}  // namespace roughlsm
