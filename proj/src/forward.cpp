#include "roughlsm/forward.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "roughlsm/errors.hpp"

namespace roughlsm {

const char* to_string(Variant v) { return v == Variant::raw ? "raw" : "modified"; }

Variant variant_from_string(std::string_view name) {
  if (name == "raw") return Variant::raw;
  if (name == "modified") return Variant::modified;
  throw DomainError("unknown data variant '" + std::string(name) + "' (expected raw or modified)");
}

double spectral_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

Complex self_cell_average(const Medium& medium, const Cell& cell) {
  const double radius = std::sqrt(cell.area / std::numbers::pi);
  return disk_integral_phi(medium.reference_kappa(cell.center.y()), radius) / cell.area;
}

namespace {

std::vector<Point> centers_of(const PerturbationMesh& mesh) {
  std::vector<Point> out;
  out.reserve(mesh.size());
  for (const Cell& c : mesh.cells) out.push_back(c.center);
  return out;
}

// G0 is continuous across x2 = 0; points on the plane are evaluated from above.
Point off_plane(Point p) {
  if (p.y() == 0.0) p.y() = std::numeric_limits<double>::min();
  return p;
}

bool same_points(std::span<const Point> a, std::span<const Point> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

LSSystem::LSSystem(const LayeredGreen& green, PerturbationMesh mesh)
    : green_(green), mesh_(std::move(mesh)), centers_(centers_of(mesh_)) {
  const auto n = static_cast<Eigen::Index>(mesh_.size());
  weights_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cell& c = mesh_.cells[static_cast<std::size_t>(i)];
    weights_(i) = c.contrast * c.area;
  }
  if (n == 0) return;

  const Medium& med = medium();
  MatrixXcd kernel = tabulate_kernel(green_, centers_, centers_, KernelKind::smooth, mesh_.cell_width);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Point& x = centers_[static_cast<std::size_t>(m)];
      const Point& y = centers_[static_cast<std::size_t>(j)];
      if (m == j) {
        kernel(m, j) += self_cell_average(med, mesh_.cells[static_cast<std::size_t>(m)]);
      } else if ((x.y() > 0) == (y.y() > 0)) {
        kernel(m, j) += phi_at_distance(med.reference_kappa(x.y()), (x - y).norm());
      }
    }
  }
  system_ = MatrixXcd::Identity(n, n) - kernel * weights_.asDiagonal();
  lu_.compute(system_);
  const double rc = lu_.rcond();
  if (!(rc > 1e-15) || !std::isfinite(rc)) {
    std::ostringstream msg;
    msg << "integral equation system is numerically singular (" << n << " cells, reciprocal condition "
        << rc << ")";
    throw NumericalError(msg.str());
  }
  condition_ = 1.0 / rc;
}

MatrixXcd LSSystem::solve(const MatrixXcd& rhs) const {
  if (size() == 0) return MatrixXcd(0, rhs.cols());
  return lu_.solve(rhs);
}

MatrixXcd LSSystem::solve_total_fields(std::span<const Point> sources) const {
  if (size() == 0) return MatrixXcd(0, static_cast<Eigen::Index>(sources.size()));
  return solve(tabulate_kernel(green_, sources, centers_, KernelKind::full));
}

VectorXcd LSSystem::solve_total_field(const Point& source) const {
  return solve_total_fields(std::span<const Point>(&source, 1)).col(0);
}

MatrixXcd LSSystem::scattered_fields(std::span<const Point> receivers, std::span<const Point> sources) const {
  for (const Point& y : sources) {
    if (!(y.y() > 0)) throw DomainError("scattered field: sources must lie above x2 = 0");
  }
  MatrixXcd out = tabulate_kernel(green_, sources, receivers, KernelKind::smooth);
  if (size() == 0) return out;

  const MatrixXcd to_receivers = tabulate_kernel(green_, centers_, receivers, KernelKind::full);
  MatrixXcd from_sources;
  if (same_points(receivers, sources)) {
    from_sources = to_receivers.transpose();
  } else {
    from_sources = tabulate_kernel(green_, sources, centers_, KernelKind::full);
  }
  out += to_receivers * weights_.asDiagonal() * solve(from_sources);
  return out;
}

Complex LSSystem::scattered_field(const Point& source, const Point& receiver) const {
  return scattered_fields(std::span<const Point>(&receiver, 1), std::span<const Point>(&source, 1))(0, 0);
}

MatrixXcd LSSystem::kernel_to_cells(std::span<const Point> points) const {
  std::vector<Point> shifted(points.begin(), points.end());
  for (Point& p : shifted) p = off_plane(p);
  MatrixXcd out(static_cast<Eigen::Index>(shifted.size()), static_cast<Eigen::Index>(size()));
  if (size() == 0) return out;

  const double h = mesh_.cell_width;
  const MatrixXcd smooth = tabulate_kernel(green_, centers_, shifted, KernelKind::smooth, h);
  const Medium& med = medium();
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    for (Eigen::Index n = 0; n < out.cols(); ++n) {
      const Point& z = shifted[static_cast<std::size_t>(k)];
      const Cell& cell = mesh_.cells[static_cast<std::size_t>(n)];
      Complex v = smooth(k, n);
      if ((z.y() > 0) == (cell.center.y() > 0)) {
        const Point d = z - cell.center;
        // Points inside a cell get the cell-averaged singularity.
        if (std::fabs(d.x()) < 0.5 * h && std::fabs(d.y()) < 0.5 * h) {
          v += self_cell_average(med, cell);
        } else {
          v += phi_at_distance(med.reference_kappa(cell.center.y()), d.norm());
        }
      }
      out(k, n) = v;
    }
  }
  return out;
}

LSSystem assemble_ls(const PerturbationMesh& mesh, const Medium& medium) {
  return LSSystem(LayeredGreen(medium), mesh);
}

HalfDiskReference::HalfDiskReference(const Medium& medium, HalfDiskInterface gr, double cell_width,
                                     std::size_t max_cells)
    : green_(medium), gr_(gr), cell_width_(cell_width) {
  if (!(gr.radius >= 0) || !std::isfinite(gr.radius)) throw DomainError("half-disk radius must be non-negative");
  if (!(cell_width > 0)) throw DomainError("half-disk reference: cell width must be positive");
  const std::size_t need = half_disk_cell_count(gr.radius, cell_width);
  if (need > max_cells) {
    double lo = 0.0;
    double hi = gr.radius;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (half_disk_cell_count(mid, cell_width) <= max_cells ? lo : hi) = mid;
    }
    std::ostringstream msg;
    msg << "half-disk reference with r = " << gr.radius << " needs " << need << " cells at h = " << cell_width
        << ", above the budget of " << max_cells << "; largest feasible radius is about " << lo;
    throw DomainError(msg.str());
  }
  PerturbationMesh mesh = build_half_disk_mesh(gr, medium, cell_width);
  if (!mesh.empty()) system_.emplace(green_, std::move(mesh));
}

void HalfDiskReference::require_above(const Point& p, const char* what) const {
  if (!(p.y() > gr_.height(p.x())) || !(p.y() > 0)) {
    throw DomainError(std::string("half-disk reference: ") + what + " must lie above the interface and x2 = 0");
  }
}

MatrixXcd HalfDiskReference::scattered(std::span<const Point> receivers, std::span<const Point> sources) const {
  for (const Point& p : receivers) require_above(p, "receiver");
  for (const Point& p : sources) require_above(p, "source");
  if (!system_) return tabulate_kernel(green_, sources, receivers, KernelKind::smooth);
  return system_->scattered_fields(receivers, sources);
}

Complex HalfDiskReference::scattered(const Point& receiver, const Point& source) const {
  return scattered(std::span<const Point>(&receiver, 1), std::span<const Point>(&source, 1))(0, 0);
}

MatrixXcd HalfDiskReference::total(std::span<const Point> receivers, std::span<const Point> points) const {
  for (const Point& p : receivers) require_above(p, "receiver");
  std::vector<Point> shifted(points.begin(), points.end());
  for (Point& p : shifted) p = off_plane(p);
  // G_r(x, z) = G_r(z, x): total field at z excited by a source at x.
  MatrixXcd out = tabulate_kernel(green_, shifted, receivers, KernelKind::full);
  if (!system_) return out;
  const MatrixXcd u = system_->solve_total_fields(receivers);
  const MatrixXcd to_points = system_->kernel_to_cells(shifted);
  out += (to_points * system_->weights().asDiagonal() * u).transpose();
  return out;
}

Complex gr_scattered(const Medium& medium, const HalfDiskInterface& gr, const Point& source,
                     const Point& receiver, double cell_width) {
  return HalfDiskReference(medium, gr, cell_width).scattered(receiver, source);
}

NearFieldMatrix synthesize(const InterfaceProfile& profile, const Medium& medium, const MeasurementLine& line,
                           Variant variant, std::optional<HalfDiskInterface> gr, double cell_width,
                           SynthesisReport* report) {
  if (!(line.height() > profile.max_value()) || !(line.height() > 0)) {
    std::ostringstream msg;
    msg << "measurement height b = " << line.height() << " must exceed the interface maximum "
        << profile.max_value();
    throw DomainError(msg.str());
  }
  if (variant == Variant::modified) {
    if (!gr) throw DomainError("modified data needs a half-disk radius");
    if (!(gr->radius > profile.support_radius())) {
      std::ostringstream msg;
      msg << "half-disk radius " << gr->radius << " must exceed the perturbation half-width "
          << profile.support_radius();
      throw DomainError(msg.str());
    }
  }

  const LayeredGreen green(medium);
  const std::vector<Point> points = line.points();
  LSSystem system(green, build_mesh(profile, medium, cell_width));

  NearFieldMatrix out{.entries = system.scattered_fields(points, points), .line = line, .medium = medium,
                      .variant = variant};
  out.profile_id = profile.id();
  out.cell_width = cell_width;

  SynthesisReport rep;
  rep.cells = system.size();
  rep.condition_estimate = system.condition_estimate();
  if (variant == Variant::modified) {
    HalfDiskReference reference(medium, *gr, cell_width);
    out.entries -= reference.scattered(points, points);
    out.gr_radius = gr->radius;
    rep.reference_cells = reference.cells();
  }
  if (report) *report = rep;
  return out;
}

NearFieldMatrix add_noise(const NearFieldMatrix& matrix, double delta, std::uint64_t seed) {
  if (!(delta >= 0) || !std::isfinite(delta)) throw DomainError("noise level must be non-negative");
  const MatrixXcd& e = matrix.entries;
  MatrixXcd zeta(e.rows(), e.cols());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index p = 0; p < e.rows(); ++p) {
    for (Eigen::Index q = 0; q < e.cols(); ++q) {
      const double re = normal(rng);
      const double im = normal(rng);
      zeta(p, q) = Complex(re, im);
    }
  }
  NearFieldMatrix out = matrix;
  out.noise_level = delta;
  out.seed = seed;
  const double zn = spectral_norm(zeta);
  if (delta > 0 && zn > 0) out.entries += (delta * spectral_norm(e) / zn) * zeta;
  return out;
}

}  // namespace roughlsm
