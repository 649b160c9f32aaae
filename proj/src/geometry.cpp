#include "roughlsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace roughlsm {

double cubic_bspline(double x1) {
  const double t = std::fabs(x1);
  if (t <= 1.0) return t * t * t / 2.0 - t * t + 2.0 / 3.0;
  if (t < 2.0) return -t * t * t / 6.0 + t * t - 2.0 * t + 4.0 / 3.0;
  return 0.0;
}

double smooth_cutoff(double x1) {
  const double t = std::fabs(x1);
  if (t <= 4.0) return 1.0;
  if (t >= 5.0) return 0.0;
  // exp overflows to inf near t = 5, which still yields the correct limit 0
  return 1.0 / (1.0 + std::exp(1.0 / (5.0 - t) + 1.0 / (4.0 - t)));
}

InterfaceProfile::InterfaceProfile(ProfileKind kind, double support, std::string id)
    : kind_(kind), support_(support), id_(std::move(id)) {}

InterfaceProfile InterfaceProfile::flat() {
  return InterfaceProfile(ProfileKind::flat, 0.0, "flat");
}

InterfaceProfile InterfaceProfile::f1() {
  InterfaceProfile p(ProfileKind::bspline_f1, 2.0, "f1");
  p.compute_extremes();
  return p;
}

InterfaceProfile InterfaceProfile::f2() {
  InterfaceProfile p(ProfileKind::gaussians_f2, 5.0, "f2");
  p.compute_extremes();
  return p;
}

InterfaceProfile InterfaceProfile::f3() {
  InterfaceProfile p(ProfileKind::oscillatory_f3, 4.0, "f3");
  p.compute_extremes();
  return p;
}

InterfaceProfile InterfaceProfile::f6() {
  InterfaceProfile p(ProfileKind::composite_f6, 7.0, "f6");
  p.compute_extremes();
  return p;
}

InterfaceProfile InterfaceProfile::tabulated(std::vector<double> x, std::vector<double> f, std::string id) {
  if (x.size() != f.size() || x.size() < 2) {
    throw FormatError("tabulated profile: need at least two (x, f) pairs");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i])) throw FormatError("tabulated profile: non-finite value");
    if (i > 0 && !(x[i] > x[i - 1])) throw FormatError("tabulated profile: abscissae must increase");
  }
  if (std::fabs(f.front()) > 1e-12 || std::fabs(f.back()) > 1e-12) {
    throw FormatError("tabulated profile: end values must be zero");
  }
  const double support = std::max(std::fabs(x.front()), std::fabs(x.back()));
  InterfaceProfile p(ProfileKind::tabulated, support, std::move(id));
  p.table_x_ = std::move(x);
  p.table_f_ = std::move(f);
  p.compute_extremes();
  return p;
}

InterfaceProfile InterfaceProfile::load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open profile table " + path.string());
  std::vector<double> xs, fs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x, f;
    if (!(row >> x)) continue;
    if (!(row >> f)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    }
    xs.push_back(x);
    fs.push_back(f);
  }
  return tabulated(std::move(xs), std::move(fs), "table:" + path.filename().string());
}

InterfaceProfile InterfaceProfile::by_name(std::string_view name) {
  if (name == "flat") return flat();
  if (name == "f1") return f1();
  if (name == "f2") return f2();
  if (name == "f3") return f3();
  if (name == "f6") return f6();
  throw DomainError("unknown profile '" + std::string(name) + "' (expected flat, f1, f2, f3, f6)");
}

double InterfaceProfile::evaluate(double x1) const {
  if (std::fabs(x1) >= support_) return 0.0;
  switch (kind_) {
    case ProfileKind::flat:
      return 0.0;
    case ProfileKind::bspline_f1:
      return 0.6 * cubic_bspline(x1);
    case ProfileKind::gaussians_f2:
      return (-0.3 * std::exp(-x1 * x1) - 0.4 * std::exp(-4.0 * (x1 - 2.0) * (x1 - 2.0)) -
              0.2 * std::exp(-3.0 * (x1 + 2.0) * (x1 + 2.0))) *
             smooth_cutoff(x1);
    case ProfileKind::oscillatory_f3:
      return std::exp(16.0 / (x1 * x1 - 16.0)) * std::sin(std::numbers::pi * x1);
    case ProfileKind::composite_f6:
      return 0.6 * cubic_bspline(x1) - 0.4 * cubic_bspline(x1 - 5.0);
    case ProfileKind::tabulated: {
      if (x1 <= table_x_.front() || x1 >= table_x_.back()) return 0.0;
      const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x1);
      const std::size_t i = static_cast<std::size_t>(it - table_x_.begin());
      const double t = (x1 - table_x_[i - 1]) / (table_x_[i] - table_x_[i - 1]);
      return (1.0 - t) * table_f_[i - 1] + t * table_f_[i];
    }
  }
  return 0.0;
}

void InterfaceProfile::compute_extremes() {
  constexpr int kSamples = 20000;
  min_ = 0.0;
  max_ = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double v = evaluate(-support_ + 2.0 * support_ * i / kSamples);
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  for (double x : table_x_) {
    min_ = std::min(min_, evaluate(x));
    max_ = std::max(max_, evaluate(x));
  }
}

double HalfDiskInterface::height(double x1) const {
  if (std::fabs(x1) >= radius) return 0.0;
  return -std::sqrt(radius * radius - x1 * x1);
}

MeasurementLine::MeasurementLine(double half_width, double height, int count)
    : half_width_(half_width), height_(height), count_(count) {
  if (!(half_width > 0) || !std::isfinite(half_width)) throw DomainError("MeasurementLine: a must be positive");
  if (!std::isfinite(height)) throw DomainError("MeasurementLine: b must be finite");
  if (count < 2) throw DomainError("MeasurementLine: N must be at least 2");
}

Point MeasurementLine::point(int p) const {
  return {-half_width_ + 2.0 * half_width_ * p / (count_ - 1), height_};
}

std::vector<Point> MeasurementLine::points() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (int p = 0; p < count_; ++p) out.push_back(point(p));
  return out;
}

SamplingGrid::SamplingGrid(double x_min, double x_max, double y_min, double y_max, double hx, double hy)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), hx_(hx), hy_(hy) {
  if (!(hx > 0) || !(hy > 0)) throw DomainError("SamplingGrid: steps must be positive");
  if (!(x_max >= x_min) || !(y_max >= y_min)) throw DomainError("SamplingGrid: empty range");
  nx_ = static_cast<int>(std::floor((x_max - x_min) / hx + 1e-9)) + 1;
  ny_ = static_cast<int>(std::floor((y_max - y_min) / hy + 1e-9)) + 1;
}

std::vector<Point> SamplingGrid::points() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int k = 0; k < size(); ++k) out.push_back(point(k));
  return out;
}

double PerturbationMesh::total_area() const {
  double sum = 0.0;
  for (const Cell& c : cells) sum += c.area;
  return sum;
}

PerturbationMesh build_mesh(const InterfaceProfile& profile, const Medium& medium, double cell_width) {
  if (!(cell_width > 0)) throw DomainError("build_mesh: cell width must be positive");
  PerturbationMesh mesh;
  mesh.cell_width = cell_width;
  if (profile.is_flat()) return mesh;

  const double h = cell_width;
  const double area = h * h;
  const double M = profile.support_radius();
  const int half_columns = static_cast<int>(std::ceil(M / h));
  const int rows_up = static_cast<int>(std::ceil(profile.max_value() / h));
  const int rows_down = static_cast<int>(std::ceil(-profile.min_value() / h));

  for (int i = -half_columns; i < half_columns; ++i) {
    const double x1 = (i + 0.5) * h;
    if (std::fabs(x1) >= M) continue;
    const double f = profile.evaluate(x1);
    for (int j = rows_down - 1; j >= 0; --j) {
      const double x2 = -(j + 0.5) * h;
      if (f < x2) mesh.cells.push_back({Point(x1, x2), area, medium.eta()});
    }
    for (int j = 0; j < rows_up; ++j) {
      const double x2 = (j + 0.5) * h;
      if (x2 < f) mesh.cells.push_back({Point(x1, x2), area, -medium.eta()});
    }
  }
  if (mesh.empty()) {
    std::cerr << "warning: perturbation of profile '" << profile.id()
              << "' is thinner than the cell width " << h << "; mesh is empty\n";
  }
  return mesh;
}

std::size_t half_disk_cell_count(double radius, double cell_width) {
  const double h = cell_width;
  const int n = static_cast<int>(std::ceil(radius / h));
  std::size_t count = 0;
  for (int i = -n; i < n; ++i) {
    const double x1 = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double x2 = (j + 0.5) * h;
      if (x1 * x1 + x2 * x2 < radius * radius) ++count;
    }
  }
  return count;
}

PerturbationMesh build_half_disk_mesh(const HalfDiskInterface& gr, const Medium& medium, double cell_width) {
  if (!(cell_width > 0)) throw DomainError("build_half_disk_mesh: cell width must be positive");
  if (!(gr.radius >= 0)) throw DomainError("build_half_disk_mesh: radius must be non-negative");
  PerturbationMesh mesh;
  mesh.cell_width = cell_width;
  const double h = cell_width;
  const int n = static_cast<int>(std::ceil(gr.radius / h));
  for (int i = -n; i < n; ++i) {
    const double x1 = (i + 0.5) * h;
    for (int j = n - 1; j >= 0; --j) {
      const double x2 = -(j + 0.5) * h;
      if (x1 * x1 + x2 * x2 < gr.radius * gr.radius) {
        mesh.cells.push_back({Point(x1, x2), h * h, medium.eta()});
      }
    }
  }
  return mesh;
}

}  // namespace roughlsm
