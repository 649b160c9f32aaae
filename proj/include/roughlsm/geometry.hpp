#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "roughlsm/medium.hpp"

namespace roughlsm {

using Point = Eigen::Vector2d;

/// Piecewise cubic B-spline, C^2 with support [-2, 2].
double cubic_bspline(double x1);

/// Smooth cutoff: 1 on |x| <= 4, 0 on |x| >= 5.
double smooth_cutoff(double x1);

enum class ProfileKind { flat, bspline_f1, gaussians_f2, oscillatory_f3, composite_f6, tabulated };

/// Interface x2 = f(x1) that coincides with x2 = 0 for |x1| >= M.
class InterfaceProfile {
 public:
  static InterfaceProfile flat();
  static InterfaceProfile f1();  // 0.6 * B(x)
  static InterfaceProfile f2();  // three Gaussian dips times the cutoff
  static InterfaceProfile f3();  // exp(16/(x^2-16)) sin(pi x)
  static InterfaceProfile f6();  // 0.6 * B(x) - 0.4 * B(x - 5)

  /// Linear interpolation of (x, f) samples; zero outside the table.
  /// Abscissae must be strictly increasing and both end values zero.
  static InterfaceProfile tabulated(std::vector<double> x, std::vector<double> f,
                                    std::string id = "tabulated");
  /// Two whitespace-separated columns; '#' starts a comment.
  static InterfaceProfile load_tabulated(const std::filesystem::path& path);

  /// "flat", "f1", "f2", "f3" or "f6".
  static InterfaceProfile by_name(std::string_view name);

  ProfileKind kind() const { return kind_; }
  double support_radius() const { return support_; }
  const std::string& id() const { return id_; }
  bool is_flat() const { return kind_ == ProfileKind::flat; }

  double evaluate(double x1) const;
  double operator()(double x1) const { return evaluate(x1); }

  /// Extremes over [-M, M] from dense sampling; both include 0.
  double min_value() const { return min_; }
  double max_value() const { return max_; }

 private:
  InterfaceProfile(ProfileKind kind, double support, std::string id);
  void compute_extremes();

  ProfileKind kind_;
  double support_;
  std::string id_;
  std::vector<double> table_x_;
  std::vector<double> table_f_;
  double min_ = 0.0;
  double max_ = 0.0;
};

inline double profile_eval(const InterfaceProfile& profile, double x1) { return profile.evaluate(x1); }

/// Flat interface with a half-disk dip of radius r centred at the origin.
struct HalfDiskInterface {
  double radius;

  double height(double x1) const;
};

inline double gamma_r_height(const HalfDiskInterface& gr, double x1) { return gr.height(x1); }

/// N equally spaced points on {(x1, b) : |x1| <= a}, endpoints included.
class MeasurementLine {
 public:
  MeasurementLine(double half_width, double height, int count);

  double half_width() const { return half_width_; }
  double height() const { return height_; }
  int count() const { return count_; }
  double pitch() const { return 2.0 * half_width_ / (count_ - 1); }

  /// Zero-based index p in [0, N).
  Point point(int p) const;
  std::vector<Point> points() const;

 private:
  double half_width_;
  double height_;
  int count_;
};

/// Rectangular grid of sampling points; both interval endpoints are included
/// when the extent is a multiple of the step.
class SamplingGrid {
 public:
  SamplingGrid(double x_min, double x_max, double y_min, double y_max, double hx, double hy);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  double x(int i) const { return x_min_ + i * hx_; }
  double y(int j) const { return y_min_ + j * hy_; }
  /// Flat index k = j * nx + i (x fastest).
  Point point(int k) const { return {x(k % nx_), y(k / nx_)}; }
  std::vector<Point> points() const;

 private:
  double x_min_, x_max_, y_min_, y_max_, hx_, hy_;
  int nx_, ny_;
};

struct Cell {
  Point center;
  double area;
  double contrast;  // kappa^2 - kappa_ref^2
};

/// Square quadrature cells between the interface and the reference plane.
/// Cell centres sit on the lattice ((i + 1/2) h, +-(j + 1/2) h).
struct PerturbationMesh {
  std::vector<Cell> cells;
  double cell_width = 0.0;

  bool empty() const { return cells.empty(); }
  std::size_t size() const { return cells.size(); }
  double total_area() const;
};

/// Ten cells per wavelength of the lower medium.
inline double default_cell_width(const Medium& medium) { return medium.wavelength2() / 10.0; }

/// Cells whose centre lies strictly between the interface and x2 = 0.
/// Contrast is -eta above the plane and +eta below it.
PerturbationMesh build_mesh(const InterfaceProfile& profile, const Medium& medium, double cell_width);

/// Cells inside the half-disk below x2 = 0, all with contrast +eta.
PerturbationMesh build_half_disk_mesh(const HalfDiskInterface& gr, const Medium& medium,
                                      double cell_width);

/// Cell count build_half_disk_mesh would produce, without allocating.
std::size_t half_disk_cell_count(double radius, double cell_width);

}  // namespace roughlsm
