#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "roughlsm/geometry.hpp"

using namespace roughlsm;

namespace {

double exact_area(const InterfaceProfile& p) {
  const double M = p.support_radius();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::fabs(p.evaluate(x)); }, -M, M, 15, 1e-12);
}

}  // namespace

TEST_CASE("cubic B-spline") {
  CHECK(cubic_bspline(0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(cubic_bspline(1.0) == doctest::Approx(1.0 / 6.0));
  CHECK(cubic_bspline(1.0 - 1e-12) == doctest::Approx(1.0 / 6.0));
  CHECK(cubic_bspline(1.0 + 1e-12) == doctest::Approx(1.0 / 6.0));
  CHECK(cubic_bspline(2.0) == 0.0);
  CHECK(cubic_bspline(-2.0) == 0.0);
  CHECK(cubic_bspline(7.0) == 0.0);
  // one-sided first and second differences vanish at the support edge
  for (double h : {1e-2, 1e-3}) {
    const double b1 = cubic_bspline(2.0 - h);
    const double b2 = cubic_bspline(2.0 - 2 * h);
    CHECK(std::fabs(b1 / h) < 1.0 * h);
    CHECK(std::fabs((b2 - 2 * b1) / (h * h)) < 2.0 * h);
  }
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(cubic_bspline, -2.0, 2.0);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("profile values") {
  CHECK(InterfaceProfile::f1()(0.0) == doctest::Approx(0.4));
  const InterfaceProfile f3 = InterfaceProfile::f3();
  CHECK(f3(0.0) == 0.0);
  CHECK(f3(4.0) == 0.0);
  CHECK(f3(-4.0) == 0.0);
  CHECK(std::fabs(f3(3.999)) < 1e-100);
  CHECK(smooth_cutoff(4.5) == doctest::Approx(0.5));
  CHECK(smooth_cutoff(0.0) == 1.0);
  CHECK(smooth_cutoff(5.0) == 0.0);
  const double f2_zero = -0.3 - 0.4 * std::exp(-16.0) - 0.2 * std::exp(-12.0);
  CHECK(InterfaceProfile::f2()(0.0) == doctest::Approx(f2_zero).epsilon(1e-14));
  const InterfaceProfile f6 = InterfaceProfile::f6();
  CHECK(f6(0.0) == doctest::Approx(0.4));
  CHECK(f6(5.0) == doctest::Approx(-0.4 * 2.0 / 3.0));
}

TEST_CASE("support radii and compact support") {
  const std::pair<const char*, double> cases[] = {{"f1", 2.0}, {"f2", 5.0}, {"f3", 4.0}, {"f6", 7.0}};
  for (const auto& [name, M] : cases) {
    const InterfaceProfile p = InterfaceProfile::by_name(name);
    CHECK(p.support_radius() == M);
    for (int k = 0; k < 100; ++k) {
      const double x = M + 0.05 * k;
      CHECK(p(x) == 0.0);
      CHECK(p(-x) == 0.0);
    }
    for (int k = 0; k <= 2000; ++k) CHECK(std::isfinite(p(-M + k * M / 1000.0)));
    CHECK(p.max_value() >= 0.0);
    CHECK(p.min_value() <= 0.0);
  }
  CHECK(InterfaceProfile::flat()(1.0) == 0.0);
  CHECK_THROWS_AS(InterfaceProfile::by_name("f9"), DomainError);
}

TEST_CASE("tabulated profiles") {
  const InterfaceProfile t = InterfaceProfile::tabulated({-1.0, 0.0, 1.0}, {0.0, 0.5, 0.0});
  CHECK(t.support_radius() == 1.0);
  CHECK(t(0.5) == doctest::Approx(0.25));
  CHECK(t(3.0) == 0.0);
  CHECK(t.max_value() == doctest::Approx(0.5));
  CHECK_THROWS_AS(InterfaceProfile::tabulated({0.0, 0.0}, {0.0, 0.0}), FormatError);
  CHECK_THROWS_AS(InterfaceProfile::tabulated({-1.0, 1.0}, {0.1, 0.0}), FormatError);

  const auto path = std::filesystem::temp_directory_path() / "roughlsm_profile_table.txt";
  {
    std::ofstream os(path);
    os << "# bump\n-1 0\n0 -0.3   # crest\n1 0\n";
  }
  const InterfaceProfile loaded = InterfaceProfile::load_tabulated(path);
  CHECK(loaded(0.0) == doctest::Approx(-0.3));
  CHECK(loaded.min_value() == doctest::Approx(-0.3));
  {
    std::ofstream os(path);
    os << "-1 0\n0\n1 0\n";
  }
  CHECK_THROWS_AS(InterfaceProfile::load_tabulated(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("half-disk interface") {
  const HalfDiskInterface gr{2.0};
  CHECK(gamma_r_height(gr, 0.0) == -2.0);
  CHECK(gamma_r_height(gr, 2.0) == 0.0);
  CHECK(gamma_r_height(gr, -2.0) == 0.0);
  CHECK(gamma_r_height(gr, 5.0) == 0.0);
  CHECK(gamma_r_height(gr, 2.0 / std::sqrt(2.0)) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("measurement line") {
  const MeasurementLine line(15.0, 0.55, 601);
  CHECK(line.point(0).x() == -15.0);
  CHECK(line.point(600).x() == doctest::Approx(15.0));
  CHECK(line.point(300).x() == doctest::Approx(0.0));
  CHECK(line.point(7).y() == 0.55);
  CHECK(line.pitch() == doctest::Approx(0.05));
  CHECK(line.points().size() == 601);
  CHECK_THROWS_AS(MeasurementLine(15.0, 0.55, 1), DomainError);
  CHECK_THROWS_AS(MeasurementLine(0.0, 0.55, 10), DomainError);
}

TEST_CASE("sampling grid") {
  const SamplingGrid g(-10, 10, -1, 0.5, 0.5, 0.1);
  CHECK(g.nx() == 41);
  CHECK(g.ny() == 16);
  CHECK(g.point(0) == Point(-10, -1));
  CHECK(g.point(40).x() == doctest::Approx(10.0));
  CHECK(g.point(41).y() == doctest::Approx(-0.9));
  CHECK(g.point(g.size() - 1).y() == doctest::Approx(0.5));
  const SamplingGrid single(0.0, 0.0, 0.2, 0.2, 0.5, 0.1);
  CHECK(single.size() == 1);
  CHECK(SamplingGrid(0, 1, 0, 1, 0.3, 0.3).nx() == 4);
  CHECK_THROWS_AS(SamplingGrid(0, 1, 0, 1, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(SamplingGrid(1, 0, 0, 1, 0.1, 0.1), DomainError);
}

TEST_CASE("perturbation mesh") {
  const Medium m(1.0, 2.0);
  CHECK(build_mesh(InterfaceProfile::flat(), m, 0.1).empty());
  CHECK_THROWS_AS(build_mesh(InterfaceProfile::f1(), m, 0.0), DomainError);

  const InterfaceProfile f1 = InterfaceProfile::f1();
  const PerturbationMesh mesh = build_mesh(f1, m, 0.05);
  for (const Cell& c : mesh.cells) {
    CHECK(c.contrast == -m.eta());
    CHECK(c.center.y() > 0.0);
    CHECK(c.center.y() < f1(c.center.x()));
  }
  CHECK(mesh.total_area() == doctest::Approx(0.6).epsilon(0.02));

  const InterfaceProfile f3 = InterfaceProfile::f3();
  const PerturbationMesh m3 = build_mesh(f3, m, 0.05);
  bool above = false, below = false;
  for (const Cell& c : m3.cells) {
    CHECK((c.contrast == m.eta() || c.contrast == -m.eta()));
    const double f = f3(c.center.x());
    if (c.contrast == -m.eta()) {
      above = true;
      CHECK((c.center.y() > 0 && c.center.y() < f));
    } else {
      below = true;
      CHECK((c.center.y() < 0 && c.center.y() > f));
    }
  }
  CHECK(above);
  CHECK(below);
}

TEST_CASE("mesh area converges to the area between the curves") {
  const Medium full(1.0, 10.0);
  for (const char* name : {"f1", "f2", "f3", "f6"}) {
    const InterfaceProfile p = InterfaceProfile::by_name(name);
    const double exact = exact_area(p);
    CHECK(build_mesh(p, full, default_cell_width(full)).total_area() == doctest::Approx(exact).epsilon(0.02));
    // midpoint inclusion is not monotone in h, but the error stays O(h)
    for (double h : {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625}) {
      CHECK(std::fabs(build_mesh(p, full, h).total_area() - exact) <= 0.75 * h);
    }
  }
}

TEST_CASE("half-disk mesh") {
  const Medium m(1.0, 2.0);
  const PerturbationMesh mesh = build_half_disk_mesh({2.0}, m, 0.1);
  CHECK(mesh.size() == half_disk_cell_count(2.0, 0.1));
  CHECK(mesh.total_area() == doctest::Approx(std::numbers::pi * 2.0).epsilon(0.01));
  for (const Cell& c : mesh.cells) {
    CHECK(c.contrast == m.eta());
    CHECK(c.center.y() < 0.0);
  }
  CHECK(build_half_disk_mesh({0.0}, m, 0.1).empty());
}
