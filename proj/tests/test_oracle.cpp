#include <cmath>

#include "doctest.h"
#include "roughlsm/forward.hpp"
#include "roughlsm/oracle.hpp"

using namespace roughlsm;

namespace {

const Medium kDesk(1.0, 2.0);
const Point kSource(0.0, 1.0);

std::vector<Point> receivers() { return MeasurementLine(15.0, 0.55, 21).points(); }

std::vector<Point> with_source(std::vector<Point> pts) {
  pts.push_back(kSource);
  return pts;
}

Eigen::VectorXcd flat_reference(const Medium& m) {
  const auto pts = receivers();
  Eigen::VectorXcd ref(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) ref(static_cast<Eigen::Index>(i)) = g0_scattered(m, pts[i], kSource);
  return ref;
}

}  // namespace

TEST_CASE("configuration checks") {
  const InterfaceProfile f1 = InterfaceProfile::f1();
  const FDFDConfig good = FDFDConfig::for_problem(f1, kDesk, with_source(receivers()));
  CHECK_NOTHROW(validate(good, f1, kDesk));
  CHECK(good.grid_step == doctest::Approx(kDesk.wavelength2() / 20.0));
  CHECK(good.x_max >= 15.0 + kDesk.wavelength());

  FDFDConfig coarse = good;
  coarse.grid_step *= 1.5;
  CHECK_THROWS_AS(validate(coarse, f1, kDesk), DomainError);
  FDFDConfig thin = good;
  thin.pml_thickness = 0.4 * kDesk.wavelength();
  CHECK_THROWS_AS(validate(thin, f1, kDesk), DomainError);
  FDFDConfig narrow = good;
  narrow.x_min = -3.0;
  CHECK_THROWS_AS(validate(narrow, f1, kDesk), DomainError);

  const std::vector<Point> outside{Point(good.x_max + 0.5 * good.pml_thickness, 0.5)};
  CHECK_THROWS_AS(fdfd_scattered(f1, kDesk, good, kSource, outside), DomainError);
}

TEST_CASE("homogeneous medium gives no scattered field") {
  const Medium same(1.0, 1.0);
  const InterfaceProfile flat = InterfaceProfile::flat();
  const auto pts = receivers();
  const FDFDConfig cfg = FDFDConfig::for_problem(flat, same, with_source(pts), 80.0);
  const Eigen::VectorXcd u = fdfd_scattered(flat, same, cfg, kSource, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(u(static_cast<Eigen::Index>(i))) <= 0.01 * std::abs(phi(1.0, pts[i], kSource)));
  }
}

TEST_CASE("flat interface against the layered Green's function") {
  const InterfaceProfile flat = InterfaceProfile::flat();
  const auto pts = receivers();
  const Eigen::VectorXcd ref = flat_reference(kDesk);
  const auto gap = [&](double spw) {
    const FDFDConfig cfg = FDFDConfig::for_problem(flat, kDesk, with_source(pts), spw);
    validate(cfg, flat, kDesk);
    return (fdfd_scattered(flat, kDesk, cfg, kSource, pts) - ref).norm() / ref.norm();
  };
  const double coarse = gap(20.0);
  const double fine = gap(40.0);
  MESSAGE("relative gap " << coarse << " -> " << fine);
  CHECK(coarse <= 0.05);
  CHECK(coarse / fine >= 1.8);
}

TEST_CASE("self-convergence on the ex1 configuration") {
  const InterfaceProfile f1 = InterfaceProfile::f1();
  const auto pts = receivers();
  std::vector<Eigen::VectorXcd> u;
  for (double spw : {20.0, 40.0, 80.0}) {
    u.push_back(fdfd_scattered(f1, kDesk, FDFDConfig::for_problem(f1, kDesk, with_source(pts), spw), kSource, pts));
  }
  const double order = std::log2((u[1] - u[0]).norm() / (u[2] - u[1]).norm());
  MESSAGE("observed order " << order);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}
