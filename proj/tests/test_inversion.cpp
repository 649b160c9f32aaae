#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/SVD>

#include "doctest.h"
#include "roughlsm/inversion.hpp"

using namespace roughlsm;

namespace {

const Medium kDesk(1.0, 2.0);

NearFieldMatrix wrap(const MatrixXcd& e) {
  const auto n = static_cast<int>(e.rows());
  return NearFieldMatrix{.entries = e, .line = MeasurementLine(1.0, 1.0, std::max(n, 2)), .medium = kDesk};
}

MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  }
  return m;
}

// ex1 desk data, computed once.
const NearFieldMatrix& example1() {
  static const NearFieldMatrix m = synthesize(InterfaceProfile::f1(), kDesk, MeasurementLine(15.0, 0.55, 201),
                                              Variant::raw, std::nullopt, default_cell_width(kDesk));
  return m;
}

const SamplingGrid kExampleGrid(-10, 10, -1, 0.5, 0.5, 0.1);

}  // namespace

TEST_CASE("scalar Tikhonov") {
  MatrixXcd e(1, 1);
  e(0, 0) = 1.0;
  const TikhonovSolver solver(e);
  VectorXcd rhs(1);
  rhs(0) = 1.0;
  const VectorXcd g = solver.solve(rhs, 5e-5);
  CHECK(std::abs(g(0) - 1.0 / (1.0 + 5e-5)) < 1e-15);
}

TEST_CASE("solution norm decreases with alpha") {
  const MatrixXcd e = random_matrix(20, 1);
  const TikhonovSolver solver(e);
  const VectorXcd rhs = random_matrix(20, 2).col(0);
  double previous = INFINITY;
  for (double alpha : {1e-4, 1e-2, 1.0, 1e2}) {
    const double n = solver.solve(rhs, alpha).norm();
    CHECK(n < previous);
    previous = n;
  }
}

TEST_CASE("SVD filter equals the normal-equation solve") {
  for (std::uint64_t seed : {3, 4, 5}) {
    const MatrixXcd e = random_matrix(50, seed);
    const VectorXcd rhs = random_matrix(50, seed + 100).col(0);
    const double alpha = 5e-5;
    const MatrixXcd normal = alpha * MatrixXcd::Identity(50, 50) + e.adjoint() * e;
    const VectorXcd direct = normal.partialPivLu().solve(e.adjoint() * rhs);
    const VectorXcd filtered = svd_filter_solve(wrap(e), rhs, TikhonovConfig{alpha});
    CHECK((filtered - direct).norm() <= 1e-10 * direct.norm());

    MatrixXcd many(50, 3);
    many << rhs, 2.0 * rhs, random_matrix(50, seed + 200).col(0);
    const VectorXd norms = TikhonovSolver(e).solution_norms(many, alpha);
    CHECK(norms(0) == doctest::Approx(filtered.norm()).epsilon(1e-12));
    CHECK(norms(1) == doctest::Approx(2.0 * filtered.norm()).epsilon(1e-12));
  }
}

TEST_CASE("filter-factor bound") {
  const MatrixXcd e = random_matrix(30, 9) * 1e-3;
  const TikhonovSolver solver(e);
  const VectorXcd rhs = random_matrix(30, 10).col(0);
  Eigen::BDCSVD<MatrixXcd> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (double alpha : {5e-5, 1e-8}) {
    const VectorXcd g = solver.solve(rhs, alpha);
    const VectorXcd coeff = svd.matrixV().adjoint() * g;
    const VectorXcd proj = svd.matrixU().adjoint() * rhs;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
      CHECK(std::abs(coeff(i)) <= std::abs(proj(i)) / (2.0 * std::sqrt(alpha)) * (1 + 1e-12));
    }
  }
}

TEST_CASE("test right-hand sides") {
  const MeasurementLine line(15.0, 0.55, 201);
  const VectorXcd raw = test_rhs(kDesk, line, Point(0.0, 0.0), Variant::raw);
  CHECK(std::abs(raw(100)) == doctest::Approx(std::abs(hankel1_0(0.55)) / 4.0).epsilon(1e-12));
  const VectorXcd sym = test_rhs(kDesk, line, Point(0.0, -0.4), Variant::raw);
  for (int p = 0; p < 201; ++p) CHECK(std::abs(sym(p) - sym(200 - p)) <= 1e-12 * std::abs(sym(p)));

  const HalfDiskReference degenerate(kDesk, {0.0}, default_cell_width(kDesk));
  for (const Point& z : {Point(0.3, 0.2), Point(-1.0, -0.4)}) {
    const VectorXcd mod = test_rhs(kDesk, line, z, Variant::modified, &degenerate);
    const VectorXcd base = test_rhs(kDesk, line, z, Variant::raw);
    for (int p = 0; p < 201; p += 20) {
      const Point x = line.point(p);
      const Complex expected = z.y() > 0 ? base(p) + g0_scattered(kDesk, x, z) : g0(kDesk, x, z);
      CHECK(std::abs(mod(p) - expected) < 1e-12);
    }
  }

  CHECK_THROWS_AS(test_rhs(kDesk, line, Point(0.0, 0.55), Variant::raw), DomainError);
  CHECK_THROWS_AS(test_rhs(kDesk, line, Point(0.0, 0.0), Variant::modified), DomainError);
}

TEST_CASE("indicator normalization") {
  const SamplingGrid single(0.0, 0.0, 0.2, 0.2, 0.5, 0.1);
  const IndicatorField f = indicator_map(example1(), single, {}, Variant::raw);
  REQUIRE(f.values.size() == 1);
  CHECK(f.values(0) == 1.0);
  CHECK_THROWS_AS(indicator_map(example1(), single, {}, Variant::modified), DomainError);
}

TEST_CASE("indicator field symmetry and invariances") {
  const IndicatorField field = indicator_map(example1(), kExampleGrid, {}, Variant::raw);
  CHECK(field.values.maxCoeff() == 1.0);
  CHECK(field.values.minCoeff() >= 0.0);
  const SamplingGrid& g = field.grid;
  double asym = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) asym = std::max(asym, std::fabs(field.at(i, j) - field.at(g.nx() - 1 - i, j)));
  }
  CHECK(asym <= 1e-8);

  NearFieldMatrix rotated = example1();
  rotated.entries *= std::polar(1.0, 0.7);
  const IndicatorField phased = indicator_map(rotated, kExampleGrid, {}, Variant::raw);
  CHECK((phased.values - field.values).cwiseAbs().maxCoeff() <= 1e-12);

  const double s = 3.0;
  NearFieldMatrix scaled = example1();
  scaled.entries *= s;
  Eigen::Index argmax_plain, argmax_scaled;
  field.values.maxCoeff(&argmax_plain);
  indicator_map(scaled, kExampleGrid, TikhonovConfig{5e-5 * s * s}, Variant::raw).values.maxCoeff(&argmax_scaled);
  CHECK(argmax_plain == argmax_scaled);
}

TEST_CASE("interface extraction") {
  const IndicatorField field = indicator_map(example1(), kExampleGrid, {}, Variant::raw);
  const InterfaceEstimate top = extract_interface(field, 1.0);
  std::size_t kept = 0;
  for (const ColumnEstimate& c : top.columns) kept += c.kept.size();
  CHECK(kept == static_cast<std::size_t>((field.values.array() == 1.0).count()));

  const InterfaceEstimate all = extract_interface(field, 1e-300);
  for (const ColumnEstimate& c : all.columns) {
    CHECK(c.kept.size() == static_cast<std::size_t>(field.grid.ny()));
    CHECK(std::is_sorted(c.kept.begin(), c.kept.end()));
    CHECK(c.envelope == doctest::Approx(0.5));
  }

  // NInd is large in the region below the interface, so at C = 0.5 every
  // column survives and the estimate is the upper envelope. Columns whose
  // envelope rises above the background level lie over the true support.
  const InterfaceEstimate est = extract_interface(field, 0.5);
  std::vector<double> envelopes;
  for (const ColumnEstimate& c : est.columns) envelopes.push_back(c.envelope.value_or(-INFINITY));
  std::vector<double> sorted_env = envelopes;
  std::nth_element(sorted_env.begin(), sorted_env.begin() + sorted_env.size() / 2, sorted_env.end());
  const double background = sorted_env[sorted_env.size() / 2];
  std::set<long> raised, truth, survived;
  for (std::size_t i = 0; i < est.columns.size(); ++i) {
    const double x = est.columns[i].x1;
    if (envelopes[i] > background + 0.5 * field.grid.hy()) raised.insert(std::lround(2 * x));
    if (std::fabs(x) < 2.0) truth.insert(std::lround(2 * x));
    if (est.columns[i].envelope) survived.insert(std::lround(2 * x));
  }
  CHECK_FALSE(raised.empty());
  for (long x : raised) CHECK(truth.count(x) == 1);
  CHECK(raised.count(0) == 1);
  std::size_t common = 0;
  for (long x : survived) common += truth.count(x);
  MESSAGE("Jaccard index of surviving columns: "
          << double(common) / double(survived.size() + truth.size() - common));

  // the brightest point of the band above the plane lies over the perturbation
  double best = -1.0;
  Point best_z;
  for (int k = 0; k < field.grid.size(); ++k) {
    const Point z = field.grid.point(k);
    if (z.y() >= -0.1 - 1e-9 && field.values(k) > best) {
      best = field.values(k);
      best_z = z;
    }
  }
  CHECK(std::fabs(best_z.x()) <= 3.0);

  IndicatorField dark = field;
  dark.values.setZero();
  CHECK(extract_interface(dark, 0.5).empty());
}

TEST_CASE("distance to the perturbation boundary") {
  const InterfaceProfile f1 = InterfaceProfile::f1();
  CHECK(distance_to_perturbation_boundary(f1, Point(0.0, 0.2)) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(distance_to_perturbation_boundary(f1, Point(5.0, 0.3)) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(distance_to_perturbation_boundary(f1, Point(0.0, 1.0)) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("separation metric") {
  const IndicatorField field = indicator_map(example1(), kExampleGrid, {}, Variant::raw);
  const SeparationMetric s = separation_metric(field, InterfaceProfile::f1());
  CHECK(s.inside_count == 1);
  CHECK(s.outside_count > 0);
  CHECK(s.ratio == doctest::Approx(s.inside_mean / s.outside_mean));
  CHECK(std::isnan(separation_metric(field, InterfaceProfile::flat()).ratio));
}
