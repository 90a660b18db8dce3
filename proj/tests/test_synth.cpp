#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "music2d/special.hpp"
#include "music2d/subspace.hpp"
#include "music2d/synth.hpp"

using namespace music2d;

namespace {

constexpr double kPi = std::numbers::pi;

SceneGeometry<double> single_point_geometry(const Vec2d& point, double segment_length) {
  SceneGeometry<double> geom;
  geom.points = point;
  geom.tangents = Vec2d(1, 0);
  geom.normals = Vec2d(0, 1);
  geom.curve_length = segment_length;
  geom.spacing = segment_length;
  geom.validate();
  return geom;
}

double relative_asymmetry(const Eigen::MatrixXcd& k) {
  return (k - k.transpose()).norm() / k.norm();
}

}  // namespace

TEST_CASE("msr_thin single point at the origin") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(4);
  const auto geom = single_point_geometry({0, 0}, 0.2);
  const MaterialContrast<double> mat{5.0, 1.0, 0.02};
  const auto msr = msr_thin(geom, mat, omega, dirs);

  const std::complex<double> expected = 0.02 * farfield_prefactor(omega) * 0.2 * 4.0;
  for (Index j = 0; j < 4; ++j)
    for (Index l = 0; l < 4; ++l)
      CHECK(std::abs(msr.matrix(j, l) - expected) <= 1e-12 * std::abs(expected));
  CHECK(std::abs(expected) == doctest::Approx(0.1987).epsilon(5e-4));
  CHECK(msr.scale == 0.02);
  CHECK(msr.source_points == 1);
}

TEST_CASE("msr matrices are symmetric") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);

  CHECK(relative_asymmetry(msr_thin(geom, {5, 1, 0.02}, omega, dirs).matrix) <= 1e-14);
  CHECK(relative_asymmetry(msr_thin(geom, {5, 5, 0.02}, omega, dirs).matrix) <= 1e-14);
  CHECK(relative_asymmetry(msr_crack(geom, CrackBoundary::SoundSoft, omega, dirs).matrix) <=
        1e-14);
  CHECK(relative_asymmetry(msr_crack(geom, CrackBoundary::SoundHard, omega, dirs).matrix) <=
        1e-14);

  std::vector<SmallInclusion<double>> incs(2);
  incs[0].center = {-0.5, 0};
  incs[1].center = {0.5, 0.1};
  incs[1].tensor = SmallInclusion<double>::disk_tensor(5.0, incs[1].area);
  CHECK(relative_asymmetry(msr_small(incs, omega, dirs).matrix) <= 1e-14);
}

TEST_CASE("thin permittivity-only data has rank M") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);
  REQUIRE(geom.size() == 6);
  const auto dec = svd(msr_thin(geom, {5, 1, 0.02}, omega, dirs));
  CHECK(dec.sigma(6) <= 1e-10 * dec.sigma(0));
  CHECK(dec.sigma(5) >= 1e-4 * dec.sigma(0));
}

TEST_CASE("thin permeability-only data has rank 2M") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);
  const auto dec = svd(msr_thin(geom, {1, 5, 0.02}, omega, dirs));
  CHECK(dec.sigma(12) <= 1e-10 * dec.sigma(0));
  CHECK(dec.sigma(11) >= 1e-6 * dec.sigma(0));
}

TEST_CASE("signal space contains the phase-only model vectors") {
  // permittivity contrast, N = 4M: each normalized model vector projects onto
  // the top-M left singular vectors with cosine >= 0.99
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);
  auto dec = svd(msr_thin(geom, {5, 1, 0.02}, omega, dirs));
  dec.signal_dim = geom.size();
  for (Index m = 0; m < geom.size(); ++m) {
    VectorXC<double> g(dirs.size());
    for (Index n = 0; n < dirs.size(); ++n) {
      const double phase = omega * dirs.vectors.col(n).dot(geom.points.col(m));
      g(n) = std::complex<double>(std::cos(phase), std::sin(phase));
    }
    g /= g.norm();
    const double cosine = (dec.u.leftCols(dec.signal_dim).adjoint() * g).norm();
    CHECK(cosine >= 0.99);
  }
}

TEST_CASE("model-vector gram matches J0 at N = 128") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(128);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);
  double max_dev = 0;
  for (Index m = 0; m < geom.size(); ++m) {
    for (Index mp = 0; mp < geom.size(); ++mp) {
      const auto inner =
          circular_moment0(Vec2d(geom.points.col(m) - geom.points.col(mp)), omega, dirs);
      const double dist = (geom.points.col(m) - geom.points.col(mp)).norm();
      max_dev = std::max(max_dev,
                         std::abs(inner - std::complex<double>(bessel_j0(omega * dist), 0)));
    }
  }
  CHECK(max_dev <= 1e-8);
}

TEST_CASE("msr_small single inclusion examples") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(16);

  SmallInclusion<double> inc;
  inc.center = {0, 0};
  inc.radius = 0.1;
  inc.eps = 5.0;  // eps - eps0 = 4
  const auto msr = msr_small({inc}, omega, dirs);
  const std::complex<double> expected = 0.01 * farfield_prefactor(omega) * kPi * 4.0;
  for (Index j = 0; j < dirs.size(); ++j)
    for (Index l = 0; l < dirs.size(); ++l)
      CHECK(std::abs(msr.matrix(j, l) - expected) <= 1e-12 * std::abs(expected));

  SmallInclusion<double> iso = inc;
  iso.tensor = Mat2d::Identity();
  const auto dec = svd(msr_small({iso}, omega, dirs));
  CHECK(dec.sigma(3) <= 1e-10 * dec.sigma(0));  // rank <= 3

  CHECK_THROWS_AS(msr_small({}, omega, dirs), std::invalid_argument);
}

TEST_CASE("msr_small is additive over inclusions") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(12);
  SmallInclusion<double> a, b;
  a.center = {-0.5, 0};
  b.center = {0.5, 0};
  b.tensor = SmallInclusion<double>::disk_tensor(3.0, b.area);
  const Eigen::MatrixXcd sum = msr_small({a, b}, omega, dirs).matrix;
  const Eigen::MatrixXcd parts =
      msr_small({a}, omega, dirs).matrix + msr_small({b}, omega, dirs).matrix;
  CHECK((sum - parts).norm() <= 1e-12 * sum.norm());
}

TEST_CASE("msr_crack singular values for one point") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = single_point_geometry({0.17, -0.31}, 0.2);

  const auto soft = svd(msr_crack(geom, CrackBoundary::SoundSoft, omega, dirs));
  CHECK(soft.sigma(0) == doctest::Approx(24.0).epsilon(1e-10));
  CHECK(soft.sigma(1) <= 1e-10 * 24.0);

  const auto origin = single_point_geometry({0, 0}, 0.2);
  const auto hard_msr = msr_crack(origin, CrackBoundary::SoundHard, omega, dirs);
  for (Index j = 0; j < dirs.size(); ++j)
    for (Index l = 0; l < dirs.size(); ++l) {
      const double expected = dirs.vectors.col(j).y() * dirs.vectors.col(l).y();
      CHECK(std::abs(hard_msr.matrix(j, l) - std::complex<double>(expected, 0)) <= 1e-12);
    }
  const auto hard = svd(hard_msr);
  CHECK(hard.sigma(0) == doctest::Approx(12.0).epsilon(1e-10));  // N/2

  CHECK_THROWS_AS(msr_crack(geom, CrackBoundary::SoundSoft, omega, dirs, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("add_noise contract") {
  const double omega = 5 * kPi;
  const auto dirs = sample_directions(24);
  const auto geom = discretize_curve(CurveSpec<double>::gamma1(), 0.2);
  const auto msr = msr_thin(geom, {5, 1, 0.02}, omega, dirs);

  const auto unchanged = add_noise(msr, 0.0, 123);
  CHECK((unchanged.matrix - msr.matrix).norm() == 0.0);

  const auto a = add_noise(msr, 0.01, 42);
  const auto b = add_noise(msr, 0.01, 42);
  CHECK((a.matrix - b.matrix).norm() == 0.0);

  const double rel = (a.matrix - msr.matrix).norm() / msr.matrix.norm();
  CHECK(rel >= 0.005);
  CHECK(rel <= 0.02);
  CHECK(relative_asymmetry(a.matrix) <= 1e-14);

  CHECK_THROWS_AS(add_noise(msr, -0.1, 0), std::invalid_argument);
}
