#include "moserlab/functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moserlab/transforms.hpp"

namespace moserlab {
namespace {

constexpr double pi = std::numbers::pi;

// mpmath: max over r of sqrt(2 pi)(1-r)/sqrt(log(1/r)), found by root of the derivative.
constexpr double sup2star_one_minus_r = 1.59966169967;
constexpr double sup2star_one_minus_r_at = 0.284668137;
// mpmath: energy of (1 - r^2) r cos(theta) is 2 pi / 3.
constexpr double disk_energy_oracle = 2.0 * pi / 3.0;

RadialFunction one_minus_r(RadialGridPtr g) {
  return RadialFunction::sample(g, [](const RadialPoint& p) { return p.gap; });
}

class Functions : public ::testing::Test {
protected:
  RadialGridPtr grid = default_radial_grid();
};

TEST_F(Functions, DirichletOfZero) {
  EXPECT_EQ(dirichlet_norm_radial(RadialFunction::zero(grid)), 0.0);
}

TEST_F(Functions, DirichletOfOneMinusR) {
  EXPECT_NEAR(dirichlet_norm_radial(one_minus_r(grid)), std::sqrt(pi), 1e-5);
}

TEST(FunctionsRefined, DirichletOfOneMinusRFine) {
  auto g = build_radial_grid(16384, Grading::doubly);
  EXPECT_NEAR(dirichlet_norm_radial(one_minus_r(g)), std::sqrt(pi), 1e-6);
}

TEST_F(Functions, DirichletOfMoserIsOne) {
  for (double k : {2.0, 4.0, 64.0, 1024.0, std::pow(2.0, 20)})
    EXPECT_NEAR(dirichlet_norm_radial(moser_function(grid, k)), 1.0, 1e-6) << "k=" << k;
}

TEST_F(Functions, DiskLiftMatchesRadial) {
  auto pg = build_polar_grid(grid, 32);
  auto u = one_minus_r(grid);
  auto lifted = DiskFunction::lift(pg, u);
  EXPECT_NEAR(dirichlet_norm_disk(lifted), dirichlet_norm_radial(u), 1e-10);
  EXPECT_EQ(dirichlet_norm_disk(DiskFunction::zero(pg)), 0.0);
}

TEST_F(Functions, DiskEnergyOfNonRadialFunction) {
  auto pg = build_polar_grid(grid, 256);
  auto u = DiskFunction::sample(pg, [](const RadialPoint& p, double th) { return (1 - p.r * p.r) * p.r * std::cos(th); });
  EXPECT_NEAR(dirichlet_energy_disk(u), disk_energy_oracle, 1e-3);
}

TEST_F(Functions, Sup2StarOfMoser) {
  for (double k : {4.0, 16.0, 64.0}) {
    auto m = moser_function(grid, k);
    EXPECT_NEAR(sup2star_norm(m), 1.0, 1e-6);
    EXPECT_NEAR(grid->r()[sup2star_argmax(m)], 1.0 / k, 1e-9 / k);
    EXPECT_NEAR(sup2star_norm(m, Sup2StarConvention::scaled), 1.0 / (2 * pi), 1e-6);
  }
  EXPECT_EQ(sup2star_norm(RadialFunction::zero(grid)), 0.0);
}

TEST_F(Functions, Sup2StarOfOneMinusR) {
  auto u = one_minus_r(grid);
  EXPECT_NEAR(sup2star_norm(u), sup2star_one_minus_r, 1e-5);
  EXPECT_NEAR(grid->r()[sup2star_argmax(u)], sup2star_one_minus_r_at, 5e-3);
}

TEST_F(Functions, HardyOriginOfMoser) {
  for (double k : {4.0, 16.0, 64.0}) EXPECT_NEAR(hardy_origin(moser_function(grid, k)), 2.0, 1e-3);
  EXPECT_EQ(hardy_origin(RadialFunction::zero(grid)), 0.0);
}

TEST_F(Functions, HardyBoundaryOfSquaredGap) {
  auto u = RadialFunction::sample(grid, [](const RadialPoint& p) { return p.gap * p.gap; });
  EXPECT_NEAR(hardy_boundary(u), pi / 6, 1e-4);
  EXPECT_EQ(hardy_boundary(RadialFunction::zero(grid)), 0.0);
}

TEST(FunctionsRefined, HardyBoundaryOfOneMinusR) {
  auto g = build_radial_grid(8192, Grading::doubly);
  EXPECT_NEAR(hardy_boundary(one_minus_r(g)), pi, 1e-4);
}

TEST_F(Functions, HardyBoundaryDiskMatchesRadial) {
  auto g = build_radial_grid(1024, Grading::doubly);
  auto u = RadialFunction::sample(g, [](const RadialPoint& p) { return p.gap * p.gap; });
  auto lifted = DiskFunction::lift(build_polar_grid(g, 16), u);
  EXPECT_NEAR(hardy_boundary(lifted), pi / 6, 1e-3);
}

TEST_F(Functions, PointwiseMargin) {
  EXPECT_EQ(pointwise_bound_margin(RadialFunction::zero(grid)), 0.0);
  for (double k : {4.0, 64.0}) {
    const double m = pointwise_bound_margin(moser_function(grid, k));
    EXPECT_LE(std::abs(m), 1e-10);
  }
  EXPECT_GT(pointwise_bound_margin(one_minus_r(grid)), 0.0);
}

TEST_F(Functions, LemmaOneOnRandomEnsemble) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 50; ++i) {
    auto u = random_radial_function(grid, rng);
    const double e = dirichlet_energy_radial(u);
    EXPECT_GE(pointwise_bound_margin(u), -lemma_slack(e)) << "sample " << i;
    if (e > 0) EXPECT_LE(sup2star_norm(u.scaled(1.0 / std::sqrt(e))), 1.0 + lemma_slack(1.0));
  }
}

TEST_F(Functions, Homogeneity) {
  auto u = one_minus_r(grid);
  const double lambda = -2.5;
  auto v = u.scaled(lambda);
  const auto a = norm_report(u), b = norm_report(v);
  EXPECT_NEAR(b.dirichlet, std::abs(lambda) * a.dirichlet, 1e-13 * a.dirichlet);
  EXPECT_NEAR(b.sup2star, std::abs(lambda) * a.sup2star, 1e-13 * a.sup2star);
  EXPECT_NEAR(b.hardy_origin, lambda * lambda * a.hardy_origin, 1e-13 * b.hardy_origin);
  EXPECT_NEAR(b.hardy_boundary, lambda * lambda * a.hardy_boundary, 1e-13 * b.hardy_boundary);
}

TEST_F(Functions, InterpolantIsLinearInT) {
  auto g = build_radial_grid(64, Grading::log_origin);
  auto u = RadialFunction::sample(g, [](const RadialPoint& p) { return std::min(p.t, 3.0); });
  EXPECT_NEAR(u.at_t(1.2345), 1.2345, 1e-12);
  EXPECT_EQ(u.at(1.0), 0.0);
  EXPECT_NEAR(u.at_t(100.0), u[0], 0.0);
}

TEST_F(Functions, RejectsNonFiniteValues) {
  std::vector<double> v(grid->size(), 0.0);
  v[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(RadialFunction(grid, v), std::domain_error);
}

}  // namespace
}  // namespace moserlab
