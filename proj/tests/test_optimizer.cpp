#include "moserlab/optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moserlab/transforms.hpp"

namespace moserlab {
namespace {

constexpr double pi = std::numbers::pi;

TEST(Projection, ScalesOntoBall) {
  auto g = default_radial_grid();
  auto u = moser_function(g, 8).scaled(3.0);
  EXPECT_NEAR(dirichlet_norm_radial(project_to_ball(u, 1.0)), 1.0, 1e-12);
  EXPECT_EQ(dirichlet_norm_radial(project_to_ball(u, 0.0)), 0.0);
  auto small = u.scaled(0.1);
  auto p = project_to_ball(small, 1.0);
  for (std::size_t i = 0; i < g->size(); ++i) ASSERT_EQ(p[i], small[i]);
  EXPECT_THROW(project_to_ball(u, -1.0), std::invalid_argument);
}

TEST(RieszMap, InvertsEnergyMatrix) {
  auto g = build_radial_grid(256, Grading::doubly);
  auto u = radial_bump(g, 0.7, 1.0);
  // K u is the energy gradient: d/du_i of the energy equals 2 (K u)_i.
  const auto t = g->t();
  std::vector<double> ku(g->size(), 0.0);
  for (std::size_t i = 0; i + 1 < g->size(); ++i) {
    const double c = 2 * pi / (t[i] - t[i + 1]);
    ku[i] += c * (u[i] - u[i + 1]);
    ku[i + 1] += c * (u[i + 1] - u[i]);
  }
  ku.back() += 2 * pi / t.back() * u[g->size() - 1];
  auto x = energy_riesz_map(*g, ku);
  for (std::size_t i = 0; i < g->size(); ++i) ASSERT_NEAR(x[i], u[i], 1e-9);
}

TEST(Gradient, MatchesCentralDifferences) {
  auto g = build_radial_grid(512, Grading::doubly);
  auto u = moser_function(g, 16).scaled(0.8);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, g->size() - 1);
  for (auto spec : {FunctionalSpec::tm(), FunctionalSpec::wtm()}) {
    const auto grad = gradient(spec, u);
    double gmax = 0.0;
    for (double x : grad) gmax = std::max(gmax, std::abs(x));
    int checked = 0;
    while (checked < 10) {
      const std::size_t i = pick(rng);
      if (std::abs(grad[i]) < 1e-3 * gmax) continue;
      std::vector<double> vp(u.values().begin(), u.values().end()), vm = vp;
      const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
      vp[i] += h;
      vm[i] -= h;
      const double fd = (evaluate(spec, RadialFunction(g, vp)).value - evaluate(spec, RadialFunction(g, vm)).value) / (2 * h);
      EXPECT_NEAR(grad[i], fd, 1e-4 * std::abs(fd)) << spec.name() << " node " << i;
      ++checked;
    }
  }
}

TEST(Maximize, RadiusZeroStaysAtZero) {
  auto g = default_radial_grid();
  auto tr = maximize({FunctionalSpec::tm(), 0.0, moser_function(g, 4)});
  EXPECT_NEAR(tr.final_objective, pi, 1e-6);
  EXPECT_EQ(dirichlet_norm_radial(tr.final_u), 0.0);
  EXPECT_FALSE(tr.divergent);
}

TEST(Maximize, TmFromZeroBeatsMoserFamily) {
  auto g = default_radial_grid();
  auto tr = maximize({FunctionalSpec::tm(), 1.0, RadialFunction::zero(g)});
  EXPECT_FALSE(tr.divergent);
  EXPECT_NEAR(tr.objective.front(), pi, 1e-6);
  for (std::size_t i = 1; i < tr.objective.size(); ++i) ASSERT_GE(tr.objective[i], tr.objective[i - 1]);
  EXPECT_LE(dirichlet_norm_radial(tr.final_u), 1.0 + 1e-9);
  for (int e = 2; e <= 12; ++e) EXPECT_GE(tr.final_objective, evaluate(FunctionalSpec::tm(), moser_function(g, std::ldexp(1.0, e))).value);
}

TEST(Maximize, WtmStableUnderRefinement) {
  auto a = maximize({FunctionalSpec::wtm(), 1.0, RadialFunction::zero(default_radial_grid())});
  auto b = maximize({FunctionalSpec::wtm(), 1.0, RadialFunction::zero(build_radial_grid(8192, Grading::doubly))});
  EXPECT_FALSE(a.divergent);
  EXPECT_FALSE(b.divergent);
  EXPECT_LT(std::abs(a.final_objective - b.final_objective) / b.final_objective, 0.05);
}

TEST(Maximize, DilationSymmetricStarts) {
  auto g = default_radial_grid();
  auto m4 = moser_function(g, 4);
  const OptimizerSettings long_run{1600, 1e-2, 30};
  auto a = maximize({FunctionalSpec::tm(), 1.0, m4}, long_run);
  auto b = maximize({FunctionalSpec::tm(), 1.0, dilate(m4, DilationParam(2.0))}, long_run);
  EXPECT_LT(std::abs(a.final_objective - b.final_objective) / a.final_objective, 0.02);
}

TEST(Maximize, RejectsBadSettings) {
  auto g = build_radial_grid(64, Grading::doubly);
  EXPECT_THROW(maximize({FunctionalSpec::tm(), -1.0, RadialFunction::zero(g)}), std::invalid_argument);
  EXPECT_THROW(maximize({FunctionalSpec::tm(), 1.0, RadialFunction::zero(g)}, {10, 0.0, 30}), std::invalid_argument);
}

TEST(CriticalityScan, FlagsOnlySupercriticalRow) {
  auto g = default_radial_grid();
  std::vector<double> ks;
  for (int e = 4; e <= 12; ++e) ks.push_back(std::ldexp(1.0, e));
  auto rows = criticality_scan(g, {2 * pi, 3 * pi, 4 * pi, 5 * pi}, 1.0, ks);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].divergent);
  EXPECT_FALSE(rows[1].divergent);
  EXPECT_FALSE(rows[2].divergent);
  ASSERT_TRUE(rows[3].divergent);
  EXPECT_LE(*rows[3].divergence_k, 1024.0);
  for (std::size_t j = 1; j < ks.size(); ++j) EXPECT_GT(rows[3].moser[j].value, rows[3].moser[j - 1].value);
  EXPECT_LT(rows[0].tail_change, 0.05);
  EXPECT_LT(rows[1].tail_change, 0.05);
}

TEST(Onofri, AllEmptyThrows) {
  auto g = build_radial_grid(64, Grading::doubly);
  EXPECT_THROW(onofri_constant({RadialFunction::zero(g)}), std::domain_error);
}

TEST(Onofri, LinearEnsembleSaturates) {
  auto g = default_radial_grid();
  auto constant = [&](int amax) {
    std::vector<RadialFunction> ens;
    for (int a = 1; a <= amax; ++a) ens.push_back(RadialFunction::sample(g, [a](const RadialPoint& p) { return a * p.gap; }));
    return onofri_constant(ens);
  };
  auto c8 = constant(8), c32 = constant(32);
  EXPECT_FALSE(c32.divergent);
  EXPECT_TRUE(std::isfinite(c8.constant));
  EXPECT_LT(std::abs(c32.constant - c8.constant) / std::abs(c8.constant), 0.1);
}

}  // namespace
}  // namespace moserlab
