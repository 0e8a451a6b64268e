#include "moserlab/functionals.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "moserlab/transforms.hpp"

namespace moserlab {
namespace {

constexpr double pi = std::numbers::pi;

// mpmath: pi e^{p L / (2 pi)} / k^2 + 2 pi int_0^L exp(p t^2 / (2 pi L) - 2 t) dt, L = log k.
struct MoserOracle {
  int log2k;
  double tm4pi, tm5pi, wtm4pi;
};
constexpr MoserOracle moser_oracles[] = {
    {4, 10.717858274, 26.8282644872, 8.49456821612},  {6, 11.2002772674, 49.5077551196, 8.61301204616},
    {8, 11.1338551767, 93.0874607558, 8.39042478306}, {10, 10.9049686341, 179.303703516, 8.0752149855},
    {12, 10.6613639937, 350.998266136, 7.77639475093},
};

class Functionals : public ::testing::Test {
protected:
  RadialGridPtr grid = default_radial_grid();
};

TEST_F(Functionals, TrivialValues) {
  auto zero = RadialFunction::zero(grid);
  EXPECT_NEAR(evaluate(FunctionalSpec::tm(), zero).value, pi, 1e-6);
  EXPECT_EQ(evaluate(FunctionalSpec::wtm(), zero).value, 0.0);
  const auto on = evaluate(FunctionalSpec::onofri(), zero);
  EXPECT_EQ(on.status, EvalStatus::empty_integrand);
}

TEST_F(Functionals, MoserValuesMatchOracle) {
  for (const auto& o : moser_oracles) {
    auto m = moser_function(grid, std::ldexp(1.0, o.log2k));
    EXPECT_NEAR(evaluate(FunctionalSpec::tm(), m).value, o.tm4pi, 1e-6 * o.tm4pi) << "k=2^" << o.log2k;
    EXPECT_NEAR(evaluate(FunctionalSpec::tm(5 * pi), m).value, o.tm5pi, 1e-6 * o.tm5pi) << "k=2^" << o.log2k;
    EXPECT_NEAR(evaluate(FunctionalSpec::wtm(), m).value, o.wtm4pi, 1e-6 * o.wtm4pi) << "k=2^" << o.log2k;
  }
}

TEST_F(Functionals, GenericMatchesHardyBoundary) {
  auto u = RadialFunction::sample(grid, [](const RadialPoint& p) { return p.gap * std::sqrt(p.r); });
  auto F = builtin_integrand("hardy-boundary-integrand");
  EXPECT_NEAR(evaluate(FunctionalSpec::generic(F), u).value, hardy_boundary(u), 1e-10);
}

TEST_F(Functionals, MonotoneInExponent) {
  auto u = moser_function(grid, 32).scaled(0.9);
  double prev = 0.0;
  for (double p : {pi, 2 * pi, 3 * pi, 4 * pi, 5 * pi}) {
    const double v = evaluate(FunctionalSpec::tm(p), u).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST_F(Functionals, WtmDominatesTm) {
  for (double k : {4.0, 64.0, 4096.0}) {
    auto m = moser_function(grid, k);
    EXPECT_GE(evaluate(FunctionalSpec::wtm(), m).value, evaluate(FunctionalSpec::tm(), m).value - pi);
  }
}

TEST_F(Functionals, OverflowIsDivergent) {
  auto u = moser_function(grid, std::ldexp(1.0, 20)).scaled(6.0);
  const auto ev = evaluate(FunctionalSpec::tm(), u);
  EXPECT_EQ(ev.status, EvalStatus::divergent);
  EXPECT_GT(ev.max_exponent, exponent_cap);
  EXPECT_TRUE(std::isinf(ev.value));
}

TEST_F(Functionals, OnofriRequiresNonnegative) {
  auto u = moser_function(grid, 4).scaled(-1.0);
  EXPECT_THROW(evaluate(FunctionalSpec::onofri(), u), std::invalid_argument);
  EXPECT_THROW(evaluate(FunctionalSpec::beckner(), u), std::invalid_argument);
}

TEST_F(Functionals, BecknerOfZeroIsOne) {
  // A = 1 for u = 0, so log A + 1/A = 1.
  EXPECT_NEAR(evaluate(FunctionalSpec::beckner(), RadialFunction::zero(grid)).value, 1.0, 1e-6);
}

TEST_F(Functionals, PropositionOneContinuity) {
  auto u = moser_function(grid, 16).scaled(0.9);
  const double ju = evaluate(FunctionalSpec::tm(), u).value;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    auto uj = dilate(u, DilationParam(1.0 + eps));
    ASSERT_LE(sup2star_norm(uj), 0.9 + 1e-9);
    const double d = std::abs(evaluate(FunctionalSpec::tm(), uj).value - ju);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST_F(Functionals, DiskEvaluationMatchesRadial) {
  auto g = grid;
  auto u = radial_bump(g, 0.5, 0.5);
  auto lifted = DiskFunction::lift(build_polar_grid(g, 16), u);
  for (auto spec : {FunctionalSpec::tm(), FunctionalSpec::wtm(), FunctionalSpec::onofri()})
    EXPECT_NEAR(evaluate(spec, lifted).value, evaluate(spec, u).value, 1e-4 * std::abs(evaluate(spec, u).value)) << spec.name();
}

TEST_F(Functionals, ParseAndNames) {
  EXPECT_EQ(parse_functional("tm", 4 * pi).kind, FunctionalKind::tm);
  EXPECT_EQ(parse_functional("hyperbolic-square").kind, FunctionalKind::generic);
  EXPECT_EQ(parse_functional("poly:hyperbolic:0,0,1").F.weight, WeightKind::hyperbolic);
  EXPECT_THROW(parse_functional("nope"), std::invalid_argument);
  EXPECT_EQ(FunctionalSpec::onofri().name(), "onofri");
}

TEST(Invariance, HardyIntegrandIsDilationInvariant) {
  auto g = default_radial_grid();
  auto spec = FunctionalSpec::generic(builtin_integrand("hardy-origin-integrand"));
  std::vector<NamedRadial> set = {{"m_4", moser_function(g, 4)}, {"m_8", moser_function(g, 8)}};
  auto rep = dilation_defect(spec, set, {1.0 / 3, 0.5, 2.0, 3.0});
  // s = 3 on m_4 moves its corner off the node set; every other pair stays node-aligned.
  for (const auto& p : rep.probes) {
    if (p.function_id == "m_4" && p.parameter == "3") continue;
    EXPECT_LT(p.defect, 1e-6) << p.function_id << " s=" << p.parameter;
  }
  EXPECT_EQ(rep.probes.size(), 8u);
}

TEST(Invariance, HardyBoundaryDilationDefectOnOneMinusR) {
  // 1 - r is not compactly supported away from r = 1, so the boundary term limits accuracy.
  auto g = build_radial_grid(16384, Grading::doubly);
  auto spec = FunctionalSpec::generic(builtin_integrand("hardy-origin-integrand"));
  std::vector<NamedRadial> set = {{"1-r", RadialFunction::sample(g, [](const RadialPoint& p) { return p.gap; })}};
  EXPECT_LT(dilation_defect(spec, set, {1.0 / 3, 0.5, 2.0, 3.0}).max_defect, 1e-4);
}

TEST(Invariance, SOneGivesZeroDefect) {
  auto g = build_radial_grid(512, Grading::doubly);
  std::vector<NamedRadial> set = {{"m_8", moser_function(g, 8)}};
  for (auto spec : {FunctionalSpec::tm(), FunctionalSpec::wtm(), FunctionalSpec::generic(builtin_integrand("lebesgue-square"))})
    EXPECT_EQ(dilation_defect(spec, set, {1.0}).max_defect, 0.0);
}

TEST(Invariance, HyperbolicSquareNotDilationInvariant) {
  auto g = default_radial_grid();
  auto spec = FunctionalSpec::generic(builtin_integrand("hyperbolic-square"));
  std::vector<NamedRadial> set = {{"m_4", moser_function(g, 4)}};
  // mpmath: |J(m_2) - J(m_4)| with J(u) = int u^2 (1 - r^2)^{-2} dx.
  EXPECT_NEAR(dilation_defect(spec, set, {2.0}).max_defect, 0.0999874545427509, 1e-6);
}

TEST(Invariance, LebesgueSquareNotMobiusInvariant) {
  for (std::size_t n : {1024u, 2048u}) {
    auto pg = build_polar_grid(build_radial_grid(n, Grading::doubly), n / 8);
    std::vector<NamedDisk> set = {{"bump", disk_bump(pg, 0.0, 0.5, 1.0)}};
    auto rep = mobius_defect(FunctionalSpec::generic(builtin_integrand("lebesgue-square")), set, {0.6});
    EXPECT_GT(rep.max_defect, 0.05) << "n=" << n;
  }
}

TEST(Invariance, HyperbolicSquareMobiusDefectShrinks) {
  double prev = 1.0;
  for (std::size_t n : {1024u, 2048u}) {
    auto pg = build_polar_grid(build_radial_grid(n, Grading::doubly), n / 16);
    auto probes = default_invariance_probes(pg);
    auto rep = mobius_defect(FunctionalSpec::generic(builtin_integrand("hyperbolic-square")), probes.disk, probes.zetas);
    EXPECT_LT(rep.max_defect, prev);
    EXPECT_LT(rep.max_defect, 1e-2);
    EXPECT_EQ(rep.probes.size(), probes.disk.size() * probes.zetas.size());
    prev = rep.max_defect;
  }
}

TEST(Invariance, WtmMobiusDefectShrinks) {
  double prev = INFINITY;
  for (std::size_t n : {1024u, 2048u, 4096u}) {
    auto pg = build_polar_grid(build_radial_grid(n, Grading::doubly), n / 16);
    auto probes = default_invariance_probes(pg, 0.5);
    const double d = mobius_defect(FunctionalSpec::wtm(), probes.disk, probes.zetas).max_defect;
    EXPECT_LT(d, prev) << "n=" << n;
    prev = d;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Invariance, FormatZeta) {
  EXPECT_EQ(format_zeta({0.5, -0.25}), "0.5-0.25i");
}

}  // namespace
}  // namespace moserlab
