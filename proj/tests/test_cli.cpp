#include "moserlab/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "moserlab/functionals.hpp"
#include "moserlab/transforms.hpp"

namespace moserlab::cli {
namespace {

namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "moserlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

class Cli : public ::testing::Test {
protected:
  fs::path dir = fs::temp_directory_path() / ("moserlab-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
  void SetUp() override { fs::remove_all(dir); }
  void TearDown() override { fs::remove_all(dir); }
};

TEST(Parse, Numbers) {
  EXPECT_DOUBLE_EQ(parse_number("4pi"), 4 * pi);
  EXPECT_DOUBLE_EQ(parse_number("pi"), pi);
  EXPECT_DOUBLE_EQ(parse_number("-pi"), -pi);
  EXPECT_DOUBLE_EQ(parse_number("1/3"), 1.0 / 3);
  EXPECT_DOUBLE_EQ(parse_number("pi/2"), pi / 2);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_THROW(parse_number("four"), std::invalid_argument);
  EXPECT_THROW(parse_number("1/0"), std::invalid_argument);
}

TEST(Parse, Lists) {
  auto v = parse_number_list("2^4..2^6");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], 16.0);
  EXPECT_EQ(v[2], 64.0);
  EXPECT_EQ(parse_number_list("1..3,5").size(), 4u);
  EXPECT_EQ(parse_number_list("2pi,3pi")[1], 3 * pi);
  EXPECT_THROW(parse_number_list("3..1"), std::invalid_argument);
}

TEST(Parse, Complex) {
  EXPECT_EQ(parse_complex("0.6+0.2i"), std::complex<double>(0.6, 0.2));
  EXPECT_EQ(parse_complex("0.5i"), std::complex<double>(0.0, 0.5));
  EXPECT_EQ(parse_complex("-i"), std::complex<double>(0.0, -1.0));
  EXPECT_EQ(parse_complex("0.3"), std::complex<double>(0.3, 0.0));
  EXPECT_EQ(parse_complex("1e-1-2e-1i"), std::complex<double>(0.1, -0.2));
}

TEST(Parse, GridSpec) {
  auto g = parse_grid_spec("n=1024,grading=double,angles=64");
  EXPECT_EQ(g.n, 1024u);
  EXPECT_EQ(g.grading, Grading::doubly);
  EXPECT_EQ(g.angles, 64u);
  auto h = parse_grid_spec(format_grid_spec(g));
  EXPECT_EQ(format_grid_spec(h), format_grid_spec(g));
  EXPECT_THROW(parse_grid_spec("n=8"), std::invalid_argument);
  EXPECT_THROW(parse_grid_spec("angles=7"), std::invalid_argument);
  EXPECT_THROW(parse_grid_spec("colour=red"), std::invalid_argument);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST_F(Cli, EvalWtmMoser) {
  auto r = invoke({"eval", "--functional", "wtm", "--p", "4pi", "--profile", "moser", "--k", "64", "--out", dir.string()});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  auto s = summary(dir);
  EXPECT_EQ(s["command"], "eval");
  EXPECT_NEAR(s["results"]["dirichlet_norm"].get<double>(), 1.0, 1e-6);
  const double expected = evaluate(FunctionalSpec::wtm(), moser_function(default_radial_grid(), 64)).value;
  EXPECT_EQ(s["results"]["value"].get<double>(), expected);
  EXPECT_TRUE(fs::exists(dir / "eval.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "profile.gp"));
}

TEST_F(Cli, ConfigRoundTripIsByteIdentical) {
  ASSERT_EQ(invoke({"norms", "--profile", "one-minus-r", "--grid", "n=1024", "--random", "5", "--seed", "3", "--out", (dir / "a").string()}).code,
            exit_ok);
  const auto first = slurp(dir / "a" / "summary.json");
  ASSERT_EQ(invoke({"norms", "--config", (dir / "a" / "summary.json").string(), "--out", (dir / "b").string()}).code, exit_ok);
  EXPECT_EQ(slurp(dir / "b" / "summary.json"), first);
  EXPECT_EQ(slurp(dir / "b" / "random_margins.csv"), slurp(dir / "a" / "random_margins.csv"));
}

TEST_F(Cli, FlagsOverrideConfig) {
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"profile": "moser", "k": 4, "grid": "n=512"})";
  ASSERT_EQ(invoke({"norms", "--config", (dir / "cfg.json").string(), "--k", "16", "--out", (dir / "o").string()}).code, exit_ok);
  auto s = summary(dir / "o");
  EXPECT_EQ(s["config"]["k"].get<double>(), 16.0);
  EXPECT_EQ(s["config"]["grid"].get<std::string>(), "n=512,grading=double,angles=256,tmax=40,gapmin=9.9999999999999998e-13");
}

TEST_F(Cli, InvarianceCsvHasMaxDefect) {
  auto r = invoke({"invariance", "--family", "mobius", "--spec", "hyperbolic-square", "--zeta", "0.6", "--grid", "n=512,angles=64",
                   "--out", dir.string()});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  const auto csv = slurp(dir / "invariance.csv");
  EXPECT_NE(csv.substr(0, csv.find('\n')).find("max_defect"), std::string::npos);
}

TEST_F(Cli, ValidationErrors) {
  EXPECT_EQ(invoke({"eval", "--functional", "bogus", "--out", dir.string()}).code, exit_validation);
  EXPECT_EQ(invoke({"eval", "--p", "abc", "--out", dir.string()}).code, exit_validation);
  EXPECT_EQ(invoke({"transform", "--kind", "mobius", "--zeta", "1.5", "--grid", "n=64,angles=8", "--out", dir.string()}).code,
            exit_validation);
  EXPECT_EQ(invoke({"frobnicate"}).code, exit_validation);
  EXPECT_EQ(invoke({"report", "--inputs", (dir / "missing").string(), "--out", dir.string()}).code, exit_validation);
}

TEST_F(Cli, UnwritableOutput) {
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(invoke({"eval", "--out", (dir / "file" / "sub").string()}).code, exit_unwritable);
}

TEST_F(Cli, ReportAggregates) {
  ASSERT_EQ(invoke({"eval", "--grid", "n=256", "--out", (dir / "e").string()}).code, exit_ok);
  ASSERT_EQ(invoke({"onofri", "--grid", "n=512", "--ensemble", "linear", "--out", (dir / "o").string()}).code, exit_ok);
  auto r = invoke({"report", "--inputs", (dir / "e").string() + "," + (dir / "o").string(), "--out", (dir / "d").string()});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  auto d = nlohmann::json::parse(slurp(dir / "d" / "dossier.json"));
  EXPECT_EQ(d["entries"].size(), 2u);
  EXPECT_NE(slurp(dir / "d" / "dossier.csv").find("constant"), std::string::npos);
}

TEST_F(Cli, SubcommandsRunOnSmallGrids) {
  const std::string g = "n=256,angles=32";
  std::vector<std::vector<std::string>> cmds = {
      {"transform", "--kind", "dilate", "--s", "2", "--profile", "moser", "--k", "8"},
      {"transform", "--kind", "mobius", "--profile", "bump", "--zeta", "0.3,0.5i"},
      {"transform", "--kind", "rearrange", "--profile", "bump", "--center", "0.2+0.1i", "--radius", "0.3"},
      {"sequence", "--kind", "dilation", "--ks", "1,64"},
      {"maximize", "--functional", "tm", "--steps", "20"},
      {"invariance", "--family", "dilation", "--spec", "hardy-origin-integrand"},
  };
  int i = 0;
  for (auto c : cmds) {
    const auto out = dir / std::to_string(i++);
    c.insert(c.end(), {"--grid", g, "--out", out.string()});
    auto r = invoke(c);
    EXPECT_EQ(r.code, exit_ok) << c[0] << ": " << r.err;
    EXPECT_TRUE(fs::exists(out / "summary.json")) << c[0];
  }
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, exit_ok); }

}  // namespace
}  // namespace moserlab::cli
