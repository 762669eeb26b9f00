#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "liesys/cli.hpp"
#include "liesys/reach_sim.hpp"
#include "liesys/spec_file.hpp"

using namespace liesys;

namespace {

const std::string kData = LIESYS_DATA_DIR;
const std::string kTestData = LIESYS_TEST_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string file(const std::string& name) { return kData + "/systems/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l == line) return true;
  return false;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("liesys_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, DecomposeEuclideanDiagonal) {
  const Result r = run_cli({"decompose", "--system", file("euclid_diag.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "block_dims=1/1/1")) << r.out;
  EXPECT_TRUE(has_line(r.out, "eigenvalues=2,1,0.5"));
  EXPECT_TRUE(has_line(r.out, "family=euclidean"));
}

TEST(Cli, ClassifyAff2Preset) {
  const Result r = run_cli({"classify", "--preset", "aff2-theorem39"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verdict=Controllable [T3.9]")) << r.out;
  EXPECT_TRUE(has_line(r.out, "check.T3.9.accessible=true (h'(0)=1 g'(0)=0)"));
}

TEST(Cli, ClassifyHeisenbergExample) {
  const Result r = run_cli({"classify", "--system", file("heisenberg_example.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "theorem=T4.3")) << r.out;
  EXPECT_TRUE(has_line(r.out, "g_equals_g0=true"));
  // Not Controllable: the reachable set from e lies in a half space (see test_controllability).
  EXPECT_TRUE(has_line(r.out, "verdict=Inconclusive [T4.3]")) << r.out;
}

TEST(Cli, ClassifyEuclideanUnstable) {
  const Result r = run_cli({"classify", "--system", file("euclid_diag.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verdict=NotControllable [EUC]")) << r.out;
}

TEST(Cli, AccessibilityReport) {
  const Result r = run_cli({"accessibility", "--preset", "heisenberg-paper"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "gamma_plus_rank=3/3")) << r.out;
  EXPECT_TRUE(has_line(r.out, "forward_accessible=true"));
}

TEST(Cli, VerifyPasses) {
  for (const std::string& f : {"heisenberg_example.json", "euclid_diag.json", "aff2_ctrl.json"}) {
    const Result r = run_cli({"verify", "--system", file(f)});
    EXPECT_EQ(r.code, 0) << f << r.out << r.err;
    EXPECT_TRUE(has_line(r.out, "verified=true")) << f;
  }
}

TEST(Cli, SimulateGoldenCsv) {
  const auto path = temp_file("aff2.csv");
  const Result r = run_cli({"simulate", "--system", file("aff2_ctrl.json"), "--steps", "6", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "points=10815")) << r.out;
  const std::string got = slurp(path.string());
  EXPECT_EQ(got.rfind("k,x1,x2\n", 0), 0u);
  EXPECT_EQ(got.find('\r'), std::string::npos);
  EXPECT_EQ(got, slurp(kTestData + "/aff2_ctrl_steps6.csv"));
  std::filesystem::remove(path);
}

TEST(Cli, SimulateCoverage) {
  const Result r = run_cli({"simulate", "--preset", "aff2-theorem39", "--steps", "3", "--box-lo", "0.5,-0.5",
                            "--box-hi", "1.5,0.5", "--res", "0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("coverage="), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"classify", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"classify"}).code, 2);
  EXPECT_EQ(run_cli({"classify", "--preset", "nope"}).code, 2);
  EXPECT_EQ(run_cli({"classify", "--system", "/nonexistent/file.json"}).code, 2);
  EXPECT_EQ(run_cli({"classify", "--preset", "aff2-theorem39", "--system", file("aff2_ctrl.json")}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--preset", "aff2-theorem39", "--box-lo", "0", "--box-hi", "1"}).code, 2);
  // The coverage grid guard is a resource error.
  const Result big = run_cli({"simulate", "--preset", "aff2-theorem39", "--box-lo", "-1000,-1000", "--box-hi",
                              "1000,1000", "--res", "0.01"});
  EXPECT_EQ(big.code, 3);
  EXPECT_EQ(big.out.find("coverage="), std::string::npos);
  EXPECT_EQ(run_cli({"classify", "--help"}).code, 0);
}

TEST(Cli, BadSpecsAreSpecErrors) {
  const auto path = temp_file("bad.json");
  for (const std::string& body :
       {std::string("{not json"), std::string(R"({"family": "klein"})"),
        std::string(R"({"family": "aff2", "a": 1, "d": 0, "h_coeffs": [1, 1], "g_coeffs": [0],
                        "control": {"kind": "box", "lo": [-1], "hi": [1]}})"),
        std::string(R"({"family": "aff2", "a": 1, "d": 1, "h_coeffs": [2, 1], "g_coeffs": [0],
                        "control": {"kind": "box", "lo": [-1], "hi": [1]}})"),
        std::string(R"({"family": "euclidean", "A": [[1, 0], [0, 0]], "B": [[1], [0]],
                        "control": {"kind": "box", "lo": [-1], "hi": [1]}})")}) {
    std::ofstream(path) << body;
    const Result r = run_cli({"decompose", "--system", path.string()});
    EXPECT_EQ(r.code, 2) << body << r.out;
    EXPECT_FALSE(r.err.empty());
  }
  std::filesystem::remove(path);
}

TEST(SpecFile, RoundTrip) {
  for (const std::string& f : {"heisenberg_example.json", "euclid_diag.json", "aff2_ctrl.json"}) {
    const SystemSpec s = load_spec(file(f));
    EXPECT_EQ(spec_from_json(spec_to_json(s)), s) << f;
    EXPECT_EQ(parse_spec(spec_to_json(s).dump()), s) << f;
  }
  for (const auto& name : preset_names()) {
    const SystemSpec s = preset_spec(name);
    EXPECT_EQ(parse_spec(spec_to_json(s).dump(2)), s) << name;
  }
  SystemSpec fin = preset_spec("aff2-theorem39");
  fin.control = ControlSpec{"finite", {}, {}, {{-0.25}, {0.0}, {0.25}}};
  EXPECT_EQ(parse_spec(spec_to_json(fin).dump()), fin);
}

TEST(SpecFile, NilpotentStructureConstants) {
  // The Heisenberg algebra written out by brackets: [e2, e3] = e1. beta is in exponential
  // coordinates: log of (-u/2 - u^2/3, u, -u/2) is (-u/2 - u^2/12, u, -u/2).
  const std::string text = R"({
    "name": "heis-sc", "family": "nilpotent", "dim": 3,
    "structure": [[1, 2, 0, 1], [2, 1, 0, -1]],
    "f0": [[1, 1, 0], [0, 1, 0], [0, 1, 1]],
    "beta": {"inputs": 1, "components": [
      [{"coeff": -0.5, "powers": [1]}, {"coeff": -0.08333333333333333, "powers": [2]}],
      [{"coeff": 1, "powers": [1]}],
      [{"coeff": -0.5, "powers": [1]}]]},
    "control": {"kind": "box", "lo": [-1], "hi": [1]}
  })";
  const SystemSpec s = parse_spec(text);
  EXPECT_EQ(parse_spec(spec_to_json(s).dump()), s);
  const LinearSystem sc = build_system(s);
  const LinearSystem heis = build_system(preset_spec("heisenberg-paper"));
  EXPECT_EQ(sc.group_class(), GroupClass::NilpotentSC);
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const GroupElement g = random_group(heis.model, rng);
    const Vector u = Vector::Constant(1, uniform(rng, -1, 1));
    // Exponential and Heisenberg chart coordinates differ, so compare through log.
    const Vector a = log(sc.model, sc.apply(exp(sc.model, log(heis.model, g)), u)).coords;
    const Vector b = log(heis.model, heis.apply(g, u)).coords;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Presets, Digests) {
  EXPECT_EQ(system_digest(build_system(preset_spec("heisenberg-paper"))), "7c52b65d7289954a");
  EXPECT_EQ(system_digest(build_system(preset_spec("aff2-theorem39"))), "6c73eafd6da0bb11");
  // The example files describe the same systems.
  EXPECT_EQ(system_digest(build_system(load_spec(file("heisenberg_example.json")))), "7c52b65d7289954a");
  EXPECT_EQ(system_digest(build_system(load_spec(file("aff2_ctrl.json")))), "6c73eafd6da0bb11");
  EXPECT_THROW(preset_spec("nope"), ArgumentError);
}

TEST(Presets, MatchWorkedSystems) {
  const LinearSystem heis = build_system(preset_spec("heisenberg-paper"));
  Rng rng(32);
  for (int i = 0; i < 20; ++i) {
    const GroupElement x = random_group(heis.model, rng);
    const double u = uniform(rng, -1, 1);
    const GroupElement want{x[0] + x[1] + x[1] * x[1] / 2 + u * x[1] + u * x[2] - u / 2 - u * u / 3, x[1] + u,
                            x[1] + x[2] - u / 2};
    EXPECT_LE(chart_distance(heis.apply(x, Vector::Constant(1, u)), want), 1e-12);
  }
  const LinearSystem aff = build_system(preset_spec("aff2-theorem39"));
  const GroupElement g{1.5, -0.25};
  const double u = 0.3;
  // (h(u) x, a (x - 1) + d y + g(u) x) with a = d = 1, h = 1 + u, g = 0.
  EXPECT_LE(chart_distance(aff.apply(g, Vector::Constant(1, u)), GroupElement{1.3 * 1.5, 0.5 - 0.25}), 1e-15);
}
