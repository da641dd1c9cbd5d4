#include <fstream>
#include <sstream>

#include "harness/config.hpp"
#include "harness/dispatch.hpp"
#include "harness/initial_map.hpp"
#include "harness/report_io.hpp"
#include "support.hpp"

namespace lojvar::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lojvar_harness_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config_error);
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return {};
}

TEST(ParseConfig, MinimalConfigGetsDefaults) {
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 128}})");
  EXPECT_EQ(c.domain.n_nodes, 128);
  EXPECT_EQ(c.domain.diff_order, 2);
  EXPECT_EQ(c.target.kind, "sphere");
  EXPECT_EQ(c.target.ambient_dim, 3);
  EXPECT_EQ(c.base_map.degree, 1);
  EXPECT_EQ(c.perturbation.seed, 0u);
  EXPECT_EQ(c.flow.integrator, Integrator::projected_rk4);
  EXPECT_DOUBLE_EQ(c.flow.dt_factor, 0.2);
}

TEST(ParseConfig, ValidationNamesTheField) {
  EXPECT_NE(config_error_message(R"({"domain": {"n_nodes": 7}})").find("domain.n_nodes"), std::string::npos);
  EXPECT_NE(config_error_message(R"({"mesh_size": 10})").find("mesh_size"), std::string::npos);
  EXPECT_NE(config_error_message(R"({"flow": {"dt": 0.1}})").find("flow.dt"), std::string::npos);
  EXPECT_NE(config_error_message(R"({"flow": {"dt_factor": 0.7}})").find("flow.dt_factor"), std::string::npos);
  EXPECT_NE(config_error_message(R"({"target": {"kind": "torus"}})").find("target.kind"), std::string::npos);
  EXPECT_NE(config_error_message(R"({"domain": {"n_nodes": "many"}})").find("domain.n_nodes"), std::string::npos);
}

TEST(ParseConfig, ParseErrorsReportLine) {
  const std::string msg = config_error_message("{\n  \"domain\": {\n    \"n_nodes\": ,\n  }\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ParseConfig, PolynomialTerms) {
  const RunConfig c = parse_config(R"({"finite": {"polynomials": [
      {"name": "q", "dim": 2, "terms": [[[2, 0], 1.0], [[0, 4], 2.0]],
       "critical_point": [0, 0], "box": {"lo": [-1, -1], "hi": [1, 1]}}]}})");
  ASSERT_EQ(c.finite.polynomials.size(), 1u);
  const auto& p = c.finite.polynomials[0].polynomial;
  EXPECT_DOUBLE_EQ(p.value((Vec(2) << 2.0, 1.0).finished()), 6.0);
  EXPECT_NE(config_error_message(R"({"finite": {"polynomials": [{"name": "bad", "dim": 1, "terms": [[[2, 1], 1.0]], "critical_point": [0]}]}})")
                .find("finite.polynomials[0].terms[0]"),
            std::string::npos);
}

TEST(ParseConfig, EchoRoundTrips) {
  const RunConfig c = parse_config(R"({"perturbation": {"seed": 9, "amplitude": 0.01}, "output": {"stride": 5}})");
  const RunConfig back = parse_config(config_to_json(c).dump());
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
}

TEST(InitialMap, AmplitudeZeroIsGreatCircle) {
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 32}, "perturbation": {"amplitude": 0.0}})");
  const MapState u = make_initial_map(c);
  EXPECT_EQ((u.values - great_circle(u.mesh, 3, 1)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(InitialMap, DeterministicAndBounded) {
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 128}, "perturbation": {"seed": 7, "amplitude": 0.05}})");
  const MapState a = make_initial_map(c);
  const MapState b = make_initial_map(c);
  EXPECT_EQ((a.values - b.values).cwiseAbs().maxCoeff(), 0.0);
  const double c0 = c0_norm(a.values - great_circle(a.mesh, 3, 1));
  EXPECT_GT(c0, 0.0);
  EXPECT_LE(c0, 0.05 * c.perturbation.mode_count);
}

TEST(InitialMap, AmplitudeMustStayInsideTube) {
  const RunConfig c = parse_config(R"({"perturbation": {"amplitude": 0.5}})");
  EXPECT_LOJVAR_ERROR(make_initial_map(c), config_error);
}

TEST(InitialMap, BaseMapFromFile) {
  const fs::path dir = scratch_dir("basemap");
  const auto mesh = DomainMesh::circle(16);
  write_node_csv(dir / "base.csv", great_circle(mesh, 3, 2));
  RunConfig c = parse_config(R"({"domain": {"n_nodes": 16}, "perturbation": {"amplitude": 0.0}})");
  c.base_map.file = (dir / "base.csv").string();
  EXPECT_EQ((make_initial_map(c).values - great_circle(mesh, 3, 2)).cwiseAbs().maxCoeff(), 0.0);
  c.domain.n_nodes = 32;
  EXPECT_LOJVAR_ERROR(make_initial_map(c), config_error);
}

TEST(ReportIo, NodeCsvRoundTripIsExact) {
  const fs::path dir = scratch_dir("csv");
  NodeField f(3, 2);
  f << 0.1, -1.0 / 3.0, 1e-300, 2.5e10, -0.0, 7.0;
  write_node_csv(dir / "f.csv", f);
  EXPECT_EQ((read_node_csv(dir / "f.csv") - f).cwiseAbs().maxCoeff(), 0.0);
  write_text(dir / "ragged.csv", "1,2\n3\n");
  EXPECT_LOJVAR_ERROR(read_node_csv(dir / "ragged.csv"), io_error);
}

TEST(Dispatch, UnknownSubcommand) {
  std::ostringstream out;
  EXPECT_LOJVAR_ERROR(dispatch("flow-walk", RunConfig{}, scratch_dir("unknown"), out), invalid_argument);
}

TEST(Dispatch, FlowRunWritesArtifacts) {
  const fs::path dir = scratch_dir("flow");
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 64}, "perturbation": {"seed": 7}, "output": {"stride": 10}})");
  std::ostringstream out;
  dispatch("flow-run", c, dir, out);
  for (const char* f : {"trace.csv", "rate_fit.json", "config_echo.json", "final_map.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace.rfind("t,energy,grad_norm,dist_to_limit\n", 0), 0u);
  const auto rate = nlohmann::json::parse(slurp(dir / "rate_fit.json"));
  EXPECT_EQ(rate["version"], kVersionString);
  EXPECT_TRUE(rate["converged"].get<bool>());
  EXPECT_EQ(rate["fit"]["preferred"], "exponential");
  // The last trace row is always present, whatever the stride.
  const auto last_line = trace.substr(trace.rfind('\n', trace.size() - 2) + 1);
  EXPECT_EQ(std::stod(last_line), rate["final_time"].get<double>());
}

TEST(Dispatch, ReduceRunReportsKernelDimension) {
  const fs::path dir = scratch_dir("reduce");
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 64}, "reduction": {"sandwich_samples": 2}})");
  std::ostringstream out;
  dispatch("reduce-run", c, dir, out);
  const auto rep = nlohmann::json::parse(slurp(dir / "reduction.json"));
  EXPECT_EQ(rep["kernel_dimension"], 3);
  EXPECT_TRUE(rep["integrability"]["integrable"].get<bool>());
  EXPECT_TRUE(rep["sandwich"]["pass_rate"].is_null());
}

TEST(Dispatch, FiniteVerifyQuartic) {
  const fs::path dir = scratch_dir("finite");
  const RunConfig c = parse_config(R"({"finite": {"polynomials": [
      {"name": "x4", "dim": 1, "terms": [[[4], 1.0]], "critical_point": [0], "box": {"lo": [-1], "hi": [1]}, "grid_n": 201}]}})");
  std::ostringstream out;
  dispatch("finite-verify", c, dir, out);
  const auto rep = nlohmann::json::parse(slurp(dir / "finite_verify.json"));
  EXPECT_NEAR(rep["results"][0]["gradient"]["theta"].get<double>(), 0.75, 0.01);
  EXPECT_NEAR(rep["results"][0]["distance"]["alpha"].get<double>(), 4.0, 0.05);
}

TEST(Dispatch, EnergyEvalIsReproducible) {
  const RunConfig c = parse_config(R"({"domain": {"n_nodes": 64}, "perturbation": {"seed": 3}})");
  std::ostringstream a;
  std::ostringstream b;
  dispatch("energy-eval", c, scratch_dir("e1"), a);
  dispatch("energy-eval", c, scratch_dir("e2"), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("\"tension_norm\""), std::string::npos);
}

}  // namespace
}  // namespace lojvar::harness
