#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "helfrich/mesh_io.hpp"

using namespace helfrich;
using nlohmann::json;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run lab(std::vector<std::string> args) {
  args.insert(args.begin(), "helfrich-lab");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "helfrich_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string write_grid() {
  const fs::path p = scratch("grid.json");
  std::ofstream(p) << R"({"c0": [0, 1, 2], "lambda": [-1, 0, 1, 2], "p": [-1, -0.75, 0]})";
  return p.string();
}

} // namespace

TEST_CASE("classify reports the two-radius case") {
  const Run r = lab({"classify", "--c0", "2", "--p", "-0.75"});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["verdict"] == "TwoRadii");
  CHECK(j["radii"][0].get<double>() == Approx(4.0 / 3.0));
  CHECK(j["radii"][1].get<double>() == 4.0);
  CHECK(j["boundedness"] == "Plausible");
}

TEST_CASE("parameter validation exits with code 2") {
  CHECK(lab({"classify", "--kc", "0"}).code == cli::kValidation);
  CHECK(lab({"classify", "--kc", "-1"}).code == cli::kValidation);
  CHECK(lab({"classify", "--bogus", "1"}).code == cli::kValidation);
  CHECK(lab({"certify", "--c0", "2", "--lambda", "3", "--p", "-2", "--a0", "1"}).code == cli::kValidation);
  CHECK(lab({"perturb", "--r", "1", "--mode", "2,0,1.5", "--out", scratch("x.obj").string()}).code ==
        cli::kValidation);
  CHECK(lab({"flow", "--mesh", scratch("nothing_here.obj").string()}).code == cli::kMissingFile);
  CHECK(lab({"energy", "--mesh", scratch("nothing_here.obj").string()}).code == cli::kMissingFile);
  CHECK(lab({"--help"}).code == cli::kOk);
}

TEST_CASE("config file and flag override") {
  const fs::path cfg = scratch("params.json");
  std::ofstream(cfg) << R"({"c0": 2, "p": -0.75})";
  json j = json::parse(lab({"classify", "--config", cfg.string()}).out);
  CHECK(j["verdict"] == "TwoRadii");
  j = json::parse(lab({"classify", "--config", cfg.string(), "--p", "0"}).out);
  CHECK(j["params"]["p"] == 0.0);

  const fs::path bad = scratch("bad.json");
  std::ofstream(bad) << R"({"c0": 2, "tension": 1})";
  CHECK(lab({"classify", "--config", bad.string()}).code == cli::kValidation);
}

TEST_CASE("sweep covers the grid in order") {
  const fs::path out = scratch("sweep.csv");
  const Run r = lab({"sweep", "--grid", write_grid(), "--out", out.string()});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 1 + 3 * 4 * 3);
  CHECK(rows[0] == "c0,lambda,p,verdict,r1,r2,E1,E2,boundedness,literal_agrees");
  CHECK(rows[1].rfind("0,-1,-1,", 0) == 0);
  CHECK(rows.back().rfind("2,2,0,", 0) == 0);
  bool two = false;
  for (const auto& row : rows) two |= row.rfind("2,0,-0.75,TwoRadii,", 0) == 0;
  CHECK(two);
  CHECK(fs::exists(out.string() + ".manifest.json"));

  // certificate columns
  const Run c = lab({"sweep", "--grid", write_grid(), "--a0", "0.5"});
  REQUIRE(c.code == cli::kOk);
  const auto crow = lines(c.out);
  CHECK(crow[0].ends_with(",certificate,h1_min"));
  bool gate = false;
  for (const auto& row : crow) gate |= row.find("gate: ") != std::string::npos;
  CHECK(gate);

  CHECK(lab({"sweep"}).code == cli::kValidation);
}

TEST_CASE("sweep output is deterministic") {
  const Run a = lab({"sweep", "--grid", write_grid(), "--a0", "1"});
  const Run b = lab({"sweep", "--grid", write_grid(), "--a0", "1"});
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
}

TEST_CASE("certify reproduces the worked example") {
  const Run r = lab({"certify", "--c0", "2", "--lambda", "3", "--p", "-3", "--a0", "1"});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["kind"] == "PositiveLowerBound");
  CHECK(j["h1_min"].get<double>() == Approx((4 - std::sqrt(12.0)) / 2).epsilon(1e-9));
}

TEST_CASE("icosphere, energy and mesh-info") {
  const fs::path mesh = scratch("ico5.obj");
  REQUIRE(lab({"icosphere", "--subdiv", "5", "--r", "1", "--out", mesh.string()}).code == cli::kOk);
  CHECK(fs::exists(mesh.string() + ".manifest.json"));
  const TriMesh m = read_mesh(mesh);
  CHECK(m.num_vertices() == 10242);

  const Run e = lab({"energy", "--mesh", mesh.string()});
  REQUIRE(e.code == cli::kOk);
  CHECK(json::parse(e.out)["breakdown"]["bending"].get<double>() == Approx(8 * std::numbers::pi).epsilon(0.01));

  const Run info = lab({"mesh-info", "--mesh", mesh.string()});
  REQUIRE(info.code == cli::kOk);
  CHECK(json::parse(info.out).dump().find("10242") != std::string::npos);
}

TEST_CASE("perturb, mildness and flow end to end") {
  const fs::path mesh = scratch("blob.obj");
  REQUIRE(lab({"perturb", "--r", "1", "--mode", "2,0,0.05", "--subdiv", "3", "--out", mesh.string()}).code ==
          cli::kOk);
  const json spec = json::parse(slurp(mesh.string() + ".spec.json"));
  CHECK(spec.dump().find("0.05") != std::string::npos);

  const Run mild = lab({"mildness", "--mesh", mesh.string()});
  REQUIRE(mild.code == cli::kOk);
  CHECK(mild.out.find("\"I\"") != std::string::npos);

  const fs::path out = scratch("flowed.obj"), trace = scratch("trace.csv"), report = scratch("report.json");
  const Run f = lab({"flow", "--mesh", mesh.string(), "--c0", "1", "--max-steps", "400", "--out", out.string(),
                     "--trace", trace.string(), "--report", report.string()});
  REQUIRE(f.code == cli::kOk);
  const auto rows = lines(slurp(trace));
  CHECK(rows[0] == "step,energy,gradNorm,maxAo2,fittedRadius,minH");
  CHECK(rows.size() > 2);
  const json rep = json::parse(slurp(report));
  CHECK(rep["monotone"] == true);
  CHECK(rep["final"]["fittedRadius"].get<double>() == Approx(2.0).epsilon(0.02));
  for (const auto& p : {out, trace, report}) CHECK(fs::exists(p.string() + ".manifest.json"));
  const json man = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(man["subcommand"] == "flow");
  CHECK(man["inputs"][0] == mesh.string());

  // OBJ output reads back
  CHECK(read_mesh(out).num_vertices() == read_mesh(mesh).num_vertices());

  // identical reruns give identical traces
  const fs::path trace2 = scratch("trace2.csv");
  lab({"flow", "--mesh", mesh.string(), "--c0", "1", "--max-steps", "400", "--trace", trace2.string()});
  CHECK(slurp(trace) == slurp(trace2));

  CHECK(lab({"flow", "--mesh", mesh.string(), "--direction", "newton"}).code == cli::kValidation);
}

TEST_CASE("degenerate flow exits with code 4 but keeps its outputs") {
  const fs::path mesh = scratch("ico2.obj");
  REQUIRE(lab({"icosphere", "--subdiv", "2", "--out", mesh.string()}).code == cli::kOk);
  const fs::path trace = scratch("degenerate.csv");
  const Run r = lab({"flow", "--mesh", mesh.string(), "--c0", "1", "--min-quality", "0.99", "--trace",
                     trace.string()});
  CHECK(r.code == cli::kNumerical);
  CHECK(fs::exists(trace));
}

TEST_CASE("residual CSV") {
  const fs::path mesh = scratch("ico3.obj"), csv = scratch("res.csv");
  REQUIRE(lab({"icosphere", "--subdiv", "3", "--r", "2", "--out", mesh.string()}).code == cli::kOk);
  const Run r = lab({"residual", "--mesh", mesh.string(), "--lambda", "1", "--p", "-1", "--csv", csv.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(lines(slurp(csv)).size() == 1 + 642);
  CHECK(json::parse(r.out)["sup"].get<double>() < 1e-2);
}
