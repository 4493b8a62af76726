#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include "ccmfbm/version.hpp"
#include "ccmfbm_cli/cli.hpp"

namespace fs = std::filesystem;
namespace cli = ccmfbm::cli;
using cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "ccmfbm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate is byte-identical across reruns and worker counts") {
  const std::vector<std::string> args{"simulate", "--a", "1", "--b", "3", "--hurst", "0.75",
                                      "--grid-n", "500", "--horizon", "1", "--paths", "1", "--seed", "7"};
  const Result first = invoke(args);
  REQUIRE(first.code == cli::kExitOk);
  setenv("CCMFBM_THREADS", "3", 1);
  const Result second = invoke(args);
  unsetenv("CCMFBM_THREADS");
  CHECK(first.out == second.out);
  const auto rows = lines(first.out);
  CHECK(rows.front() == "path_id,t,x,w,bh");
  CHECK(rows.size() == 502);
  CHECK(rows[1] == "0,0,0,0,0");
  CHECK(first.out.find('\r') == std::string::npos);
}

TEST_CASE("simulate writes JSON with a meta block") {
  const fs::path file = scratch_dir() / "sim.json";
  const Result r = invoke({"simulate", "--grid-n", "8", "--paths", "2", "--seed", "3", "--scheme",
                           "mg_approx", "--format", "json", "--output", file.string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(slurp(file));
  CHECK(doc["meta"]["version"] == ccmfbm::kVersion);
  CHECK(doc["meta"]["config"]["seed"] == 3);
  CHECK(doc["meta"]["config"]["scheme"] == "mg_approx");
  CHECK(doc["columns"] == nlohmann::json::array({"path_id", "t", "x", "w", "bh"}));
  CHECK(doc["rows"].size() == 18);
  CHECK(doc["rows"][0].size() == 5);
  CHECK(doc["rows"][0][2] == 0.0);
}

TEST_CASE("kernel curves") {
  const Result inv = invoke({"kernel", "--hurst", "0.75", "--t", "1", "--curve", "l-inverse", "--grid-n", "50"});
  REQUIRE(inv.code == cli::kExitOk);
  const auto rows = lines(inv.out);
  CHECK(rows.front() == "s,l_inverse");
  CHECK(rows.size() == 51);
  const Result gamma = invoke({"kernel", "--curve", "gamma", "--k", "1,2,3", "--grid-n", "10"});
  REQUIRE(gamma.code == cli::kExitOk);
  CHECK(lines(gamma.out).front() == "s,gamma_1,gamma_2,gamma_3");
}

TEST_CASE("cov, invert and estimate-drift") {
  const Result cov = invoke({"cov", "--grid-n", "4"});
  REQUIRE(cov.code == cli::kExitOk);
  CHECK(lines(cov.out).size() == 11);
  const Result op = invoke({"invert", "--operator", "forward", "--grid-n", "4"});
  REQUIRE(op.code == cli::kExitOk);
  CHECK(lines(op.out).front() == "row,col,value");

  const fs::path paths = scratch_dir() / "paths.csv";
  REQUIRE(invoke({"simulate", "--grid-n", "32", "--paths", "3", "--seed", "5", "--output", paths.string()}).code ==
          cli::kExitOk);
  const std::string before = slurp(paths);
  const Result rec = invoke({"invert", "--input", paths.string(), "--grid-n", "32"});
  REQUIRE(rec.code == cli::kExitOk);
  CHECK(lines(rec.out).front() == "path_id,t,x,w");
  CHECK(lines(rec.out).size() == 100);
  const Result est = invoke({"estimate-drift", "--input", paths.string()});
  REQUIRE(est.code == cli::kExitOk);
  CHECK(lines(est.out).front() == "path_id,theta_hat,terminal_w");
  CHECK(lines(est.out).size() == 4);
  CHECK(slurp(paths) == before);
}

TEST_CASE("predict writes means, variances and the covariance table") {
  const fs::path cov = scratch_dir() / "pred_cov.csv";
  const Result r = invoke({"predict", "--grid-n", "40", "--paths", "2", "--u", "0.5", "--targets", "0.5,1",
                           "--cov-output", cov.string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto rows = lines(r.out);
  CHECK(rows.front() == "path_id,t,mean,variance");
  CHECK(rows.size() == 5);
  CHECK(std::abs(std::stod(rows[1].substr(rows[1].rfind(',') + 1))) < 1e-10);
  const auto cov_rows = lines(slurp(cov));
  CHECK(cov_rows.front() == "t,s,cov");
  CHECK(cov_rows.size() == 5);
}

TEST_CASE("demo writes the preset files") {
  const fs::path dir = scratch_dir() / "demo";
  fs::remove_all(dir);
  REQUIRE(invoke({"demo", "--output-dir", dir.string()}).code == cli::kExitOk);
  for (const char* name : {"gamma_summands_h0.6.csv", "gamma_summands_h0.75.csv", "gamma_summands_h0.9.csv",
                           "kernel_l.csv", "kernel_l_inverse.csv", "path_a0.4_b1.4_h0.6.csv",
                           "path_a1_b3_h0.75.csv", "path_a4_b9_h0.9.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / name), name);
  }
  CHECK(lines(slurp(dir / "path_a1_b3_h0.75.csv")).size() == 502);
}

TEST_CASE("verify runs selected criteria") {
  const fs::path report = scratch_dir() / "verify.json";
  const Result r = invoke({"verify", "--level", "desk", "--criteria", "3,11", "--output", report.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("2/2 criteria passed") != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["results"].size() == 2);
  CHECK(doc["results"][0]["passed"] == true);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--paths", "x"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--help"}).code == cli::kExitOk);
  CHECK(invoke({"simulate", "--hurst", "0.3"}).code == cli::kExitValidation);
  CHECK(invoke({"predict", "--grid-n", "10", "--u", "0.55"}).code == cli::kExitValidation);
  CHECK(invoke({"estimate-drift", "--input", "/nonexistent/paths.csv"}).code == cli::kExitValidation);
  const Result numeric = invoke({"kernel", "--a", "1", "--b", "3", "--curve", "l-inverse", "--grid-n", "50"});
  CHECK(numeric.code == cli::kExitNumerical);
  CHECK(!numeric.err.empty());
}
