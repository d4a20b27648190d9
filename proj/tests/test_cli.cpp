#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "renyi/errors.hpp"

using nlohmann::ordered_json;
using renyi::cli::run;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "renyi-maxent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("renyi_cli_test_" + name);
}

}  // namespace

TEST_CASE("solve at the reference mean") {
  const auto r = invoke({"solve", "--ref", "uniform:0,1", "--alpha", "0.5", "--kind", "C", "--m", "0.5"});
  REQUIRE(r.status == 0);
  const auto j = ordered_json::parse(r.out);
  CHECK(j["gamma_star"].get<double>() == 0.0);
  CHECK(std::abs(j["divergence"].get<double>()) <= 1e-12);
  CHECK(j["density_samples"].size() == 512);
  for (const char* key : {"alpha", "xi", "kind", "gamma_star", "lambda", "Z_solution", "Z_dual", "divergence",
                          "achieved_mean", "density_samples"})
    CHECK(j.contains(key));
}

TEST_CASE("solve kind G emits the achieved generalized mean") {
  const auto r = invoke({"solve", "--ref", "uniform:0,1", "--alpha", "0.5", "--kind", "G", "--m", "0.7", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto j = ordered_json::parse(r.out);
  CHECK(std::abs(j["achieved_mean"].get<double>() - 0.7) <= 1e-6);
  CHECK(j["xi"].get<double>() == -2.0);
  CHECK(j["kind"] == "G");
}

TEST_CASE("JSON output round-trips byte for byte") {
  const auto r = invoke({"solve", "--ref", "exponential:1", "--alpha", "0.8", "--kind", "C", "--m", "0.9"});
  REQUIRE(r.status == 0);
  CHECK(renyi::cli::dump_json(ordered_json::parse(r.out)) == r.out);
  const auto s = invoke({"sweep", "--alpha", "0.5", "--m", "0.5", "--gamma-lo=-3", "--gamma-hi", "3", "--grid-n", "64"});
  REQUIRE(s.status == 0);
  CHECK(renyi::cli::dump_json(ordered_json::parse(s.out)) == s.out);
}

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({"solve", "--alpha", "1.0", "--m", "0.5"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0", "--m", "0.5"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0.5"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0.5", "--m", "0.5", "--kind", "Q"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0.5", "--m", "0.5", "--format", "xml"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0.5", "--m", "0.5", "--ref", "cauchy:0,1"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "0.5", "--m", "0.5", "--ref", "uniform:1,1"}).status == 1);
  CHECK(invoke({"solve", "--alpha", "abc", "--m", "0.5"}).status == 1);
  CHECK(invoke({"bogus"}).status == 1);
  CHECK(invoke({}).status == 1);
  const auto r = invoke({"verify", "--suite", "nonsense"});
  CHECK(r.status == 1);
  CHECK(r.err.find("nonsense") != std::string::npos);
}

TEST_CASE("unattainable constraint exits 2 and names the closest mean") {
  const auto r = invoke({"solve", "--alpha", "0.5", "--m", "0.7", "--gamma-lo=-0.1", "--gamma-hi", "0.1"});
  CHECK(r.status == 2);
  CHECK(r.err.find("closest") != std::string::npos);
}

TEST_CASE("CSV output has comment lines and a header row") {
  const auto r = invoke({"solve", "--alpha", "0.5", "--m", "0.6", "--format", "csv"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::size_t comments = 0, data = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      ++comments;
    } else if (line == "x,density") {
      header = true;
    } else {
      ++data;
    }
  }
  CHECK(header);
  CHECK(comments >= 9);
  CHECK(data == 512);
  CHECK(r.out.find("# gamma_star=") != std::string::npos);
}

TEST_CASE("sweep on uniform: monotone mean on the central interval") {
  const auto r = invoke({"sweep", "--alpha", "0.5", "--kind", "C", "--m", "0.5", "--gamma-lo=-3", "--gamma-hi", "3",
                         "--grid-n", "128"});
  REQUIRE(r.status == 0);
  const auto j = ordered_json::parse(r.out);
  REQUIRE(j["intervals"].size() == 1);
  const double lo = j["intervals"][0][0].get<double>(), hi = j["intervals"][0][1].get<double>();
  CHECK(lo == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(hi == doctest::Approx(2.0).epsilon(1e-9));
  double prev = INFINITY;
  for (const auto& row : j["rows"]) {
    if (!row[5].get<bool>()) continue;
    const double mean = row[3].get<double>();
    CHECK(mean < prev);
    prev = mean;
  }
  CHECK(j["non_injective"] == false);
}

TEST_CASE("sweep over an undefined range exits 2") {
  const auto r = invoke({"sweep", "--alpha", "0.5", "--m", "0.5", "--gamma-lo", "3", "--gamma-hi", "5", "--grid-n", "64"});
  CHECK(r.status == 2);
  CHECK(invoke({"sweep", "--alpha", "0.5", "--m", "0.5"}).status == 1);
}

TEST_CASE("sweep on a gamma reference, kind G") {
  const auto r = invoke({"sweep", "--ref", "gamma:1.2,1", "--alpha", "0.5", "--kind", "G", "--m", "1.0",
                         "--gamma-lo=-2", "--gamma-hi", "2", "--grid-n", "64", "--format", "csv"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("gamma,dual,z,mean_classical,mean_generalized,defined") != std::string::npos);
  CHECK(r.out.find("# non_injective=") != std::string::npos);
}

TEST_CASE("tabulated references from a file") {
  const auto path = temp_file("tab.txt");
  {
    std::ofstream f(path);
    f << "# flat reference\n0\t1\n0.5\t1\n\n1\t1\n1.5\t1\n";
  }
  const auto r = invoke({"solve", "--ref", "@" + path.string(), "--alpha", "0.5", "--m", "0.75"});
  REQUIRE(r.status == 0);
  CHECK(ordered_json::parse(r.out)["gamma_star"].get<double>() == 0.0);
  {
    std::ofstream f(path);
    f << "0\t1\n1\t1\n0.5\t1\n2\t1\n";
  }
  CHECK(invoke({"solve", "--ref", "@" + path.string(), "--alpha", "0.5", "--m", "0.7"}).status == 1);
  CHECK(invoke({"solve", "--ref", "@/nonexistent/file", "--alpha", "0.5", "--m", "0.7"}).status == 1);
  std::filesystem::remove(path);

  std::istringstream bad("0 1\n");
  CHECK_THROWS_AS(renyi::cli::parse_tabulated(bad), renyi::InvalidParameter);
  std::istringstream good("#c\n0\t0\n1\t2\n2\t0\n3\t0\n");
  CHECK(renyi::cli::parse_tabulated(good).size() == 4);
}

TEST_CASE("output file") {
  const auto path = temp_file("out.json");
  const auto r = invoke({"solve", "--alpha", "0.5", "--m", "0.6", "--output", path.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ordered_json::parse(ss.str())["m"].get<double>() == 0.6);
  std::filesystem::remove(path);
}

TEST_CASE("verify: duality suite at alpha 2, m 0.6") {
  const auto r = invoke({"verify", "--suite", "duality", "--alpha", "2", "--m", "0.6"});
  REQUIRE(r.status == 0);
  const auto j = ordered_json::parse(r.out);
  REQUIRE(j["suites"].size() == 1);
  CHECK(j["suites"][0]["passed"] == true);
  CHECK(j["suites"][0]["residual"].get<double>() <= 1e-6);
}

TEST_CASE("duality, thermo and divergence commands") {
  const auto d = invoke({"duality", "--alpha", "2", "--m", "0.6"});
  REQUIRE(d.status == 0);
  CHECK(ordered_json::parse(d.out)["max_entry"].get<double>() <= 1e-6);

  const auto t = invoke({"thermo", "--alpha", "0.5", "--m", "0.6", "--kind", "G", "--threads", "2"});
  REQUIRE(t.status == 0);
  const auto tj = ordered_json::parse(t.out);
  CHECK(tj["passed"] == true);
  CHECK(tj["family"].size() == 9);
  CHECK(invoke({"thermo", "--alpha", "0.5", "--m", "0.6", "--count", "3"}).status == 1);

  const auto v = invoke({"divergence", "--ref", "uniform:0,0.5", "--ref2", "uniform:0,1", "--alpha", "0.5"});
  REQUIRE(v.status == 0);
  const auto vj = ordered_json::parse(v.out);
  CHECK(std::abs(vj["renyi"].get<double>() - std::log(2.0)) <= 1e-9);
  CHECK(std::abs(vj["kl"].get<double>() - std::log(2.0)) <= 1e-9);
  CHECK(invoke({"divergence", "--ref", "uniform:0,1", "--ref2", "uniform:0,0.5", "--alpha", "2"}).status == 2);
}

TEST_CASE("thread count falls back to the environment") {
  setenv("RENYI_MAXENT_THREADS", "1", 1);
  CHECK(invoke({"thermo", "--alpha", "0.5", "--m", "0.6"}).status == 0);
  unsetenv("RENYI_MAXENT_THREADS");
  CHECK(invoke({"solve", "--alpha", "0.5", "--m", "0.6", "--threads", "0"}).status == 1);
}
