#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <omp.h>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gmsphere/sp2.hpp"

using namespace gmsphere;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gmsphere");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "gmsphere_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string threads() { return std::to_string(std::max(2, omp_get_max_threads())); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"verify", "--s-tilde", "0"}).code == 2);
  CHECK(run({"verify", "--t-tilde", "1.5"}).code == 2);
  CHECK(run({"classify", "--point", "1 0 0 0 0 0 0 0 0 0 0 0 2 0 0 0"}).code == 2);
  CHECK(run({"classify", "--point", "no-such-point"}).code == 2);
  CHECK(run({"classify"}).code == 2);
  CHECK(run({"scan", "--samples", "5"}).code == 2);
  CHECK(run({"sweep", "--samples", "5"}).code == 2);
  CHECK(run({"scan", "--seed", "1", "--samples", "0"}).code == 2);
  CHECK(run({"scan", "--seed", "1", "--samples", "2", "--delta", "1e-12", "--out", "/nonexistent/dir/x.jsonl"}).code == 2);
  CHECK(run({"classify", "--point", "identity", "--s", "1", "--s-tilde", "0.5"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("classify named points") {
  Run id = run({"classify", "--point", "identity"});
  REQUIRE(id.code == 0);
  json a = json::parse(id.out);
  CHECK(a["version"].is_string());
  CHECK(a["seed"].is_number());
  CHECK(a["tolerances"].is_object());
  CHECK(a["config"].is_object());
  CHECK(a["classification"]["z3"] == false);
  CHECK(a["classification"]["witness"].is_null());

  Run d = run({"classify", "--point", "diag-i-1"});
  REQUIRE(d.code == 0);
  json b = json::parse(d.out);
  CHECK(b["classification"]["z3"] == true);
  CHECK(b["classification"]["z1"] == false);
  CHECK(b["classification"]["witness"].is_object());

  Run z = run({"classify", "--point", "z2-sample"});
  REQUIRE(z.code == 0);
  CHECK(json::parse(z.out)["classification"]["z2"] == true);
}

TEST_CASE("points from files and inline text") {
  GroupElement g = haar_sample(3);
  auto path = scratch("point.txt");
  std::ofstream(path) << format_reals(g) << "\n";
  Run f = run({"classify", "--point", path.string()});
  Run i = run({"classify", "--point", format_reals(g)});
  REQUIRE(f.code == 0);
  REQUIRE(i.code == 0);
  CHECK(json::parse(f.out)["classification"] == json::parse(i.out)["classification"]);
}

TEST_CASE("zero-plane and minsec") {
  Run z = run({"zero-plane", "--point", "diag-i-1"});
  CHECK(z.code == 0);
  CHECK(json::parse(z.out)["witness"].is_object());
  Run zi = run({"zero-plane", "--point", "identity"});
  CHECK(zi.code == 0);
  CHECK(json::parse(zi.out)["witness"].is_null());

  Run m = run({"minsec", "--point", "diag-i-1", "--seed", "1"});
  REQUIRE(m.code == 0);
  json r = json::parse(m.out);
  CHECK(r["min_kappa"]["value"].get<double>() < 1e-9);
  CHECK(r["classification"]["z3"] == true);
  Run mi = run({"minsec", "--point", "identity", "--seed", "1"});
  json ri = json::parse(mi.out);
  CHECK(ri["min_secM"]["value"].get<double>() > 0.0);
}

TEST_CASE("verify passes and the injected fault is caught") {
  Run ok = run({"verify", "--seed", "42", "--workers", threads()});
  CHECK(ok.code == 0);
  json r = json::parse(ok.out);
  CHECK(r["passed"] == true);
  Run bad = run({"verify", "--seed", "42", "--workers", threads(), "--inject-fault", "w-sign"});
  CHECK(bad.code == 1);
  json rb = json::parse(bad.out);
  std::vector<std::string> failed = rb["failed"];
  CHECK(std::find(failed.begin(), failed.end(), "lemma_z2_conditions") != failed.end());
  CHECK(run({"verify", "--inject-fault", "other"}).code == 2);
}

TEST_CASE("scan output does not depend on the worker count") {
  auto j1 = scratch("w1.jsonl"), j4 = scratch("w4.jsonl"), c1 = scratch("w1.csv"), c4 = scratch("w4.csv");
  Run a = run({"scan", "--seed", "7", "--samples", "100", "--workers", "1", "--out", j1.string(), "--csv", c1.string()});
  Run b = run({"scan", "--seed", "7", "--samples", "100", "--workers", "4", "--out", j4.string(), "--csv", c4.string()});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(j1) == slurp(j4));
  CHECK(slurp(c1) == slurp(c4));

  std::istringstream csv(slurp(c1));
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("index,seed,", 0) == 0);
  CHECK(header.find("min_kappa,min_secM,z1,z2,z3,z4,agreement") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), ',') == 24);
  int rows = 0;
  for (std::string row; std::getline(csv, row);) ++rows;
  CHECK(rows == 100);

  std::vector<json> rec = lines(slurp(j1));
  REQUIRE(rec.size() == 102);
  CHECK(rec.front()["type"] == "header");
  CHECK(rec.back()["type"] == "summary");
}

TEST_CASE("spiked scan reports full agreement") {
  Run r = run({"scan", "--seed", "11", "--samples", "60", "--spike", "0.1", "--workers", threads()});
  REQUIRE(r.code == 0);
  json s = lines(r.out).back();
  CHECK(s["agreement_fraction"].get<double>() == 1.0);
  CHECK(s["classifier_hits"].get<int>() == 6);
}

TEST_CASE("sweep covers the 3x3 grid") {
  Run r = run({"sweep", "--seed", "5", "--samples", "8", "--workers", threads()});
  std::vector<json> rec = lines(r.out);
  int cells = 0;
  for (const json& j : rec) {
    if (j["type"] != "cell") continue;
    ++cells;
    CHECK(j["nonnegativity"] == true);
  }
  CHECK(cells == 9);
  CHECK(r.code == 0);
}
