#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/cli.hpp"
#include "casimir/pfa.hpp"
#include "test_util.hpp"

using namespace casimir;
using testutil::rel;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "casimir");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// rows of a CSV table keyed by the header
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    FAIL("missing column " << name);
    return -1;
  }
  double num(size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

Table parse_csv(const std::string& text) {
  Table t;
  const auto lines = split(text, '\n');
  REQUIRE(!lines.empty());
  t.header = split(lines[0], ',');
  for (size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) t.rows.push_back(split(lines[i], ','));
  for (const auto& r : t.rows) CHECK(r.size() == t.header.size());
  return t;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("pfa single point") {
    const auto o = run_cli({"pfa", "--r1", "50e-6", "--plane", "--gap", "1e-6", "--temp", "300", "--material1", "perfect",
                            "--material2", "perfect"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    REQUIRE(t.rows.size() == 1);
    const auto g = Geometry::plane_sphere(50e-6, 1e-6);
    const MaterialPair mats{make_perfect_reflector(), make_perfect_reflector()};
    CHECK(rel(t.num(0, "free_energy_J"), free_energy(g, mats, {300.0}).value) < 1e-15);
    CHECK(rel(t.num(0, "force_N"), force(g, mats, {300.0}).value) < 1e-15);
    CHECK(t.num(0, "est_error") >= 0.0);
    CHECK(t.num(0, "n_max_used") > 0);
  }

  TEST_CASE("pfa gap sweep") {
    const auto o = run_cli({"pfa", "--sweep-gap", "0.1e-6:2e-6:20"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    REQUIRE(t.rows.size() == 20);
    CHECK(t.num(0, "L") == doctest::Approx(0.1e-6).epsilon(1e-12));
    CHECK(t.num(19, "L") == doctest::Approx(2e-6).epsilon(1e-12));
    for (size_t i = 1; i < t.rows.size(); ++i) {
      CHECK(std::abs(t.num(i, "force_N")) < std::abs(t.num(i - 1, "force_N")));
      CHECK(t.num(i, "est_error") >= 0.0);
    }
  }

  TEST_CASE("zero temperature dispatch") {
    const auto o = run_cli({"pfa", "--r1", "20e-6", "--plane", "--gap", "0.5e-6", "--temp", "0"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    const auto g = Geometry::plane_sphere(20e-6, 0.5e-6);
    const MaterialPair mats{make_perfect_reflector(), make_perfect_reflector()};
    CHECK(rel(t.num(0, "free_energy_J"), free_energy_zero_T(g, mats).value) < 1e-15);
    CHECK(t.num(0, "n_max_used") == 0);
  }

  TEST_CASE("roundtrip comparison") {
    const auto o = run_cli({"roundtrip", "--ratios", "100,1000", "--r", "1"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    REQUIRE(t.rows.size() == 2);
    const double d0 = std::abs(t.num(0, "ratio") - 1.0);
    const double d1 = std::abs(t.num(1, "ratio") - 1.0);
    CHECK(d1 < d0);
    CHECK(d1 < 0.03);
    CHECK(rel(t.num(1, "ratio"), t.num(1, "trace") / t.num(1, "trace_pfa")) < 1e-15);

    const auto s = run_cli({"roundtrip", "--ratios", "10", "--mu", "0.5", "--r", "1"});
    REQUIRE(s.code == cli::kSuccess);
    CHECK(parse_csv(s.out).rows.size() == 1);

    // the amplitude switch changes the kernel
    const auto ex = parse_csv(run_cli({"roundtrip", "--ratios", "30", "--t", "1", "--amplitude", "exact"}).out);
    const auto wk = parse_csv(run_cli({"roundtrip", "--ratios", "30", "--t", "1", "--amplitude", "wkb"}).out);
    CHECK(ex.num(0, "trace") != wk.num(0, "trace"));
    CHECK(rel(ex.num(0, "trace"), wk.num(0, "trace")) < 0.05);
  }

  TEST_CASE("wkb check") {
    const auto o = run_cli({"wkb-check", "--x", "50,100,200,400", "--cos", "-1"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    REQUIRE(t.rows.size() == 8);
    for (const std::string pol : {"TE", "TM"}) {
      double prev = INFINITY;
      for (size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i][t.col("polarization")] != pol) continue;
        const double e = t.num(i, "rel_error");
        CHECK(e < prev);
        prev = e;
      }
    }
    CHECK(run_cli({"wkb-check", "--x", "200", "--material", "dielectric:2"}).code == cli::kSuccess);
    const auto fwd = run_cli({"wkb-check", "--x", "200", "--cos", "0.99"});
    CHECK(fwd.code == cli::kParseError);
    CHECK(!fwd.err.empty());
  }

  TEST_CASE("materials table") {
    const auto o = run_cli({"materials", "--material", "drude:1.37e16:5.32e13", "--xi-sweep", "1e13:1e17:9"});
    REQUIRE(o.code == cli::kSuccess);
    const auto t = parse_csv(o.out);
    REQUIRE(t.rows.size() == 9);
    for (size_t i = 1; i < t.rows.size(); ++i) CHECK(t.num(i, "eps") < t.num(i - 1, "eps"));
  }

  TEST_CASE("exit codes") {
    CHECK(run_cli({"pfa", "--no-such-flag"}).code == cli::kParseError);
    CHECK(run_cli({"pfa", "--material1", "unobtainium"}).code == cli::kParseError);
    CHECK(run_cli({"pfa", "--gap", "-1"}).code == cli::kParseError);
    CHECK(run_cli({"pfa", "--r2", "1e-5", "--plane"}).code == cli::kParseError);
    CHECK(run_cli({}).code == cli::kParseError);
    const auto b = run_cli({"roundtrip", "--ratios", "100", "--budget", "10"});
    CHECK(b.code == cli::kBudgetExceeded);
    CHECK(b.err.find("budget") != std::string::npos);
  }

  TEST_CASE("JSON records mirror the CSV") {
    const std::vector<std::string> base = {"pfa", "--sweep-gap", "0.5e-6:1e-6:3", "--material1", "plasma:1.37e16"};
    auto json_args = base;
    json_args.insert(json_args.end(), {"--format", "json"});
    const auto csv = parse_csv(run_cli(base).out);
    const auto js = run_cli(json_args);
    REQUIRE(js.code == cli::kSuccess);
    const auto lines = split(js.out, '\n');
    REQUIRE(lines.size() == 3);
    for (size_t i = 0; i < lines.size(); ++i) {
      const auto j = nlohmann::json::parse(lines[i]);
      CHECK(j.size() == csv.header.size());
      CHECK(j["force_N"].get<double>() == csv.num(i, "force_N"));
      CHECK(j.contains("est_error"));
    }
  }

  TEST_CASE("identical configuration gives identical output") {
    const std::string path = "cli_determinism_test.csv";
    const std::vector<std::string> args = {"roundtrip", "--ratios", "20", "--r", "2", "--output", path};
    std::string first, second;
    for (std::string* dest : {&first, &second}) {
      REQUIRE(run_cli(args).code == cli::kSuccess);
      std::ifstream in(path);
      std::stringstream ss;
      ss << in.rdbuf();
      *dest = ss.str();
    }
    std::remove(path.c_str());
    CHECK(!first.empty());
    CHECK(first == second);
  }
}
