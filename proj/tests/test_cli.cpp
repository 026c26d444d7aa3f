#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sparselab/cli/commands.hpp"
#include "sparselab/cli/csv.hpp"
#include "sparselab/cli/instance_file.hpp"
#include "sparselab/cli/suites.hpp"
#include "sparselab/errors.hpp"

using namespace sparselab;
using namespace sparselab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = SPARSELAB_TEST_DATA;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sparselab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sparselab-test-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("digest is FNV-1a 64") {
  CHECK(digest("") == "cbf29ce484222325");
  CHECK(digest("a") == "af63dc4c8601ec8c");
  CHECK(digest("foobar") == "85944171f73967e8");
}

TEST_CASE("instance files") {
  const InstanceFile a = load_instance(kData + "/chain_lebesgue.json");
  CHECK(a.family.size() == 2);
  CHECK(a.cfg.p == 2.0);
  CHECK(a.ascent.seed == 3);
  CHECK(a.depth == 4);
  CHECK(a.digest.size() == 16);

  const InstanceFile b = load_instance(kData + "/explicit_mixed.json");
  CHECK(b.family.size() == 4);
  CHECK(b.omega.as_power().exponent == -0.5);
  CHECK(b.omega.as_power().coefficient == 2.0);
  CHECK_FALSE(b.sigma.is_power());
  CHECK(b.ascent.restarts == 8);

  auto field_of = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const ParseError& e) {
      return e.field();
    }
    return std::string("none");
  };
  CHECK(field_of(slurp(kData + "/missing_p.json")) == "exponents.p");
  CHECK(field_of("{not json") == "<document>");
  const std::string base = R"("exponents": {"p": 2, "q": 2, "r": 1, "alpha": 1}, "omega": {"kind": "lebesgue"})";
  CHECK(field_of("{" + base + R"(, "family": {"kind": "chain", "K": 1}, "sigma": {"kind": "power", "beta": -1}})") ==
        "sigma.beta");
  CHECK(field_of("{" + base + R"(, "family": {"kind": "tree"}, "sigma": {"kind": "lebesgue"}})") == "family.kind");
  CHECK(field_of("{" + base + R"(, "family": {"kind": "explicit", "members": [[1, 5]]}, "sigma": {"kind": "lebesgue"}})") ==
        "family.members[0]");
  CHECK(field_of("{" + base + R"(, "family": {"kind": "explicit", "members": [[0, 0], [1, 0]], "eta": 0.9}, "sigma": {"kind": "lebesgue"}})") ==
        "family");
  CHECK(field_of("{" + base + R"(, "family": {"kind": "chain", "K": 1}, "sigma": {"kind": "piecewise", "depth": 1, "values": [1]}})") ==
        "sigma.values");
  CHECK_THROWS_AS(load_instance(kData + "/does_not_exist.json"), ParseError);
}

TEST_CASE("csv tables") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CsvTable t;
  t.comments = {"hello"};
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  CHECK_THROWS(t.add_row({"1"}));
  CHECK(t.str() == "# hello\na,b\n1,2\n");
}

TEST_CASE("baselines round trip and checks") {
  const fs::path dir = scratch("baselines");
  Baselines b;
  b[{"s", "x"}] = {0.5, 2.0};
  save_baselines((dir / "b.txt").string(), b);
  const Baselines back = load_baselines((dir / "b.txt").string());
  REQUIRE(back.size() == 1);
  CHECK(back.at({"s", "x"}).upper == 2.0);

  std::ofstream((dir / "bad.txt").string()) << "s x 1\n";
  CHECK_THROWS_AS(load_baselines((dir / "bad.txt").string()), DegenerateInstanceError);

  SuiteRun run;
  run.suite = "s";
  run.reports = {make_report("x", "i0", 1.0, 1.0), make_report("x", "i1", 3.0, 1.0), make_report("y", "i2", 1.0, 1.0),
                 make_report("thm11-lower", "i3", 1.1, 1.0), make_report("x", "i4", 0.0, 1.0)};
  const auto v = check_baselines(run, back);
  REQUIRE(v.size() == 3);
  CHECK(v[0].row == 1);
  CHECK(v[1].reason.find("no baseline") != std::string::npos);
  CHECK(v[2].row == 3);

  const Baselines cal = calibrate(run);
  CHECK(cal.at({"s", "x"}).lower == doctest::Approx(1.0 / 1.1));
  CHECK(cal.at({"s", "x"}).upper == doctest::Approx(3.3));
  CHECK(cal.count({"s", "thm11-lower"}) == 0);
  REQUIRE(exact_bound("lemma33-pointwise").has_value());
  CHECK_FALSE(exact_bound("prop31").has_value());
}

TEST_CASE("suites are seeded and reproducible") {
  for (const auto& name : suite_names()) {
    const SuiteRun a = run_suite(name, 5, 4);
    const SuiteRun b = run_suite(name, 5, 4);
    REQUIRE(a.reports.size() == b.reports.size());
    CHECK_FALSE(a.reports.empty());
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
      CHECK(a.reports[i].lhs == b.reports[i].lhs);
      CHECK(a.reports[i].rhs == b.reports[i].rhs);
    }
  }
  CHECK(default_trials("thm11") == 200);
  CHECK(default_trials("prop31") == 100);
  CHECK_THROWS_AS(run_suite("nope", 1, 1), ParameterError);
  // The frozen baselines cover every calibrated statement.
  const Baselines frozen = load_baselines(default_baselines_path());
  for (const auto& name : suite_names()) {
    for (const auto& rep : run_suite(name, 7, 3).reports) {
      CHECK((exact_bound(rep.statement) || frozen.count({name, rep.statement})));
    }
  }
}

TEST_CASE("char command") {
  const auto r = invoke({"char", "--instance", kData + "/chain_lebesgue.json"});
  REQUIRE(r.code == exit_ok);
  const json j = r.report();
  CHECK(j["characteristic"]["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["ainfty_omega"]["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["feasibility"]["feasible"].get<bool>());
  CHECK(j["exit_code"] == 0);
  CHECK(j.contains("timings"));

  const auto bad = invoke({"char", "--instance", kData + "/infeasible.json"});
  CHECK(bad.code == exit_parameter);
  CHECK(bad.err.find("1/p'") != std::string::npos);
}

TEST_CASE("opnorm and testing commands") {
  const auto r = invoke({"opnorm", "--instance", kData + "/chain_lebesgue.json"});
  REQUIRE(r.code == exit_ok);
  const json j = r.report();
  CHECK(j["estimate"].get<double>() == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-8));
  CHECK(j["certified_lower"].get<double>() <= j["estimate"].get<double>());
  CHECK(j["seed"] == 3);
  CHECK_FALSE(j["theorem_rhs"].is_null());

  const auto s = invoke({"opnorm", "--instance", kData + "/explicit_mixed.json", "--seed", "4"});
  REQUIRE(s.code == exit_ok);
  CHECK(s.report()["seed"] == 4);

  const auto t = invoke({"testing", "--instance", kData + "/explicit_mixed.json"});
  REQUIRE(t.code == exit_ok);
  const json tj = t.report();
  CHECK(tj["T"]["value"].get<double>() > 0.0);
  CHECK(tj["Tstar"].is_null());
  CHECK(tj["comparison"]["branch"] == "r>=p");

  CHECK(invoke({"opnorm", "--instance", kData + "/degenerate_sigma.json"}).code == exit_degenerate);
  CHECK(invoke({"opnorm", "--instance", kData + "/missing_p.json"}).code == exit_parse);
}

TEST_CASE("verify command writes a CSV and honours the output override") {
  const fs::path dir = scratch("verify");
  const auto r = invoke({"verify", "--suite", "lemma41", "--trials", "5", "--out", dir.string()});
  REQUIRE(r.code == exit_ok);
  const json j = r.report();
  CHECK(j["pass"].get<bool>());
  const std::string csv = slurp(dir / "verify-lemma41.csv");
  CHECK(csv.rfind("# sparselab verify suite=lemma41 seed=7 trials=5\n", 0) == 0);
  CHECK(csv.find("instance_id,statement,branch,lhs,rhs,ratio,trivial\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3 + 1 + 5);

  const fs::path env_dir = scratch("verify-env");
  setenv("SPARSELAB_OUT", env_dir.c_str(), 1);
  const auto e = invoke({"verify", "--suite", "lemma43", "--trials", "3", "--out", dir.string()});
  unsetenv("SPARSELAB_OUT");
  CHECK(e.code == exit_ok);
  CHECK(fs::exists(env_dir / "verify-lemma43.csv"));
  CHECK_FALSE(fs::exists(dir / "verify-lemma43.csv"));

  // A baseline window that excludes everything is reported with exit 5.
  std::ofstream((dir / "tight.txt").string()) << "lemma41 lemma41 5 6\n";
  const auto v = invoke({"verify", "--suite", "lemma41", "--trials", "5", "--out", dir.string(), "--baselines",
                         (dir / "tight.txt").string()});
  CHECK(v.code == exit_baseline);
  CHECK(v.report()["violation_count"] == 5);
}

TEST_CASE("sharpness command") {
  const fs::path dir = scratch("sharpness");
  const auto r = invoke({"sharpness", "--variant", "dual", "--out", dir.string()});
  REQUIRE(r.code == exit_ok);
  const json j = r.report();
  CHECK(j["fit"]["slope"].get<double>() == doctest::Approx(0.25).epsilon(0.01));
  CHECK(j["expected_slope"].get<double>() == doctest::Approx(0.25));
  const std::string csv = slurp(dir / "sharpness-dual.csv");
  CHECK(csv.find("eps,K,characteristic,ratio,tail_bound") != std::string::npos);

  CHECK(invoke({"sharpness", "--alpha", "0.7"}).code == exit_parameter);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == exit_usage);
  CHECK(invoke({"frobnicate"}).code == exit_usage);
  CHECK(invoke({"verify", "--suite", "nope"}).code == exit_usage);
  CHECK(invoke({"char"}).code == exit_usage);
  CHECK(invoke({"--help"}).code == exit_ok);
}

TEST_CASE("closed-form command examples") {
  const fs::path dir = scratch("examples");
  const std::string lebesgue_pq2 = R"("exponents": {"p": 2, "q": 2, "r": 1, "alpha": 1})";
  std::ofstream((dir / "power.json").string())
      << "{" << lebesgue_pq2
      << R"(, "family": {"kind": "chain", "K": 4}, "omega": {"kind": "power", "beta": -0.5}, "sigma": {"kind": "power", "beta": -0.5}})";
  const auto c = invoke({"char", "--instance", (dir / "power.json").string()});
  REQUIRE(c.code == exit_ok);
  CHECK(c.report()["characteristic"]["value"].get<double>() == doctest::Approx(8.0));

  std::ofstream((dir / "cube.json").string())
      << "{" << lebesgue_pq2
      << R"(, "family": {"kind": "chain", "K": 0}, "omega": {"kind": "lebesgue"}, "sigma": {"kind": "lebesgue"}})";
  const auto o = invoke({"opnorm", "--instance", (dir / "cube.json").string()});
  REQUIRE(o.code == exit_ok);
  const json j = o.report();
  CHECK(j["estimate"].get<double>() == doctest::Approx(1.0));
  CHECK(j["certified_lower"].get<double>() == doctest::Approx(1.0));
  CHECK(j["theorem_rhs"]["value"].get<double>() == doctest::Approx(2.0));

  const auto s = invoke({"sharpness", "--eps-min-exp", "5", "--eps-max-exp", "5", "--out", dir.string()});
  CHECK(s.code == exit_degenerate);
  const auto p = invoke({"sharpness", "--variant", "primal", "--p", "2", "--q", "4", "--alpha", "0.75", "--out", dir.string()});
  REQUIRE(p.code == exit_ok);
  CHECK(p.report()["slope_error"].get<double>() <= 0.05);
  const std::string csv = slurp(dir / "sharpness-primal.csv");
  CHECK(csv.find("fnv1a64") != std::string::npos);
}
