#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "equishrink");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = equishrink::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Data lines of a CSV output (meta comments dropped), header first.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("equishrink_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::string kData = EQUISHRINK_TEST_DATA;

}  // namespace

TEST_CASE("estimate") {
  SUBCASE("james-stein example") {
    const Result r = run({"estimate", "--rule", "js", "--p", "5", "--n", "10", "--x", "1,1,1,1,1", "--s", "5"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"i", "x", "estimate", "factor", "psi", "w"});
    for (int i = 1; i <= 5; ++i) {
      CHECK(rows[i][2] == "0.75");
      CHECK(rows[i][3] == "0.75");
      CHECK(rows[i][5] == "1");
    }
  }
  SUBCASE("natural echoes x") {
    const Result r = run({"estimate", "--rule", "natural", "--n", "4", "--x", "0.125,-3,7", "--s", "2", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["estimate"] == j["x"]);
    CHECK(j["factor"] == 1.0);
    CHECK(j["meta"]["command"] == "estimate");
    CHECK(j["meta"]["seed"].is_null());
    CHECK(j["meta"]["params"]["rule"] == "natural");
  }
  SUBCASE("psi-alpha at the origin") {
    const Result r = run({"estimate", "--rule", "psi-alpha:0", "--n", "10", "--x", "0,0,0,0,0", "--s", "5", "--format", "json"});
    REQUIRE(r.code == 0);
    for (const auto& v : json::parse(r.out)["estimate"]) CHECK(v == 0.0);
  }
  SUBCASE("x from a file") {
    TempDir tmp;
    std::ofstream(tmp.path / "x.txt") << "1 1\n1,1 1\n";
    const Result r = run({"estimate", "--rule", "js", "--n", "10", "--x-file", (tmp.path / "x.txt").string(), "--s", "5"});
    REQUIRE(r.code == 0);
    CHECK(csv_rows(r.out)[1][2] == "0.75");
  }
  SUBCASE("bayes rule through the prior grammar") {
    const Result r = run({"estimate", "--rule", "bayes:prior=power:0", "--n", "10", "--x", "1,1,1,1,1", "--s", "2.5",
                          "--format", "json", "--threads", "1"});
    REQUIRE(r.code == 0);
    const Result ref = run({"estimate", "--rule", "psi-alpha:0", "--n", "10", "--x", "1,1,1,1,1", "--s", "2.5", "--format", "json"});
    CHECK(json::parse(r.out)["psi"].get<double>() ==
          doctest::Approx(json::parse(ref.out)["psi"].get<double>()).epsilon(1e-6));
  }
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"estimate", "--n", "10", "--x", "1,1,1", "--s", "1"}).code == 2);               // missing --rule
  CHECK(run({"estimate", "--rule", "jss", "--n", "10", "--x", "1,1,1", "--s", "1"}).code == 2);  // grammar
  CHECK(run({"estimate", "--rule", "psi-alpha:x", "--n", "10", "--x", "1,1,1", "--s", "1"}).code == 2);
  CHECK(run({"estimate", "--rule", "js", "--n", "10", "--x", "1,a,1", "--s", "1"}).code == 2);
  CHECK(run({"estimate", "--rule", "js", "--n", "10", "--x", "1,1,1", "--s", "1", "--format", "xml"}).code == 2);
  CHECK(run({"estimate", "--rule", "js", "--n", "10", "--s", "1"}).code == 2);  // no x
  CHECK(run({"risk-curve", "--rule", "js", "--p", "5", "--n", "10", "--lambda", "0"}).code == 2);  // no seed

  const Result small_p = run({"estimate", "--rule", "js", "--n", "10", "--x", "1,1", "--s", "1"});
  CHECK(small_p.code == 3);
  CHECK(small_p.err.find("p >= 3") != std::string::npos);
  CHECK(run({"estimate", "--rule", "js", "--n", "10", "--x", "0,0,0", "--s", "1"}).code == 3);
  CHECK(run({"estimate", "--rule", "js", "--n", "10", "--x", "1,1,1", "--s", "0"}).code == 3);
  CHECK(run({"estimate", "--rule", "psi-alpha:-0.7", "--n", "10", "--x", "1,1,1", "--s", "1"}).code == 3);
  CHECK(run({"estimate", "--rule", "js", "--p", "4", "--n", "10", "--x", "1,1,1", "--s", "1"}).code == 3);
  CHECK(run({"risk-curve", "--rule", "js", "--p", "5", "--n", "10", "--lambda", "1,0", "--seed", "1"}).code == 3);
}

TEST_CASE("risk-curve") {
  const std::vector<std::string> base = {"risk-curve", "--rule", "natural", "--density", "gt:8", "--p", "5", "--n", "10",
                                         "--lambda", "0,1,10", "--reps", "20000", "--seed", "99"};
  const Result r = run(base);
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"lambda", "risk", "std_err", "n_reps", "estimator"});
  for (int i = 1; i <= 3; ++i) CHECK(std::abs(std::stod(rows[i][1]) - 5.0) <= 4.0 * std::stod(rows[i][2]));
  CHECK(r.out.find("# seed: 99\n") != std::string::npos);
  CHECK(r.out.find('\r') == std::string::npos);

  SUBCASE("byte-identical reruns through files") {
    TempDir tmp;
    auto a = base, b = base;
    a.insert(a.end(), {"--out", (tmp.path / "a.csv").string()});
    b.insert(b.end(), {"--out", (tmp.path / "b.csv").string()});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    const std::string ta = slurp(tmp.path / "a.csv"), tb = slurp(tmp.path / "b.csv");
    CHECK(!ta.empty());
    // Only the --out parameter line differs.
    CHECK(csv_rows(ta) == csv_rows(tb));
    auto c = base;
    c.insert(c.end(), {"--out", (tmp.path / "a.csv").string()});
    REQUIRE(run(c).code == 0);
    CHECK(slurp(tmp.path / "a.csv") == ta);
  }
  SUBCASE("thread count does not change the numbers") {
    auto one = base, three = base;
    one.insert(one.end(), {"--threads", "1"});
    three.insert(three.end(), {"--threads", "3"});
    CHECK(csv_rows(run(one).out) == csv_rows(run(three).out));
  }
}

TEST_CASE("risk-curve comparisons and checks") {
  const Result r = run({"risk-curve", "--compare", "js,psi-alpha:0,simple-bayes:0.25,0", "--p", "5", "--n", "10",
                        "--lambda", "1,10", "--reps", "20000", "--seed", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["curves"].size() == 3);
  CHECK(j["curves"][2]["estimator"] == "simple-bayes:0.25,0");
  CHECK(j["curves"][0]["points"][0]["paired_diff"] == 0.0);
  CHECK(j["curves"][1]["points"][1]["paired_diff"].get<double>() < 0.0);
  CHECK(j["meta"]["seed"] == 3);

  const Result csv = run({"risk-curve", "--rule", "psi-alpha:0", "--compare", "js", "--p", "5", "--n", "10", "--lambda",
                          "1,10", "--reps", "20000", "--seed", "3", "--check", "dominance"});
  CHECK(csv.code == 0);
  CHECK(csv_rows(csv.out)[0].back() == "paired_std_err");

  const Result worse = run({"risk-curve", "--rule", "js", "--compare", "psi-alpha:0", "--p", "5", "--n", "10",
                            "--lambda", "10", "--reps", "20000", "--seed", "3", "--check", "dominance"});
  CHECK(worse.code == 1);
  CHECK(worse.err.find("check failed") != std::string::npos);

  CHECK(run({"risk-curve", "--rule", "simple-bayes:2.5,0", "--p", "5", "--n", "10", "--lambda", "25,100", "--reps",
             "20000", "--seed", "3", "--check", "minimax"})
            .code == 1);
  CHECK(run({"risk-curve", "--rule", "psi-alpha:0", "--p", "5", "--n", "10", "--lambda", "0,25,100", "--reps", "20000",
             "--seed", "3", "--check", "minimax"})
            .code == 0);
}

TEST_CASE("verify") {
  const Result blyth = run({"verify", "--scope", "blyth"});
  CHECK(blyth.code == 0);
  const json jb = json::parse(blyth.out);
  CHECK(jb["passed"] == true);
  CHECK(jb["checks"]["blyth"].size() >= 8);

  const Result gt5 = run({"verify", "--scope", "density", "--density", "gt:5"});
  CHECK(gt5.code == 0);
  const json jd = json::parse(gt5.out);
  CHECK(jd["density"]["F3_1"] == true);
  CHECK(jd["density"]["F3_2"] == false);

  CHECK(run({"verify", "--scope", "density", "--density", "gt:3.5"}).code == 1);

  const Result edge = run({"verify", "--scope", "prior", "--prior", "strawderman:0.5,-1.5,0"});
  CHECK(edge.code == 0);
  const json je = json::parse(edge.out);
  CHECK(je["prior"]["proper"] == false);  // alpha + beta = -1 is the boundary, still improper
  CHECK(je["prior"]["assumptions"]["A3"]["classification"] == "A3.1");

  const Result proper = run({"verify", "--scope", "prior", "--prior", "strawderman:0.5,-2,0"});
  CHECK(proper.code == 1);  // proper, but its tail decays faster than the tail condition allows
  CHECK(json::parse(proper.out)["prior"]["proper"] == true);

  const Result csv = run({"verify", "--scope", "prior", "--prior", "power:-0.3", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv_rows(csv.out)[0] == std::vector<std::string>{"scope", "check", "passed", "value", "bound", "detail"});

  CHECK(run({"verify", "--scope", "everything"}).code == 2);
  CHECK(run({"verify", "--scope", "prior", "--prior", "power"}).code == 2);
}

TEST_CASE("regress") {
  const json expected = [] {
    std::ifstream f(kData + "/regression_small_expected.json");
    return json::parse(f);
  }();
  for (const char* rule : {"natural", "js", "simple-bayes:0.5,1"}) {
    CAPTURE(rule);
    const Result r = run({"regress", "--data", kData + "/regression_small.csv", "--response", "y", "--rule", rule,
                          "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["factor"].get<double>() == doctest::Approx(expected["factor"][rule].get<double>()).epsilon(1e-12));
    CHECK(j["r_squared"].get<double>() == doctest::Approx(expected["r_squared"].get<double>()).epsilon(1e-12));
    CHECK(j["w"].get<double>() == doctest::Approx(expected["w"].get<double>()).epsilon(1e-10));
    for (int k = 0; k < 3; ++k) {
      CHECK(j["shrunk"][k].get<double>() ==
            doctest::Approx(expected["shrunk"][rule][k].get<double>()).epsilon(1e-10));
      CHECK(j["t_values"][k].get<double>() == doctest::Approx(expected["t_values"][k].get<double>()).epsilon(1e-10));
    }
    if (std::string(rule) == "natural") CHECK(j["shrunk"] == j["beta_hat"]);
  }

  TempDir tmp;
  std::ofstream(tmp.path / "gap.csv") << "a,b,c,y\n1,2,3,4\n2,,1,3\n";
  const Result gap = run({"regress", "--data", (tmp.path / "gap.csv").string(), "--response", "y", "--rule", "natural"});
  CHECK(gap.code == 2);
  CHECK(gap.err.find("line 3") != std::string::npos);
  CHECK(run({"regress", "--data", (tmp.path / "none.csv").string(), "--response", "y", "--rule", "natural"}).code == 2);
  CHECK(run({"regress", "--data", kData + "/regression_small.csv", "--response", "q", "--rule", "natural"}).code == 2);
}
