#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "assort/algorithms.hpp"
#include "assort/genbench.hpp"
#include "assort/oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"

using namespace assort;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ASSORT_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t k; (k = std::fread(buf.data(), 1, buf.size(), p)) > 0;) r.out.append(buf.data(), k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "assort_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("cli solves T1") {
  const auto dir = scratch("t1");
  const auto inst = dir / "t1.json";
  save_instance(fixtures::t1(1), inst);

  for (const char* args : {"--method bc --master li --cuts oa+sc", "--method cp", "--method milp",
                           "--method bc --master bi --backend enumerate", "--method brute"}) {
    CAPTURE(args);
    const auto out = dir / "r.json";
    const auto r = run("solve " + q(inst) + " " + args + " --out " + q(out));
    CHECK(r.code == 0);
    CHECK(r.out.find("status=optimal F=1 ") != std::string::npos);
    const auto doc = read_json(out);
    CHECK(doc["x"] == nlohmann::json::array({1, 0}));
    CHECK(doc["objective"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["status"] == "optimal");
    for (const char* key : {"method", "min_objective", "bound", "gap", "iterations", "nodes", "cuts_added", "time_s",
                            "master"})
      CHECK(doc.contains(key));
    const auto v = run("validate " + q(inst) + " " + q(out));
    CHECK(v.code == 0);
    CHECK(v.out.rfind("valid F=1", 0) == 0);
  }

  const auto g = run("greedy " + q(inst));
  CHECK(g.code == 0);
  CHECK(g.out.find("status=heuristic F=0.625") != std::string::npos);

  // Bi on HiGHS falls back to Li with a note.
  const auto bi = run("solve " + q(inst) + " --method cp --master bi --backend highs");
  CHECK(bi.code == 0);
  CHECK(bi.out.find("fell back to the li master") != std::string::npos);
}

TEST_CASE("cli errors and exit codes") {
  const auto dir = scratch("errors");
  const auto t1 = dir / "t1.json";
  save_instance(fixtures::t1(1), t1);

  CHECK(run("solve " + q(t1) + " --no-such-flag").code == 2);
  CHECK(run("solve " + q(dir / "missing.json")).code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("solve " + q(t1) + " --method magic").code == 2);

  std::mt19937_64 rng(5);
  auto big = fixtures::random_raw(rng, 2, 30, fixtures::Scheme::None);
  const auto wide = dir / "wide.json";
  save_instance(fixtures::build(big), wide);
  const auto b = run("brute " + q(wide));
  CHECK(b.code == 2);
  CHECK(b.out.find("refuses") != std::string::npos);

  const auto listed = run("--list-families");
  CHECK(listed.code == 0);
  CHECK(listed.out.find("Sen_200_20\n") != std::string::npos);
  CHECK(listed.out.find("100_5000\n") != std::string::npos);

  // Tampered solutions.
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return dir / name;
  };
  auto v = run("validate " + q(t1) + " " + q(write("over.json", R"({"x":[1,1]})")));
  CHECK(v.code == 1);
  CHECK(v.out.find("capacity constraint violated") != std::string::npos);
  v = run("validate " + q(t1) + " " + q(write("claim.json", R"({"x":[0,1],"objective":1.0})")));
  CHECK(v.code == 1);
  CHECK(v.out.find("differs from F(x)") != std::string::npos);
  v = run("validate " + q(t1) + " " + q(write("short.json", R"({"x":[1]})")));
  CHECK(v.code == 1);
  v = run("validate " + q(t1) + " " + q(write("garbage.json", "{")));
  CHECK(v.code == 2);
}

TEST_CASE("cli generate, solve and validate every family") {
  const auto dir = scratch("families");
  for (const auto& family : family_names()) {
    CAPTURE(family);
    const bool subsets = family_spec(family).scheme == ConstraintScheme::Subsets;
    const std::string sizes = " --n 3 --m 8 --per-cell 1 --seed 3" + std::string(subsets ? "" : " --capacities 3");
    const auto g = run("generate --family " + family + sizes + " --out " + q(dir));
    REQUIRE(g.code == 0);
    std::istringstream lines(g.out);
    std::string first;
    std::getline(lines, first);
    REQUIRE(fs::exists(first));

    const auto again = dir / "again";
    const auto g2 = run("generate --family " + family + sizes + " --out " + q(again));
    REQUIRE(g2.code == 0);
    std::ifstream a(first), b(again / family / fs::path(first).filename());
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());

    const auto out = dir / (family + "_sol.json");
    const auto s = run("solve " + q(first) + " --method bc --out " + q(out));
    CHECK(s.code == 0);
    const auto v = run("validate " + q(first) + " " + q(out));
    CHECK(v.code == 0);
    const auto opt = brute_force(load_instance(first));
    CHECK(read_json(out)["objective"].get<double>() == doctest::Approx(opt.objective).epsilon(1e-6));
  }
}

TEST_CASE("cli benchmark, sweep and ratio outputs") {
  const auto dir = scratch("bench");
  const auto csv = dir / "runs.csv", sum = dir / "sum.csv";
  auto r = run("benchmark --family Sen_200_20 --n 3 --m 8 --capacities 2 --per-cell 1 --config cp:li:oa --config "
               "milp --time-limit 20 --out " +
               q(csv) + " --summary " + q(sum));
  REQUIRE(r.code == 0);
  std::ifstream in(csv);
  const auto rows = read_records_csv(in);
  // Two v0 cells times two configs.
  CHECK(rows.size() == 4);
  for (const auto& row : rows) CHECK(row.status == "optimal");
  std::ifstream s(sum);
  std::string header;
  std::getline(s, header);
  CHECK(header.rfind("# assort-summary v1", 0) == 0);

  r = run("sweep-l --family Sen_200_20 --n 4 --m 6 --capacities 2 --per-cell 1 --l-values 1 2 --time-limit 20");
  CHECK(r.code == 0);
  std::istringstream sweep(r.out);
  const auto srows = read_records_csv(sweep);
  CHECK(srows.size() == 8);

  r = run("ratio --count 3 --n 2 --m 6 --capacity 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# assort-ratio v1\n", 0) == 0);
}
