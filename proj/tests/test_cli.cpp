#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <envydiv/cli.hpp>
#include <envydiv/json_io.hpp>

using namespace envydiv;

namespace {

std::string data(const std::string &file) { return std::string(ENVYDIV_DATA_DIR) + "/" + file; }

struct Outcome {
  int code;
  json out;
  std::string raw;
};

Outcome exec(const RunConfig &c) {
  std::ostringstream out;
  std::ostringstream log;
  const int code = run(c, out, log);
  return {code, json::parse(out.str()), out.str()};
}

RunConfig solve_config(const std::string &prefs, const std::string &space, std::optional<int> r = std::nullopt) {
  RunConfig c;
  c.command = "solve";
  c.prefs = data(prefs);
  c.space = space;
  c.r = r;
  return c;
}

std::filesystem::path scratch_file(const std::string &name, const std::string &body) {
  const auto path = std::filesystem::temp_directory_path() / ("envydiv_test_" + name);
  std::ofstream(path) << body;
  return path;
}

int essential_tiles(const json &cut) {
  double prev = 0.0;
  int count = 0;
  for (const double x : cut) {
    count += x - prev > 1e-9;
    prev = x;
  }
  return count + (1.0 - prev > 1e-9);
}

} // namespace

TEST_CASE("solve: hungry players on c1 give every player a real piece") {
  const auto o = exec(solve_config("hungry.json", "c1", 3));
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["status"] == "ok");
  CHECK(essential_tiles(o.out["point"]["cut"]) == 3);
  CHECK(o.out.contains("tiles"));
  CHECK(o.out["residual"].get<double>() <= 1e-6);
}

TEST_CASE("solve: gorbushka with equal degenerate tiles hands out two empty boxes") {
  const auto o = exec(solve_config("gorbushka_pdte.json", "c1", 3));
  REQUIRE(o.code == exit_ok);
  const auto &alloc = o.out["point"]["allocation"];
  int empty = 0;
  for (int b = 1; b <= 3; ++b) {
    bool used = false;
    for (const auto &[tile, box] : alloc.items()) {
      const double lo = std::stoi(tile) == 1 ? 0.0 : o.out["point"]["cut"][std::stoi(tile) - 2].get<double>();
      const double hi = std::stoi(tile) == 3 ? 1.0 : o.out["point"]["cut"][std::stoi(tile) - 1].get<double>();
      used = used || (box == b && hi - lo > 1e-9);
    }
    if (!used) {
      ++empty;
      // the player holding an empty box prefers it
      for (int j = 1; j <= 3; ++j) {
        if (o.out["assignment"][j - 1] == b) {
          CHECK(o.out["matrix"][j - 1][b - 1].get<double>() > 1e-9);
        }
      }
    }
  }
  CHECK(empty == 2);
}

TEST_CASE("solve: adversarial r = 6 exhausts the budget") {
  auto c = solve_config("adversarial.json", "c1", 6);
  c.max_depth = 6;
  const auto o = exec(c);
  CHECK(o.code == exit_budget);
  CHECK(o.out["status"] == "budget_exhausted");
  CHECK(o.out["residual"].get<double>() > 1e-6);
  CHECK(o.out.contains("best_point"));
  CHECK(o.out["hypothesis_met"] == false);
}

TEST_CASE("solve: other spaces") {
  CHECK(exec(solve_config("ppe_hungry.json", "c2")).code == exit_ok);
  CHECK(exec(solve_config("burnt.json", "c3")).code == exit_ok);
  CHECK(exec(solve_config("random.json", "c1")).code == exit_ok);
}

TEST_CASE("solve: validation failures exit 3") {
  // ends-only gorbushka breaks partition equivalence, which phi needs
  CHECK(exec(solve_config("gorbushka.json", "c2")).code == exit_validation);
  // and its last tile is preferred even when very short, which psi forbids
  const auto with_eps = scratch_file("gorbushka_eps.json",
                                     R"({"r": 3, "model": "gorbushka", "params": {"pdte": false}, "epsilon": 0.001})");
  auto c = solve_config("", "c1");
  c.prefs = with_eps.string();
  CHECK(exec(c).code == exit_validation);
  // without an epsilon psi cannot be built at all
  CHECK(exec(solve_config("gorbushka.json", "c1")).code == exit_input);
}

TEST_CASE("solve: input errors exit 4") {
  CHECK(exec(solve_config("missing.json", "c1")).code == exit_input);
  CHECK(exec(solve_config("hungry.json", "c1", 4)).code == exit_input);
  CHECK(exec(solve_config("hungry.json", "c9")).code == exit_input);
  auto c = solve_config("hungry.json", "c1");
  c.space.reset();
  CHECK(exec(c).code == exit_input);

  const auto malformed = scratch_file("malformed.json", "{\"r\": 3, \"model\": ");
  c = solve_config("", "c1");
  c.prefs = malformed.string();
  CHECK(exec(c).code == exit_input);

  const auto unknown = scratch_file("unknown.json", R"({"r": 3, "model": "spicy"})");
  c.prefs = unknown.string();
  const auto o = exec(c);
  CHECK(o.code == exit_input);
  CHECK(o.out["status"] == "input_error");

  const auto bad_reduction = scratch_file("bad_reduction.json", R"({"r": 3, "kind": "new", "model": "hungry", "reduction": "psi"})");
  c.prefs = bad_reduction.string();
  CHECK(exec(c).code == exit_input);

  RunConfig none;
  none.command = "dance";
  std::ostringstream out, log;
  CHECK(run(none, out, log) == exit_input);
}

TEST_CASE("topology examples") {
  RunConfig c;
  c.command = "topology";
  c.complex = "chessboard";
  c.m = 3;
  c.n = 2;
  auto o = exec(c);
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["betti"] == json({0, 1}));

  c.n = 5;
  o = exec(c);
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["betti"][0] == 0);
  CHECK(o.out["betti"][1] == 0);

  c = {};
  c.command = "topology";
  c.complex = "gorbushka-join";
  c.r = 2;
  c.pseudomanifold = true;
  o = exec(c);
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["pseudomanifold"] == true);

  c.complex = "chessboard";
  CHECK(exec(c).code == exit_input); // --m and --n missing
  c.complex = "moebius";
  CHECK(exec(c).code == exit_input);
}

TEST_CASE("topology cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "envydiv_cache_test";
  std::filesystem::remove_all(dir);
  ::setenv("ENVYDIV_CACHE_DIR", dir.c_str(), 1);
  RunConfig c;
  c.command = "topology";
  c.complex = "join-power";
  c.r = 3;
  const auto first = exec(c);
  CHECK(std::filesystem::exists(dir / "join_power_3.json"));
  const auto second = exec(c);
  CHECK(first.raw == second.raw);

  // a corrupt entry is rebuilt, not trusted
  std::ofstream(dir / "join_power_3.json") << "not json";
  CHECK(exec(c).raw == first.raw);
  ::unsetenv("ENVYDIV_CACHE_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("validate") {
  RunConfig c;
  c.command = "validate";
  c.samples = 300;
  c.prefs = data("hungry.json");
  auto o = exec(c);
  CHECK(o.code == exit_ok);
  CHECK(o.out["ok"] == true);

  c.prefs = data("gorbushka.json");
  o = exec(c);
  CHECK(o.code == exit_validation);
  CHECK(o.out["ok"] == false);

  c.properties = {"covering", "continuity"};
  CHECK(exec(c).code == exit_ok);

  c.properties = {"equivariance"};
  CHECK(exec(c).code == exit_input);
  c.space = "c3";
  CHECK(exec(c).code == exit_ok);

  c.prefs = data("adversarial.json");
  c.properties = {"p_pe"};
  CHECK(exec(c).code == exit_input);
  c.properties = {"smoothness"};
  CHECK(exec(c).code == exit_input);
}

TEST_CASE("brute") {
  RunConfig c;
  c.command = "brute";
  c.prefs = data("gorbushka.json");
  c.space = "c1";
  c.grid = 31;
  auto o = exec(c);
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["feasible"] == false);

  c.prefs = data("burnt.json");
  c.space = "c3";
  o = exec(c);
  REQUIRE(o.code == exit_ok);
  CHECK(o.out["feasible"] == true);

  c.grid = 500;
  CHECK(exec(c).code == exit_input);
}

TEST_CASE("demos") {
  RunConfig c;
  c.command = "demo";
  for (const auto &[name, r] : std::vector<std::pair<std::string, int>>{{"gorbushka", 3}, {"gale", 5}, {"ppe", 4}, {"burnt", 3}}) {
    CAPTURE(name);
    c.demo = name;
    c.r = r;
    const auto o = exec(c);
    CHECK(o.code == exit_ok);
    CHECK(o.out["pass"] == true);
  }
  c.demo = "gorbushka";
  c.r = 7;
  CHECK(exec(c).code == exit_input);
  c.demo = "tea";
  CHECK(exec(c).code == exit_input);
}

TEST_CASE("identical configs give byte-identical output") {
  for (const auto &[file, space] : std::vector<std::pair<std::string, std::string>>{
           {"random.json", "c1"}, {"hungry.json", "c1"}, {"burnt.json", "c3"}}) {
    auto c = solve_config(file, space);
    const auto a = exec(c);
    c.threads = 1;
    const auto b = exec(c);
    CHECK(a.raw == b.raw);
  }
  RunConfig v;
  v.command = "validate";
  v.prefs = data("random.json");
  v.samples = 200;
  CHECK(exec(v).raw == exec(v).raw);
}
