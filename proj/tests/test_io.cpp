#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "cmj/forest.hpp"
#include "cmj/io.hpp"
#include "cmj/laws.hpp"
#include "fixture.hpp"

using namespace cmj;
using cmj::testing::fixture_sticks;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_sticks(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("json round trip") {
  auto s = fixture_sticks();
  CHECK(sticks_from_json(sticks_to_json(s)) == s);
  CHECK(parse_sticks(sticks_to_json(s)) == s);
  CHECK(parse_sticks(read_file(FIXTURE_JSON)) == s);
  CHECK(sticks_from_json("[]").empty());
  CHECK(parse_sticks("").empty());
  // ages are sorted on the way in
  CHECK(parse_sticks(R"([{"v": 2, "births": [0.5, 1.5]}])")[0] == Stick(2.0, {1.5, 0.5}));
  CHECK(parse_sticks(R"([{"v": 2}])")[0] == Stick(2.0, {}));
}

TEST_CASE("text format") {
  auto s = parse_sticks("# fixture head\n2 1.5 0.5\n\n1.5 1.2 0.5  # two children\n1\n");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == Stick(2.0, {1.5, 0.5}));
  CHECK(s[1] == Stick(1.5, {1.2, 0.5}));
  CHECK(s[2] == Stick(1.0, {}));
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_of("2 1.5\n1 x\n").rfind("line 2:", 0) == 0);
  CHECK(error_of("2 1.5\n1 0.5\n1 3\n").rfind("line 3:", 0) == 0);  // age beyond the life
  CHECK(error_of("-1\n").rfind("line 1:", 0) == 0);
  CHECK(error_of("[\n  {\"v\": 1},\n  {\"v\": 1,}\n]").rfind("line 3:", 0) == 0);
  std::string e = error_of("[\n  {\"v\": 1},\n\n  {\"v\": 1, \"births\": [2]}\n]");
  CHECK(e.rfind("line 4:", 0) == 0);
  CHECK(e.find("stick 1") != std::string::npos);
  CHECK(error_of("[{\"v\": 1, \"bogus\": 0}]").rfind("line 1:", 0) == 0);
  CHECK(error_of("[\n{\"v\": \"one\"}]").rfind("line 2:", 0) == 0);
  CHECK(error_of("{\"v\": 1}").rfind("line 1:", 0) == 0);
  CHECK_THROWS(read_file("/nonexistent/sticks.json"));
}

TEST_CASE("forest csv") {
  ChronForest f = build_forest(fixture_sticks());
  auto r = rows(forest_csv(f));
  REQUIRE(r.size() == 11);
  CHECK(r[0] == std::vector<std::string>{"index", "parent", "birth_time", "depth", "v", "tree_id"});
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i][5] == "0");
  CHECK(r[1][1] == "-1");
  CHECK(r[3] == std::vector<std::string>{"2", "1", "2.7", "2", "1.5", "0"});
}

TEST_CASE("heights and contour csv") {
  ChronForest f = build_forest(fixture_sticks());
  auto h = rows(heights_csv(f));
  REQUIRE(h.size() == 12);
  CHECK(h[10] == std::vector<std::string>{"9", "2.5", "3"});
  auto c = rows(contour_csv(contour_path(f)));
  CHECK(c[0] == std::vector<std::string>{"time", "value"});
  CHECK(c[1] == std::vector<std::string>{"0", "0"});
  CHECK(c.size() == 2 * 10 + 2);

  StickLaw gw = parse_law("gw");
  Rng rng(2);
  std::vector<Stick> s;
  for (int i = 0; i < 100; ++i) s.push_back(gw.sample(rng));
  auto g = rows(heights_csv(build_forest(s)));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i][1] == g[i][2]);
}

TEST_CASE("empty input") {
  ChronForest f = build_forest({});
  CHECK(forest_csv(f) == "index,parent,birth_time,depth,v,tree_id\n");
  CHECK(heights_csv(f) == "n,H,Hcal\n0,0,0\n");
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-1e-20) == "-1e-20");
}

TEST_CASE("random verification is reproducible") {
  RandomVerifyOptions opt;
  opt.forests = 20;
  opt.max_sticks = 60;
  opt.pairs = 50;
  opt.seed = 3;
  IdentityReport a = verify_random_forests(opt);
  opt.workers = 3;
  IdentityReport b = verify_random_forests(opt);
  CHECK(report_json(a) == report_json(b));
  CHECK(a.ok());
  CHECK(verify_law_mix().size() >= 4);
}
