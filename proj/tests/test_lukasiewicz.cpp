#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cmj/forest.hpp"
#include "cmj/laws.hpp"
#include "cmj/lukasiewicz.hpp"
#include "fixture.hpp"

using namespace cmj;
using cmj::testing::fixture_sticks;

TEST_CASE("walk") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  CHECK(w.children == std::vector<std::size_t>{2, 2, 1, 0, 0, 3, 0, 0, 1, 0});
  CHECK(w.S == std::vector<long long>{0, 1, 2, 2, 1, 0, 2, 1, 0, 0, -1});
  auto v = LukView::forward(w, s, 0);
  CHECK(tau_down(v, 1) == 10);
  std::vector<Stick> ones(5, Stick(1.0, {0.5}));
  Walk w1 = walk(ones);
  CHECK(std::all_of(w1.S.begin(), w1.S.end(), [](long long x) { return x == 0; }));
}

TEST_CASE("search functionals on a view") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  auto v = LukView::forward(w, s, 0);
  CHECK(tau_up(v, 2) == 2);
  CHECK(undershoot(v, 2) == 1);
  CHECK(mu(v, 2) == PointMeasure{0.5});  // stick 1 minus its largest atom
  CHECK_FALSE(tau_up(v, 3).has_value());  // the data never gets there
  auto d = LukView::dual(w, s, 10);
  CHECK(d.S_at(1) == -1);  // stick 9 has no children
  CHECK(d.S_at(5) == -1);
  CHECK_FALSE(d.S(11).has_value());
}

TEST_CASE("ladder decomposition") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  CHECK(ladder_decomp(w, s, 0).height() == 0);
  CHECK(ladder_decomp(w, s, 3).height() == 3);
  LadderDecomp d9 = ladder_decomp(w, s, 9);
  CHECK(d9.height() == 3);
  CHECK(d9.chrono_height() == doctest::Approx(2.5));
  for (const auto& q : d9.Q) CHECK_FALSE(q.is_zero());
  ChronForest f = build_forest(s);
  for (std::size_t n = 0; n <= s.size(); ++n) {
    LadderDecomp d = ladder_decomp(w, s, n);
    CHECK(d.height() == f.depth(n));
    CHECK(d.chrono_height() == doctest::Approx(f.height(n)).epsilon(1e-12));
    for (std::size_t j = 0; j <= n; ++j) {
      CHECK(d.inverse_tilde(j) <= d.inverse(j));
      CHECK(d.inverse(j) <= d.inverse_tilde(j) + 1);
    }
  }
}

TEST_CASE("mrca") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  for (std::size_t n = 0; n < 10; ++n) CHECK(mrca(w, s, n, n) == n);
  CHECK(mrca(w, s, 2, 4) == 1);
  CHECK(mrca(w, s, 3, 7) == 0);
  auto two = s;
  two.push_back(Stick(1.0, {}));
  Walk w2 = walk(two);
  CHECK_FALSE(mrca(w2, two, 3, 10).has_value());
}

TEST_CASE("ancestors match the forest") {
  StickLaw law = parse_law("custom:offspring=table:0.4/0.3/0.2/0.1,life=ints:1/2/3,births=grid:1");
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Stick> s;
    for (int i = 0; i < 120; ++i) s.push_back(law.sample(rng));
    ChronForest f = build_forest(s);
    Walk w = walk(s);
    for (std::size_t n = 0; n < s.size(); n += 7) CHECK(ancestors(w, s, n) == f.lineage(n));
  }
}

TEST_CASE("D functional") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  for (std::size_t n = 0; n <= 10; ++n) CHECK(D_functional(w, s, n, 0) == 0.0);
  // from the contour minimum between 5 and 10, where the walk first drops one level below S(5)
  ChronForest f = build_forest(s);
  CHECK(D_functional(w, s, 5, 1) == doctest::Approx(f.height(5) - min_contour(f, 5, 10)));
  CHECK(D_functional(w, s, 5, 1) == doctest::Approx(0.5));
}

TEST_CASE("D is non-decreasing and the table agrees") {
  StickLaw law = parse_law("custom:offspring=geom:0.5,life=exp:1,births=uniform");
  Rng rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<Stick> s;
    for (int i = 0; i < 100; ++i) s.push_back(law.sample(rng));
    Walk w = walk(s);
    std::size_t n = rng.below(s.size() + 1);
    auto table = D_table(w, s, n, 12);
    for (long long l = 0; l <= 12; ++l) {
      CHECK(table[static_cast<std::size_t>(l)] == doctest::Approx(D_functional(w, s, n, l)).epsilon(1e-12));
      if (l > 0) CHECK(table[static_cast<std::size_t>(l)] >= table[static_cast<std::size_t>(l - 1)]);
    }
  }
}

TEST_CASE("chi finds the children in order") {
  StickLaw law = parse_law("geometric:q=0.45");
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Stick> s;
    for (int i = 0; i < 150; ++i) s.push_back(law.sample(rng));
    ChronForest f = build_forest(s);
    Walk w = walk(s);
    std::vector<std::vector<std::size_t>> kids(s.size());
    for (std::size_t n = 0; n < s.size(); ++n)
      if (f.node(n).parent) kids[*f.node(n).parent].push_back(n);
    for (std::size_t m = 0; m + 1 < s.size(); ++m)
      for (std::size_t i = 0; i < kids[m].size(); ++i)
        CHECK(chi(w, m, static_cast<long long>(i)) == kids[m][i]);
  }
}

TEST_CASE("backward maximum") {
  auto s = fixture_sticks();
  Walk w = walk(s);
  auto v = LukView::forward(w, s, 5);
  // S(-k) reads S[5-k] - S[5]
  CHECK(backward_max(v, 0) == 0);
  CHECK(backward_max(v, 1) == 1);
  CHECK(backward_max(v, 3) == 2);
  CHECK(backward_max(v, 5) == 2);
  CHECK_FALSE(backward_max(v, 6).has_value());
}
