#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmj/measures.hpp"
#include "cmj/rng.hpp"

using namespace cmj;

namespace {

PointMeasure random_measure(Rng& rng, std::size_t max_atoms) {
  std::vector<double> a(rng.below(max_atoms + 1));
  for (auto& x : a) x = 0.25 * static_cast<double>(1 + rng.below(8));  // ties on purpose
  return PointMeasure(a);
}

}  // namespace

TEST_CASE("mass") {
  CHECK(mass(PointMeasure{}) == 0);
  CHECK(mass(PointMeasure{1.5, 0.5}) == 2);
  CHECK(mass(PointMeasure{1, 1, 1}) == 3);
}

TEST_CASE("sup_support") {
  CHECK(sup_support(PointMeasure{}) == 0.0);
  CHECK(sup_support(PointMeasure{1.5, 0.5}) == 1.5);
  CHECK(sup_support(PointMeasure{0.9}) == 0.9);
  CHECK(sup_support(PointMeasure{0.5, 1.5}) == 1.5);
}

TEST_CASE("atoms are sorted and validated") {
  PointMeasure m{0.5, 2.0, 1.0};
  CHECK(m.atoms() == std::vector<double>{2.0, 1.0, 0.5});
  CHECK_THROWS_AS(PointMeasure({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PointMeasure({-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PointMeasure({NAN}), std::invalid_argument);
}

TEST_CASE("truncate_largest") {
  CHECK(truncate_largest(PointMeasure{1.5, 0.5}, 1) == PointMeasure{0.5});
  CHECK(truncate_largest(PointMeasure{0.9}, 3).is_zero());
  CHECK(truncate_largest(PointMeasure{1, 1}, 1) == PointMeasure{1});
  CHECK(truncate_largest(PointMeasure{1.5, 0.5}, 0) == PointMeasure{1.5, 0.5});
}

TEST_CASE("truncation composes and counts") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    PointMeasure m = random_measure(rng, 6);
    std::size_t j = rng.below(5), k = rng.below(5);
    CHECK(m.truncate_largest(k).truncate_largest(j) == m.truncate_largest(j + k));
    CHECK(m.truncate_largest(k).mass() == (m.mass() > k ? m.mass() - k : 0));
  }
}

TEST_CASE("stick invariants") {
  Stick s(2.0, {1.5, 0.5});
  CHECK(s.children() == 2);
  CHECK_NOTHROW(Stick(1.0, {1.0}));
  CHECK_THROWS_AS(Stick(1.0, {1.5}), std::invalid_argument);
  CHECK_THROWS_AS(Stick(0.0, {}), std::invalid_argument);
}

TEST_CASE("concat") {
  SpineSeq y{PointMeasure{1.0}, PointMeasure{0.5, 0.25}};
  CHECK(concat(SpineSeq{}, y) == y);
  CHECK(concat(y, SpineSeq{}) == y);
  SpineSeq a{PointMeasure{0.7}}, b{PointMeasure{0.2}};
  CHECK(concat(a, b) == SpineSeq{PointMeasure{0.7}, PointMeasure{0.2}});
  SpineSeq two{PointMeasure{1}, PointMeasure{2}};
  SpineSeq three{PointMeasure{1}, PointMeasure{2}, PointMeasure{3}};
  CHECK(concat(two, three).length() == 5);
}

TEST_CASE("zero measures never enter a sequence") {
  SpineSeq y{PointMeasure{}, PointMeasure{1.0}};
  CHECK(y.length() == 1);
  y.push_back(PointMeasure{});
  CHECK(y.length() == 1);
  y.replace_back(PointMeasure{});
  CHECK(y.empty());
}

TEST_CASE("sup is additive under concat") {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    SpineSeq a, b;
    for (std::size_t k = rng.below(5); k > 0; --k) a.push_back(random_measure(rng, 3));
    for (std::size_t k = rng.below(5); k > 0; --k) b.push_back(random_measure(rng, 3));
    SpineSeq c = concat(a, b);
    CHECK(c.length() == a.length() + b.length());
    CHECK(std::abs(c.sup_support() - a.sup_support() - b.sup_support()) < 1e-12);
  }
}

TEST_CASE("approximate equality") {
  CHECK(approx_equal(PointMeasure{1.0, 0.5}, PointMeasure{1.0 + 1e-12, 0.5}, 1e-9));
  CHECK_FALSE(approx_equal(PointMeasure{1.0, 0.5}, PointMeasure{1.0}, 1e-9));
  CHECK_FALSE(approx_equal(PointMeasure{1.0}, PointMeasure{1.1}, 1e-9));
}
