#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cmj/coupling.hpp"
#include "cmj/laws.hpp"
#include "cmj/lukasiewicz.hpp"
#include "cmj/renewal.hpp"
#include "cmj/scaling.hpp"
#include "cmj/stats.hpp"

using namespace cmj;

namespace {

std::vector<Stick> draw_sticks(const StickLaw& law, std::size_t n, Rng& rng) {
  std::vector<Stick> s;
  s.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.push_back(law.sample(rng));
  return s;
}

// residual life of a renewal process with this life law
double vhat_uniform_cdf(double x) {  // V uniform on [0.5, 1.5]
  if (x <= 0.0) return 0.0;
  if (x <= 0.5) return x;
  if (x >= 1.5) return 1.0;
  return 1.0 - 0.5 * (1.5 - x) * (1.5 - x);
}

}  // namespace

TEST_CASE("ystar on simple laws") {
  Rng rng(1);
  StickLaw det = parse_law("deterministic:a=0.3");
  for (int i = 0; i < 100; ++i) CHECK(sample_ystar(det, rng) == 0.3);

  StickLaw two = parse_law("custom:offspring=table:0.5/0/0.5,life=const:1,births=fixed:0.75/0.25");
  std::set<double> seen;
  for (int i = 0; i < 2000; ++i) seen.insert(sample_ystar(two, rng));
  CHECK(seen == std::set<double>{0.25, 0.75});

  StickLaw none = parse_law("custom:offspring=dirac:0");
  CHECK_THROWS(sample_ystar(none, rng));
}

TEST_CASE("ystar mean against the integral of the birth measure") {
  // size-biasing divides by the mean offspring, which is 1 for critical laws
  std::uint64_t tag = 0;
  for (std::string spec : {"geometric", "binary", "custom:offspring=geom:0.4,life=exp:2,births=uniform",
                           "family1", "family2:alpha=2"}) {
    // smaller alpha leaves the normal domain and the standard error means nothing
    INFO(spec);
    StickLaw law = parse_law(spec);
    Rng rng = Rng::stream(2, {tag++});
    std::vector<double> y(100000);
    for (auto& v : y) v = sample_ystar(law, rng);
    REQUIRE(law.mean_ystar());
    CHECK(std::abs(mean(y) - *law.mean_ystar() / law.mean_offspring()) <= 3.0 * std_error(y));
  }
}

TEST_CASE("family descriptors") {
  StickLaw f1 = parse_law("family1:alpha=1.5");
  CHECK(f1.mean_v() == doctest::Approx(2.0));
  CHECK(*f1.mean_ystar() == doctest::Approx(1.0));
  CHECK(f1.unit_births());
  StickLaw f2 = parse_law("family2:alpha=1.5");
  CHECK(f2.mean_v() == doctest::Approx(2.0));
  // xi = 0 contributes no child at all
  CHECK(*f2.mean_ystar() == doctest::Approx(1.0 + f2.offspring().pmf(0)));
  CHECK_FALSE(f2.unit_births());
  CHECK_FALSE(parse_law("generalized:alpha=1.7,f=sqrt").mean_ystar().has_value());
  CHECK_THROWS(parse_law("family1:alpha=2.5"));
  CHECK_THROWS(parse_law("family1:alpha=1"));
}

TEST_CASE("stable offspring pmf") {
  for (double alpha : {1.2, 1.5, 2.0}) {
    OffspringLaw o = OffspringLaw::stable(alpha);
    double s = 0.0, m = 0.0;
    for (std::size_t k = 0; k <= 1000000; ++k) {
      s += o.pmf(k);
      m += static_cast<double>(k) * o.pmf(k);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(o.mean() == doctest::Approx(1.0));
    CHECK(m <= 1.0);
    CHECK(o.pmf(2) / o.pmf(1) == doctest::Approx(std::pow(2.0, -(alpha + 1.0))));
    CHECK(*o.stable_index() == alpha);
  }
}

TEST_CASE("law spec errors") {
  CHECK_THROWS_AS(parse_law("nosuch"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("geometric:zz=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("geometric:q"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("geometric:q=1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("custom:offspring=foo:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("custom:offspring=table:0.5/0.4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("custom:life=uniform:2/1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_law("custom:offspring=dirac:2,life=const:1,births=fixed:0.5/1.5"),
                  std::invalid_argument);
  CHECK(parse_law("binary").mean_offspring() == doctest::Approx(1.0));
}

TEST_CASE("sticks respect their law") {
  Rng rng(6);
  StickLaw law = parse_law("custom:offspring=table:0.2/0.3/0.5,life=uniform:0.5/1.5,births=uniform");
  for (int i = 0; i < 2000; ++i) {
    Stick s = law.sample(rng);
    CHECK(s.v() >= 0.5);
    CHECK(s.v() <= 1.5);
    for (double a : s.births().atoms()) {
      CHECK(a > 0.0);
      CHECK(a <= s.v());
    }
  }
  StickLaw grid = parse_law("custom:offspring=geom:0.5,life=ints:1/2/3,births=grid:0.5");
  for (int i = 0; i < 2000; ++i) {
    Stick st = grid.sample(rng);
    for (double a : st.births().atoms()) CHECK(std::fmod(a, 0.5) == 0.0);
  }
}

TEST_CASE("tau minus pmf") {
  std::vector<double> two{0.5, 0.0, 0.5};
  auto t0 = tau_minus_pmf(two, 0, 10);
  CHECK(t0[0] == 1.0);
  for (std::size_t t = 1; t <= 10; ++t) CHECK(t0[t] == 0.0);

  std::vector<double> zero{1.0};
  auto tz = tau_minus_pmf(zero, 4, 10);
  for (std::size_t t = 0; t <= 10; ++t) CHECK(tz[t] == (t == 4 ? 1.0 : 0.0));

  auto t1 = tau_minus_pmf(two, 1, 10);
  CHECK(t1[1] == doctest::Approx(0.5));
  CHECK(t1[2] == 0.0);
  CHECK(t1[3] == doctest::Approx(0.125));

  // hitting time theorem: P(tau_x = t) = (x/t) P(S_t = -x)
  std::vector<double> pmf{0.3, 0.4, 0.2, 0.1};
  const std::size_t x = 2, tmax = 14;
  auto tau = tau_minus_pmf(pmf, x, tmax);
  std::map<long, double> dist{{0, 1.0}};
  for (std::size_t t = 1; t <= tmax; ++t) {
    std::map<long, double> next;
    for (auto [s, p] : dist)
      for (std::size_t k = 0; k < pmf.size(); ++k) next[s + static_cast<long>(k) - 1] += p * pmf[k];
    dist = std::move(next);
    double kemperman = static_cast<double>(x) / static_cast<double>(t) * dist[-static_cast<long>(x)];
    CHECK(tau[t] == doctest::Approx(kemperman).epsilon(1e-12));
  }
}

TEST_CASE("ladder pair law sums to the finite mass") {
  std::vector<double> two{0.5, 0.0, 0.5};
  auto law = ladder_pair_law(two, 200);
  double total = 0.0;
  for (auto [k, p] : law) {
    auto [T, z, q] = k;
    CHECK(T >= 1);
    CHECK(q + z == 2);  // a two-child stick loses its undershoot
    total += p;
  }
  // P(tau_0 < inf) equals the mean offspring; the tail beyond 200 decays like t^-1/2
  CHECK(total < 1.0);
  CHECK(total > 0.9);
  CHECK(law.at({1, 0, 2}) == doctest::Approx(0.5));
}

TEST_CASE("ladder pair with exactly one child") {
  StickLaw one = parse_law("custom:offspring=dirac:1,life=const:2,births=fixed:0.7");
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    LadderDraw d = sample_ladder_pair(one, rng);
    REQUIRE(d.pair);
    CHECK(d.pair->T == 1);
    CHECK(d.pair->zeta == 0);
    CHECK(d.pair->Q == PointMeasure{0.7});
  }
}

TEST_CASE("small ladder oracle run") {
  StickLaw law = parse_law("binary");
  Rng rng(12);
  LadderOracleReport r = run_ladder_oracle(law, 20000, 60, 0.03, rng);
  CHECK(r.accepted == 20000);
  CHECK(r.tv <= 0.03);
  CHECK(r.p_finite_ok);
  CHECK(r.oracle_mass > 0.85);
}

TEST_CASE("subcritical ladder probability") {
  StickLaw law = parse_law("custom:offspring=geom:0.4,life=const:1,births=uniform");
  Rng rng(13);
  std::size_t finite = 0, n = 20000;
  for (std::size_t i = 0; i < n; ++i) finite += sample_ladder_pair(law, rng).pair ? 1 : 0;
  double p = static_cast<double>(finite) / static_cast<double>(n);
  double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
  CHECK(std::abs(p - law.mean_offspring()) <= 3.0 * se + 1e-3);
}

TEST_CASE("ladder increments are identically distributed") {
  // first vs later ladder increments of the dual walk, subcritical so the
  // epochs stop long before the data does
  StickLaw law = parse_law("geometric:q=0.4");
  std::vector<long> first, later;
  for (std::uint64_t rep = 0; rep < 4000; ++rep) {
    Rng rng = Rng::stream(14, {rep});
    auto s = draw_sticks(law, 400, rng);
    Walk w = walk(s);
    LadderDecomp d = ladder_decomp(w, s, s.size());
    for (std::size_t k = 1; k < d.T.size(); ++k) {
      long dt = std::min<long>(static_cast<long>(d.T[k] - d.T[k - 1]), 6);
      long q = std::min<long>(static_cast<long>(d.Q[k - 1].mass()), 4);
      (k == 1 ? first : later).push_back(10 * dt + q);
    }
  }
  REQUIRE(first.size() > 1000);
  REQUIRE(later.size() > 1000);
  CHECK(chi2_two_sample_pvalue(first, later) >= 0.01);
}

TEST_CASE("stationary overshoot") {
  Rng rng = Rng::stream(15, {0});
  std::vector<double> x(20000);

  StickLaw cont = parse_law("custom:life=const:2/cont");
  for (auto& v : x) v = sample_vhat(cont, rng);
  CHECK(ks_pvalue(x, [](double t) { return std::clamp(t / 2.0, 0.0, 1.0); }) >= 0.01);

  StickLaw ex = parse_law("custom:life=exp:1.5");
  for (auto& v : x) v = sample_vhat(ex, rng);
  CHECK(ks_pvalue(x, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-1.5 * t); }) >= 0.01);

  StickLaw unit = parse_law("custom:life=const:1");
  for (int i = 0; i < 100; ++i) CHECK(sample_vhat(unit, rng) == 0.0);

  // P(V = kh) = h P(V > kh) / E V with V uniform on {1,2,3}
  StickLaw ints = parse_law("custom:life=ints:1/2/3");
  for (auto& v : x) v = sample_vhat(ints, rng);
  CHECK(chi2_pvalue(x, {{0.0, 0.5}, {1.0, 1.0 / 3.0}, {2.0, 1.0 / 6.0}}) >= 0.01);

  StickLaw uni = parse_law("custom:life=uniform:0.5/1.5");
  for (auto& v : x) v = sample_vhat(uni, rng);
  CHECK(ks_pvalue(x, vhat_uniform_cdf) >= 0.01);
}

TEST_CASE("stationary renewal is shift invariant") {
  StickLaw uni = parse_law("custom:life=uniform:0.5/1.5");
  Rng rng = Rng::stream(16, {0});
  std::vector<double> residual(20000);
  for (auto& r : residual) {
    double t = sample_vhat(uni, rng);
    while (t <= 1.0) t += uni.life()->sample(rng);
    r = t - 1.0;
  }
  CHECK(ks_pvalue(residual, vhat_uniform_cdf) >= 0.01);
}

TEST_CASE("uniform point of a size-biased life") {
  Rng rng = Rng::stream(17, {0});
  std::vector<double> x(20000);
  StickLaw unit = parse_law("custom:life=const:1");
  for (auto& v : x) v = sample_u(unit, rng);
  CHECK(chi2_pvalue(x, {{0.0, 0.5}, {1.0, 0.5}}) >= 0.01);
  StickLaw cont = parse_law("custom:life=const:2/cont");
  for (auto& v : x) v = sample_u(cont, rng);
  CHECK(ks_pvalue(x, [](double t) { return std::clamp(t / 2.0, 0.0, 1.0); }) >= 0.01);
}

TEST_CASE("coupling with a wide window meets at once") {
  StickLaw law = parse_law("custom:offspring=geom:0.5,life=exp:1,births=uniform");
  CouplingParams par;
  par.eps = 1e9;
  Rng rng(18);
  std::size_t met = 0;
  for (int i = 0; i < 200; ++i) {
    CouplingOutcome o = run_coupling(law, par, rng);
    REQUIRE(o.decided);
    const auto& st = o.state;
    // W'(0) - W(0) already lies in [0, eps] whenever it is non-negative
    if (st.alpha_prime >= st.alpha) {
      ++met;
      CHECK(st.a_found);
      CHECK(st.A == 0);
      CHECK(st.sigma == 0);
      CHECK(st.sigma_prime == 0);
      // same steps from the start, so the walks agree after relabelling
      REQUIRE(st.kappa == st.kappa_prime);
      for (std::size_t k = 1; k <= st.kappa.size(); ++k) {
        CHECK(st.delta(k) == st.delta_prime(k));
        CHECK(st.mark(k) == st.mark_prime(k));
      }
    }
  }
  CHECK(met > 20);
}

TEST_CASE("coupling on the unit lattice") {
  // W' - W moves by +-2 from 0 or -2, so A is finite; the run may still stop
  // before it once psi rules the event out
  StickLaw law = parse_law("custom:offspring=geom:0.5,life=const:1,births=uniform");
  CouplingParams par;
  par.eps = 0.0;
  Rng rng(19);
  std::size_t events = 0;
  for (int i = 0; i < 500; ++i) {
    CouplingOutcome o = run_coupling(law, par, rng);
    REQUIRE(o.decided);
    const auto& st = o.state;
    if (!st.a_found) CHECK(st.psi <= st.xi.size() + 1 + par.m);
    if (o.event) {
      ++events;
      CHECK(o.increments_match);
      CHECK(o.marks_match);
    }
  }
  CHECK(events > 0);
}

TEST_CASE("coupling from given primitives") {
  // W from 1 and W' from 3 with unit steps; the gap closes after six signs
  std::vector<int> signs{1, -1, -1, 1, 1, 1};
  std::size_t si = 0;
  StepSource steps = [] { return std::make_pair(1.0, PointMeasure{0.5}); };
  SignSource sgn = [&] { return si < signs.size() ? signs[si++] : 1; };
  CouplingParams par;
  par.eps = 0.0;
  par.t = 10.0;
  par.m = 2;
  CouplingOutcome o = run_coupling(1.0, 3.0, steps, sgn, par);
  REQUIRE(o.decided);
  const auto& st = o.state;
  CHECK(st.a_found);
  CHECK(st.A == 6);
  CHECK(st.sigma == 4);
  CHECK(st.sigma_prime == 2);
  CHECK(st.W[st.sigma] == st.Wp[st.sigma_prime]);
  CHECK(st.gamma == 5.0);
  CHECK(st.psi == 9);
  CHECK(st.psi_prime == 7);
  CHECK(st.kappa == std::vector<std::size_t>{1, 4, 5, 6, 7, 8, 9, 10, 11});
  CHECK(st.kappa_prime == std::vector<std::size_t>{2, 3, 7, 8, 9, 10, 11});
  CHECK(o.event);
  CHECK(o.increments_match);
  CHECK(o.marks_match);
}

TEST_CASE("small coupling batch") {
  CouplingParams base;
  CouplingBatch b = run_coupling_batch(default_coupling_cases(), 300, base, 20, 2);
  CHECK(b.laws.size() == default_coupling_cases().size());
  CHECK(b.violations() == 0);
  for (const auto& l : b.laws) {
    INFO(l.law);
    CHECK(l.replicas == 300);
    CHECK(l.undecided < 3);
  }
}

TEST_CASE("scaling config") {
  ScalingConfig c = parse_scaling_config(
      "# comment\nlaw = gw:q=0.5\np = 100, 1000\nt = 0.5,1\nreplicates = 3\nseed = 9\n"
      "interval = 0.25, 0.75\n");
  CHECK(c.law == "gw:q=0.5");
  CHECK(c.p == std::vector<double>{100, 1000});
  CHECK(c.t == std::vector<double>{0.5, 1});
  CHECK(c.replicates == 3);
  CHECK(c.seed == 9);
  CHECK(c.u == 0.25);
  CHECK(c.v == 0.75);
  auto message = [](const char* text) {
    try {
      parse_scaling_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("law = gw\nfoo = 1\n").rfind("line 2", 0) == 0);
  CHECK(message("\n\np = 1, x\n").rfind("line 3", 0) == 0);
  CHECK(message("replicates = -1\n").rfind("line 1", 0) == 0);
  CHECK(message("just words\n").rfind("line 1", 0) == 0);
  CHECK(message("interval = 1, 0.5\n").rfind("line 1", 0) == 0);
  CHECK_FALSE(message("p = 0.5\n").empty());
}

TEST_CASE("unit sticks scale without any chronological distortion") {
  ScalingConfig c;
  c.law = "gw";
  c.p = {100, 1000};
  c.t = {0.5, 1.0};
  c.replicates = 5;
  ScalingResult r = run_scaling(c);
  CHECK(r.ok());
  CHECK(r.alpha_exact);
  CHECK(r.alpha_star == 1.0);
  for (const auto& row : r.rows) CHECK(row.deltaH == 0.0);
  for (const auto& e : r.extras) {
    CHECK(e.heights_equal == 1);
    CHECK(e.contour_equal == 1);
  }
}

TEST_CASE("scaling output does not depend on the worker count") {
  ScalingConfig c;
  c.law = "geometric";
  c.p = {200, 2000};
  c.t = {0.5, 1.0};
  c.replicates = 6;
  c.seed = 4;
  ScalingResult a = run_scaling(c, 1), b = run_scaling(c, 3);
  CHECK(rows_csv(a) == rows_csv(b));
  CHECK(extras_csv(a) == extras_csv(b));
  CHECK(summary_json(a) == summary_json(b));
  CHECK(a.ok());
  c.seed = 5;
  CHECK(rows_csv(run_scaling(c, 2)) != rows_csv(a));
}

TEST_CASE("life at the time-change index approaches the size-biased law") {
  // V in {1, 10}; the stick straddling pt/2 has V = 10 with probability 10/11 in the limit
  ScalingConfig c;
  c.law = "custom:offspring=geom:0.5,life=ints:1/10,births=uniform";
  c.p = {3, 300};
  c.t = {1.0};
  c.replicates = 3000;
  c.seed = 21;
  ScalingResult r = run_scaling(c, 2);
  std::map<double, std::map<double, double>> freq;
  for (const auto& row : r.rows) freq[row.p][row.v_phibar] += 1.0 / 3000.0;
  std::map<double, double> target{{1.0, 1.0 / 11.0}, {10.0, 10.0 / 11.0}};
  double tv_small = total_variation(freq[3], target), tv_large = total_variation(freq[300], target);
  // at pt = 3 the limit weight 10/11 is still only 3/4
  CHECK(tv_small == doctest::Approx(10.0 / 11.0 - 0.75).epsilon(0.25));
  CHECK(tv_large < tv_small);
  CHECK(tv_large < 0.05);
}
