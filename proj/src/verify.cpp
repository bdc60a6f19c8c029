#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "cmj/forest.hpp"
#include "cmj/lukasiewicz.hpp"
#include "cmj/rng.hpp"
#include "cmj/spine.hpp"

namespace cmj {

bool IdentityReport::ok() const { return total_failed() == 0; }

std::size_t IdentityReport::total_failed() const {
  std::size_t f = 0;
  for (const auto& [name, t] : tallies) f += t.failed;
  return f;
}

void IdentityReport::merge(const IdentityReport& other) {
  for (const auto& [name, t] : other.tallies) {
    tallies[name].passed += t.passed;
    tallies[name].failed += t.failed;
  }
  pairs += other.pairs;
  for (const auto& f : other.failures)
    if (failures.size() < 20) failures.push_back(f);
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n_sticks,
                                                              std::size_t budget,
                                                              std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t all = (n_sticks + 1) * (n_sticks + 2) / 2;
  if (all <= budget) {
    for (std::size_t n = 0; n <= n_sticks; ++n)
      for (std::size_t m = 0; m <= n; ++m) out.emplace_back(m, n);
    return out;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    auto a = static_cast<std::size_t>(rng.below(n_sticks + 1));
    auto b = static_cast<std::size_t>(rng.below(n_sticks + 1));
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  return out;
}

namespace {

std::string show(const PointMeasure& m) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < m.mass(); ++i) os << (i ? "," : "") << m.atoms()[i];
  os << '}';
  return os.str();
}

std::string show(const SpineSeq& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.length(); ++i) os << (i ? "," : "") << show(s[i]);
  os << ')';
  return os.str();
}

class Checker {
 public:
  Checker(std::span<const Stick> sticks, const VerifyOptions& opt, IdentityReport& rep)
      : sticks_(sticks), opt_(opt), rep_(rep) {}

  void check(const std::string& name, std::size_t m, std::size_t n, bool ok,
             const std::function<std::string()>& detail, std::size_t reads) {
    auto& t = rep_.tallies[name];
    if (ok) {
      ++t.passed;
      return;
    }
    ++t.failed;
    if (rep_.failures.size() < opt_.max_failures_kept) {
      reads = std::min(reads, sticks_.size());
      rep_.failures.push_back(IdentityFailure{
          name, m, n, detail(), std::vector<Stick>(sticks_.begin(), sticks_.begin() + reads)});
    }
  }

  bool close(double a, double b) const { return std::abs(a - b) <= opt_.tol; }
  bool same(const SpineSeq& a, const SpineSeq& b) const { return approx_equal(a, b, opt_.tol); }
  bool same(const PointMeasure& a, const PointMeasure& b) const {
    return approx_equal(a, b, opt_.tol);
  }

 private:
  std::span<const Stick> sticks_;
  const VerifyOptions& opt_;
  IdentityReport& rep_;
};

}  // namespace

IdentityReport verify_identities(std::span<const Stick> sticks,
                                 std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                 const VerifyOptions& opt) {
  IdentityReport rep;
  Checker ck(sticks, opt, rep);
  const std::size_t N = sticks.size();

  ChronForest forest = build_forest(std::vector<Stick>(sticks.begin(), sticks.end()));
  ContourPath path = contour_path(forest);
  Walk W = walk(sticks);
  std::vector<Stick> gsticks = genealogical_map(sticks);

  std::vector<SpineSeq> spine(N + 1), gspine(N + 1);
  for (std::size_t n = 0; n < N; ++n) {
    spine[n + 1] = phi(spine[n], sticks[n].births());
    gspine[n + 1] = phi(gspine[n], gsticks[n].births());
  }
  std::vector<LadderDecomp> dec;
  dec.reserve(N + 1);
  for (std::size_t n = 0; n <= N; ++n) dec.push_back(ladder_decomp(W, sticks, n));

  double life_sum = 0.0;  // V_0 + ... + V_{n-1}
  for (std::size_t n = 0; n <= N; ++n) {
    const LadderDecomp& d = dec[n];
    const std::size_t K = d.height();

    ck.check("height_is_ladder_count", n, n,
             K == forest.depth(n) && spine[n].length() == forest.depth(n),
             [&] {
               return "ladder count " + std::to_string(K) + ", spine length " +
                      std::to_string(spine[n].length()) + ", depth " +
                      std::to_string(forest.depth(n));
             },
             n);
    ck.check("height_is_ladder_sum", n, n,
             ck.close(d.chrono_height(), forest.height(n)) &&
                 ck.close(spine[n].sup_support(), forest.height(n)),
             [&] {
               return "ladder sum " + std::to_string(d.chrono_height()) + ", spine height " +
                      std::to_string(spine[n].sup_support()) + ", birth time " +
                      std::to_string(forest.height(n));
             },
             n);
    ck.check("spine_from_ladder", n, n, ck.same(spine[n], d.spine_prefix(K)),
             [&] { return show(spine[n]) + " vs " + show(d.spine_prefix(K)); }, n);

    bool bounds = std::none_of(d.Q.begin(), d.Q.end(), [](const auto& q) { return q.is_zero(); });
    for (std::size_t j = 0; j <= n; ++j) {
      std::size_t a = d.inverse_tilde(j), b = d.inverse(j);
      bounds = bounds && a <= b && b <= a + 1;
    }
    ck.check("ladder_bounds", n, n, bounds, [] { return std::string("inverse ordering"); }, n);

    for (std::size_t k = 1; k <= K; ++k) {
      SpineSeq expect = concat(spine[n - d.T[k]], d.spine_prefix(k));
      ck.check("spine_prefix_at_ancestor", n - d.T[k], n, ck.same(spine[n], expect),
               [&] { return "k=" + std::to_string(k) + ": " + show(expect); }, n);
    }

    LukView dv = LukView::dual(W, sticks, static_cast<std::ptrdiff_t>(n));
    if (auto tau0 = tau_up(dv, 0)) {
      std::size_t m = n - static_cast<std::size_t>(*tau0);
      long long i = *undershoot(dv, 0);
      auto c = chi(W, m, i);
      bool ok = i >= 0 && static_cast<std::size_t>(i) < W.children[m] && c && *c == n;
      ck.check("return_time", m, n, ok,
               [&] {
                 return "undershoot " + std::to_string(i) + ", return at " +
                        (c ? std::to_string(*c) : std::string("none"));
               },
               n);
    }

    if (n < N) {
      auto anc = ancestors(W, sticks, n);
      ck.check("ancestor_set", n, n, anc == forest.lineage(n),
               [] { return std::string("ancestor sets differ"); }, n + 1);
    }

    bool unit = gspine[n].length() == forest.depth(n);
    for (std::size_t i = 0; unit && i < gspine[n].length(); ++i) {
      const auto& a = gspine[n][i].atoms();
      unit = std::all_of(a.begin(), a.end(), [](double x) { return x == 1.0; }) &&
             gspine[n][i].mass() == spine[n][i].mass();
    }
    ck.check("exploration_length", n, n, unit, [&] { return show(gspine[n]); }, n);

    std::size_t stubs = 0;
    for (const auto& e : spine[n].elements()) stubs += e.mass() - 1;
    auto lmax = static_cast<long long>(stubs + 1);
    auto table = D_table(W, sticks, n, lmax);
    bool mono = true, agree = true;
    for (long long l = 0; l <= lmax; ++l) {
      auto ul = static_cast<std::size_t>(l);
      if (l > 0) mono = mono && table[ul] >= table[ul - 1] - opt.tol;
      double direct = D_functional(W, sticks, n, l);
      agree = agree && ck.close(direct, table[ul]) &&
              ck.close(direct, stub_distance(spine[n], ul));
    }
    ck.check("d_monotone", n, n, mono, [] { return std::string("D decreases"); }, n);
    ck.check("d_stub_distance", n, n, agree,
             [] { return std::string("D routes disagree"); }, n);

    double K_formula = 2.0 * life_sum - forest.height(n);
    ck.check("contour_at_epochs", n, n,
             ck.close(path.K(n), K_formula) && ck.close(path.eval(path.K(n)), forest.height(n)),
             [&] { return "K " + std::to_string(path.K(n)) + " vs " + std::to_string(K_formula); },
             n);
    if (n < N) life_sum += sticks[n].v();
  }

  for (std::size_t m = 0; m < N; ++m) {
    const PointMeasure& P = sticks[m].births();
    for (std::size_t k = 0; k < P.mass(); ++k) {
      auto c = chi(W, m, static_cast<long long>(k));
      if (!c) continue;
      std::size_t h = forest.depth(m);
      bool ok = spine[*c].length() == h + 1 && ck.same(spine[*c][h], P.truncate_largest(k));
      ck.check("spine_at_return", m, *c, ok, [&] { return show(spine[*c]); }, *c);
    }
  }

  for (auto [m, n] : pairs) {
    if (m > n || n > N) continue;
    ++rep.pairs;
    const LadderDecomp& dn = dec[n];
    LukView dm = LukView::dual(W, sticks, static_cast<std::ptrdiff_t>(m));
    const auto reads = n;

    if (m < N && W.children[m] > 0) {
      auto c = chi(W, m, static_cast<long long>(W.children[m]));
      if (n > m && (!c || n < *c)) {
        std::size_t h = forest.depth(m);
        bool ok = forest.depth(n) > h && ck.same(spine[n].prefix(h), spine[m].prefix(h));
        ck.check("spine_stable_before_return", m, n, ok, [&] { return show(spine[n]); }, reads);
      }
    }

    long long L = *backward_max(dm, static_cast<std::ptrdiff_t>(n - m));
    long long minS = *std::min_element(W.S.begin() + static_cast<std::ptrdiff_t>(m),
                                       W.S.begin() + static_cast<std::ptrdiff_t>(n) + 1);
    ck.check("backward_max", m, n, L == W.S[m] - minS,
             [&] { return "L=" + std::to_string(L) + ", S(m)-min=" + std::to_string(W.S[m] - minS); },
             reads);

    auto a = mrca(W, sticks, m, n);
    ck.check("mrca_condition", m, n, (a && *a == m) == (L == 0),
             [&] { return "L=" + std::to_string(L); }, reads);

    SpineSeq Smn = shifted_spine(sticks, m, n);
    std::size_t kt = dn.inverse_tilde(n - m), ki = dn.inverse(n - m);

    ck.check("shifted_height_from_ladder", m, n, ck.close(Smn.sup_support(), dn.y_sum(kt)),
             [&] { return std::to_string(Smn.sup_support()) + " vs " + std::to_string(dn.y_sum(kt)); },
             reads);

    bool two = ck.same(Smn, dn.spine_prefix(kt));
    if (a) {
      two = two && ki <= dn.height() &&
            ck.same(shifted_spine(sticks, *a, n), dn.spine_prefix(ki));
    }
    ck.check("shifted_spine_from_ladder", m, n, two,
             [&] { return show(Smn) + " vs " + show(dn.spine_prefix(kt)); }, reads);

    double minH = forest.height(m);
    for (std::size_t k = m; k <= n; ++k) minH = std::min(minH, forest.height(k));
    ck.check("shifted_spine_height", m, n,
             ck.close(Smn.sup_support(), forest.height(n) - minH),
             [&] { return std::to_string(Smn.sup_support()) + " vs " + std::to_string(forest.height(n) - minH); },
             reads);

    if (m >= 1) {
      double diff = shifted_spine(sticks, m - 1, n).sup_support() - Smn.sup_support();
      double cap = sticks[m - 1].births().sup_support();
      ck.check("shifted_height_monotone", m, n, diff >= -opt.tol && diff <= cap + opt.tol,
               [&] { return "difference " + std::to_string(diff); }, reads);
    }

    double D = D_functional(W, sticks, m, L);
    ck.check("height_difference", m, n,
             ck.close(forest.height(n) - forest.height(m), Smn.sup_support() - D),
             [&] { return "D=" + std::to_string(D); }, reads);
    ck.check("contour_minimum", m, n, ck.close(min_contour(path, m, n), forest.height(m) - D),
             [&] {
               return std::to_string(min_contour(path, m, n)) + " vs " +
                      std::to_string(forest.height(m) - D);
             },
             reads);

    auto tauL = L > 0 ? tau_up(dm, L) : std::optional<std::ptrdiff_t>{};
    if (L > 0) {
      std::optional<std::size_t> via_n, via_m;
      if (ki <= dn.height()) via_n = n - dn.T[ki];
      if (tauL) via_m = m - static_cast<std::size_t>(*tauL);
      ck.check("mrca_routes", m, n, via_n == a && via_m == a,
               [&] { return std::string("ancestor routes disagree"); }, reads);
      if (a && ki <= dn.height()) {
        auto muL = mu(dm, L);
        ck.check("mrca_measure", m, n, muL && ck.same(dn.Q[ki - 1], *muL),
                 [&] { return show(dn.Q[ki - 1]); }, reads);
      }
    }

    if (a) {
      SpineSeq above = shifted_spine(sticks, *a, n);
      SpineSeq expect = Smn;
      if (L > 0) {
        auto muL = mu(dm, L);
        expect = muL ? concat(SpineSeq{*muL}, Smn) : SpineSeq{};
      }
      bool ok = ck.same(spine[n], concat(spine[*a], above)) && ck.same(above, expect);
      ck.check("spine_split_at_mrca", m, n, ok, [&] { return show(above) + " vs " + show(expect); },
               reads);

      if (*a < m && tauL) {
        std::size_t j = ladder_inverse_tilde(dm, *tauL);
        SpineSeq before = concat(spine[*a], dec[m].spine_prefix(j));
        ck.check("spine_before_mrca", m, n, ck.same(spine[m], before),
                 [&] { return show(before); }, reads);
      }
    }
  }
  return rep;
}

}  // namespace cmj
