#include "cmj/renewal.hpp"

#include <cmath>
#include <stdexcept>

#include "cmj/stats.hpp"

namespace cmj {

double sample_ystar(const StickLaw& law, Rng& rng) {
  if (law.mean_offspring() <= 0.0) throw std::domain_error("law never has children");
  std::size_t k = law.offspring().sample_size_biased(rng);
  std::size_t r = static_cast<std::size_t>(rng.below(k));
  return law.atom_given_count(k, r, rng);
}

LadderDraw sample_ladder_pair(const StickLaw& law, Rng& rng, const LadderSampleOptions& opt) {
  LadderDraw out;
  const double c2 = opt.c * opt.c;
  const auto thresholds = law.offspring().raw_thresholds();
  auto draw_count = [&]() -> std::size_t {
    if (thresholds.empty()) return law.offspring().sample(rng);
    std::uint64_t u = rng();
    std::size_t k = 0;
    // branch-free: the count is a coin flip the predictor cannot learn
    for (std::size_t j = 0; j + 1 < thresholds.size(); ++j) k += u >= thresholds[j];
    return k;
  };
  long long S = 0;
  for (std::uint64_t k = 1;; ++k) {
    std::size_t children = draw_count();
    long long next = S + static_cast<long long>(children) - 1;
    if (next >= 0) {
      Stick s = law.sample_given_count(children, rng);
      out.steps = k;
      out.pair = LadderPair{k, -S, s.births().truncate_largest(static_cast<std::size_t>(-S))};
      return out;
    }
    S = next;
    if (static_cast<double>(S) * static_cast<double>(S) > c2 * static_cast<double>(k)) {
      out.steps = k;
      return out;
    }
    if (k >= opt.step_cap) {
      out.steps = k;
      out.capped = true;
      return out;
    }
  }
}

std::vector<double> tau_minus_pmf(std::span<const double> pmf, std::size_t x, std::size_t tmax) {
  std::vector<double> out(tmax + 1, 0.0);
  if (x == 0) {
    out[0] = 1.0;
    return out;
  }
  // mass[j]: probability of sitting j above the target without having hit it
  std::vector<double> mass(tmax + 2, 0.0), next(tmax + 2, 0.0);
  if (x > tmax) return out;
  mass[x] = 1.0;
  for (std::size_t t = 1; t <= tmax; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    const std::size_t reach = tmax - t;  // heights above this cannot hit by tmax
    for (std::size_t j = 1; j < mass.size(); ++j) {
      if (mass[j] == 0.0) continue;
      for (std::size_t c = 0; c < pmf.size(); ++c) {
        if (pmf[c] == 0.0) continue;
        std::size_t to = j + c - 1;
        if (to == 0)
          out[t] += mass[j] * pmf[c];
        else if (to <= reach)
          next[to] += mass[j] * pmf[c];
      }
    }
    std::swap(mass, next);
  }
  return out;
}

std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> ladder_pair_law(
    std::span<const double> pmf, std::size_t tmax) {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
  if (m <= 0.0) throw std::domain_error("law never has children");
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> law;
  for (std::size_t x = 0; x + 1 < pmf.size(); ++x) {
    auto tau = tau_minus_pmf(pmf, x, tmax);
    for (std::size_t k = x + 1; k < pmf.size(); ++k) {
      if (pmf[k] == 0.0) continue;
      for (std::size_t t = 1; t <= tmax; ++t) {
        double p = pmf[k] * tau[t - 1] / m;
        if (p > 0.0) law[{t, x, k - x}] += p;
      }
    }
  }
  return law;
}

LadderOracleReport run_ladder_oracle(const StickLaw& law, std::size_t accepted, std::size_t tmax,
                                     double tv_tol, Rng& rng, const LadderSampleOptions& opt) {
  auto top = law.offspring().max_support();
  if (!top) throw std::invalid_argument("oracle needs a bounded offspring law");
  std::vector<double> pmf(*top + 1);
  for (std::size_t k = 0; k <= *top; ++k) pmf[k] = law.offspring().pmf(k);

  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  const Key overflow{0, 0, 0};  // T >= 1 always, so this cell is free
  std::map<Key, double> exact = ladder_pair_law(pmf, tmax);
  LadderOracleReport rep;
  for (const auto& [k, p] : exact) rep.oracle_mass += p;
  exact[overflow] = std::max(0.0, 1.0 - rep.oracle_mass);

  std::map<Key, double> seen;
  while (rep.accepted < accepted) {
    LadderDraw d = sample_ladder_pair(law, rng, opt);
    ++rep.attempts;
    rep.steps += d.steps;
    if (!d.pair) {
      ++(d.capped ? rep.cap_hits : rep.boundary_aborts);
      continue;
    }
    ++rep.accepted;
    const auto& lp = *d.pair;
    Key key = lp.T <= tmax ? Key{lp.T, static_cast<std::size_t>(lp.zeta), lp.Q.mass()} : overflow;
    seen[key] += 1.0;
  }
  for (auto& [k, c] : seen) c /= static_cast<double>(rep.accepted);
  rep.tv = total_variation(seen, exact);
  rep.tv_ok = rep.tv <= tv_tol;

  const double n = static_cast<double>(rep.attempts);
  rep.mean_offspring = law.mean_offspring();
  rep.p_finite = static_cast<double>(rep.accepted) / n;
  rep.p_finite_se = std::sqrt(rep.p_finite * (1.0 - rep.p_finite) / n);
  rep.p_finite_ok = std::abs(rep.p_finite - rep.mean_offspring) <= 3.0 * rep.p_finite_se + 1e-15;
  return rep;
}

namespace {

double biased_life(const StickLaw& law, Rng& rng) {
  if (auto life = law.life()) return life->sample_size_biased(rng);
  double m = law.offspring().mean();
  std::size_t k = rng.uniform() * (1.0 + m) < 1.0 ? law.offspring().sample(rng)
                                                   : law.offspring().sample_size_biased(rng);
  return 1.0 + static_cast<double>(k);
}

}  // namespace

double sample_vhat(const StickLaw& law, Rng& rng) {
  double v = biased_life(law, rng);
  double h = law.span();
  if (h > 0.0) return h * static_cast<double>(rng.below(static_cast<std::uint64_t>(std::llround(v / h))));
  return v * rng.uniform();
}

double sample_u(const StickLaw& law, Rng& rng) {
  double v = biased_life(law, rng);
  double h = law.span();
  if (h > 0.0)
    return h * static_cast<double>(rng.below(static_cast<std::uint64_t>(std::llround(v / h)) + 1));
  return v * rng.uniform();
}

}  // namespace cmj
