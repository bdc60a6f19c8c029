#include "cmj/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cmj/parallel.hpp"
#include "cmj/renewal.hpp"
#include "cmj/stats.hpp"

namespace cmj {

CouplingOutcome run_coupling(double alpha, double alpha_prime, const StepSource& steps,
                             const SignSource& signs, const CouplingParams& par) {
  CouplingOutcome out;
  CouplingState& s = out.state;
  s.alpha = alpha;
  s.alpha_prime = alpha_prime;
  s.W = {alpha};
  s.Wp = {alpha_prime};

  bool have_psi = false, have_psi_prime = false;
  auto note_psi = [&] {
    if (!have_psi && s.W.back() >= par.t) {
      have_psi = true;
      s.psi = s.W.size() - 1;
    }
    if (!have_psi_prime && s.Wp.back() >= par.t) {
      have_psi_prime = true;
      s.psi_prime = s.Wp.size() - 1;
    }
  };
  // W'(sigma') - W(sigma) along the steps taken so far
  double wt = alpha_prime - alpha;
  auto found = [&](std::size_t k) {
    s.a_found = true;
    s.A = k;
    s.sigma = s.W.size() - 1;
    s.sigma_prime = s.Wp.size() - 1;
    s.gamma = std::max(*std::max_element(s.W.begin(), s.W.end()),
                       *std::max_element(s.Wp.begin(), s.Wp.end()));
  };
  if (wt >= 0.0 && wt <= par.eps) found(0);
  note_psi();

  std::size_t k = 0;
  for (;;) {
    bool enough = have_psi && have_psi_prime && s.W.size() > par.m && s.Wp.size() > par.m;
    // without A, A >= k+1 already rules the event out once psi <= k+1+m
    if (enough && (s.a_found || s.psi <= k + 1 + par.m)) break;
    if (k >= par.budget) {
      out.decided = false;
      break;
    }
    ++k;
    auto [x, mark] = steps();
    int r = signs();
    int rp = s.a_found ? r : -r;
    s.xi.push_back(x);
    s.marks.push_back(std::move(mark));
    s.rho.push_back(r);
    if (r == 1) {
      s.W.push_back(s.W.back() + x);
      s.kappa.push_back(k);
    }
    if (rp == 1) {
      s.Wp.push_back(s.Wp.back() + x);
      s.kappa_prime.push_back(k);
    }
    if (!s.a_found) {
      wt -= r * x;
      if (wt >= 0.0 && wt <= par.eps) found(k);
    }
    note_psi();
  }
  if (!out.decided) return out;

  out.event = s.a_found && s.gamma < par.t && s.psi > s.A + par.m &&
              s.Wp[s.psi_prime] >= par.t + 2.0 * par.eps;
  out.increments_match = out.marks_match = true;
  for (std::size_t j = 0; j <= par.m; ++j) {
    if (s.psi < j + 1 || s.psi_prime < j + 1) {
      out.increments_match = out.marks_match = false;
      break;
    }
    std::size_t a = s.psi - j, b = s.psi_prime - j;
    if (s.delta(a) != s.delta_prime(b)) out.increments_match = false;
    if (!(s.mark(a) == s.mark_prime(b))) out.marks_match = false;
  }
  return out;
}

CouplingOutcome run_coupling(const StickLaw& law, const CouplingParams& par, Rng& rng) {
  double alpha = 2.0 * law.sample(rng).v();
  double alpha_prime = 2.0 * sample_u(law, rng);
  StepSource steps = [&] {
    Stick st = law.sample(rng);
    return std::make_pair(2.0 * st.v(), st.births());
  };
  SignSource signs = [&] { return rng.coin() ? 1 : -1; };
  return run_coupling(alpha, alpha_prime, steps, signs, par);
}

std::size_t CouplingBatch::violations() const {
  std::size_t v = 0;
  for (const auto& l : laws) v += l.violations;
  return v;
}

bool CouplingBatch::gof_ok() const {
  if (laws.empty()) return true;
  const double level = family_level / (4.0 * static_cast<double>(laws.size()));
  for (const auto& l : laws)
    for (double p : {l.p_w0, l.p_steps, l.p_wp0, l.p_steps_prime})
      if (p < level) return false;
  return true;
}

std::vector<CouplingCase> default_coupling_cases() {
  return {
      {"custom:offspring=geom:0.5,life=const:1,births=uniform", 0.0},
      {"custom:offspring=table:0.25/0.5/0.25,life=ints:1/2/3,births=grid:1", 0.0},
      {"custom:offspring=geom:0.5,life=exp:1,births=uniform", 0.1},
      {"custom:offspring=table:0.5/0/0.5,life=uniform:0.5/1.5,births=uniform", 0.1},
  };
}

namespace {

// Law of 2V and of 2U for a law with an explicit life distribution.
struct DoubledLaws {
  bool arithmetic = false;
  std::function<double(double)> cdf_v, cdf_u;
  std::map<double, double> pmf_v, pmf_u;
};

DoubledLaws doubled_laws(const StickLaw& law) {
  auto life = law.life();
  if (!life) throw std::invalid_argument("coupling statistics need an explicit life law");
  DoubledLaws d;
  const LifeLaw L = *life;
  const double ev = L.mean();
  if (L.span() > 0.0) {
    d.arithmetic = true;
    const double h = L.span();
    for (auto [v, p] : L.atoms()) {
      d.pmf_v[2.0 * v] += p;
      auto n = static_cast<long>(std::llround(v / h));
      for (long j = 0; j <= n; ++j) d.pmf_u[2.0 * h * static_cast<double>(j)] += p * v / ev / static_cast<double>(n + 1);
    }
    return d;
  }
  d.cdf_v = [L](double x) { return L.cdf(x / 2.0); };
  // P(U <= u) = (1/EV) int_0^u P(V > y) dy, Simpson on a fine grid
  d.cdf_u = [L, ev](double x) {
    double u = x / 2.0;
    if (u <= 0.0) return 0.0;
    double top = std::min(u, L.max_value());
    const int n = 2000;
    double h = top / n, acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * (1.0 - L.cdf(h * i));
    }
    return std::min(1.0, acc * h / 3.0 / ev);
  };
  return d;
}

}  // namespace

CouplingBatch run_coupling_batch(const std::vector<CouplingCase>& cases, std::size_t replicas,
                                 const CouplingParams& base, std::uint64_t seed, unsigned workers) {
  CouplingBatch batch;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    StickLaw law = parse_law(cases[c].law);
    CouplingParams par = base;
    par.eps = cases[c].eps;
    struct Slot {
      bool decided, event, ok;
      double w0, wp0;
      std::vector<double> d, dp;
    };
    std::vector<Slot> slots(replicas);
    parallel_for(replicas, workers, [&](std::size_t r) {
      Rng rng = Rng::stream(seed, {0xc0u, c, r});
      CouplingOutcome o = run_coupling(law, par, rng);
      Slot& sl = slots[r];
      sl.decided = o.decided;
      sl.event = o.event;
      sl.ok = o.increments_match && o.marks_match;
      sl.w0 = o.state.W[0];
      sl.wp0 = o.state.Wp[0];
      for (std::size_t k = 1; k <= par.m && k < o.state.W.size(); ++k) sl.d.push_back(o.state.delta(k));
      for (std::size_t k = 1; k <= par.m && k < o.state.Wp.size(); ++k)
        sl.dp.push_back(o.state.delta_prime(k));
    });

    CouplingLawSummary sum;
    sum.law = cases[c].law;
    sum.eps = par.eps;
    sum.replicas = replicas;
    std::vector<double> w0, wp0, d, dp;
    for (const auto& sl : slots) {
      if (!sl.decided) ++sum.undecided;
      if (sl.event) {
        ++sum.events;
        if (!sl.ok) ++sum.violations;
      }
      w0.push_back(sl.w0);
      wp0.push_back(sl.wp0);
      d.insert(d.end(), sl.d.begin(), sl.d.end());
      dp.insert(dp.end(), sl.dp.begin(), sl.dp.end());
    }
    DoubledLaws dl = doubled_laws(law);
    if (dl.arithmetic) {
      sum.p_w0 = chi2_pvalue(w0, dl.pmf_v);
      sum.p_steps = chi2_pvalue(d, dl.pmf_v);
      sum.p_wp0 = chi2_pvalue(wp0, dl.pmf_u);
      sum.p_steps_prime = chi2_pvalue(dp, dl.pmf_v);
    } else {
      sum.p_w0 = ks_pvalue(w0, dl.cdf_v);
      sum.p_steps = ks_pvalue(d, dl.cdf_v);
      sum.p_wp0 = ks_pvalue(wp0, dl.cdf_u);
      sum.p_steps_prime = ks_pvalue(dp, dl.cdf_v);
    }
    batch.laws.push_back(sum);
  }
  return batch;
}

}  // namespace cmj
