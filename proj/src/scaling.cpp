#include "cmj/scaling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "cmj/forest.hpp"
#include "cmj/laws.hpp"
#include "cmj/lukasiewicz.hpp"
#include "cmj/parallel.hpp"
#include "cmj/stats.hpp"
#include "json.hpp"

namespace cmj {

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<double> number_list(const std::string& s, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0')
      throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + item + "'");
    out.push_back(x);
  }
  return out;
}

}  // namespace

ScalingConfig parse_scaling_config(std::string_view text) {
  ScalingConfig cfg;
  std::stringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  auto one = [&](const std::string& v) {
    auto xs = number_list(v, line);
    if (xs.size() != 1) throw std::invalid_argument("line " + std::to_string(line) + ": expected one number");
    return xs[0];
  };
  auto count = [&](const std::string& v) {
    double x = one(v);
    if (!(x >= 0.0) || x != std::floor(x))
      throw std::invalid_argument("line " + std::to_string(line) + ": expected a non-negative integer");
    return static_cast<std::size_t>(x);
  };
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(line) + ": expected key = value");
    std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
    if (key == "law") cfg.law = val;
    else if (key == "p") cfg.p = number_list(val, line);
    else if (key == "t") cfg.t = number_list(val, line);
    else if (key == "replicates") cfg.replicates = count(val);
    else if (key == "seed") cfg.seed = count(val);
    else if (key == "eps_exponent") cfg.eps_exponent = one(val);
    else if (key == "interval") {
      auto xs = number_list(val, line);
      if (xs.size() != 2 || !(0.0 <= xs[0] && xs[0] <= xs[1]))
        throw std::invalid_argument("line " + std::to_string(line) + ": interval needs u, v with 0 <= u <= v");
      cfg.u = xs[0];
      cfg.v = xs[1];
    } else if (key == "horizon") cfg.horizon = one(val);
    else if (key == "mean_ystar") cfg.mean_ystar = one(val);
    else if (key == "ystar_samples") cfg.ystar_samples = count(val);
    else throw std::invalid_argument("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  if (cfg.p.empty() || cfg.t.empty()) throw std::invalid_argument("p and t lists must be non-empty");
  for (double p : cfg.p)
    if (!(p >= 1.0)) throw std::invalid_argument("p values must be >= 1");
  for (double t : cfg.t)
    if (!(t > 0.0)) throw std::invalid_argument("t values must be positive");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  return cfg;
}

namespace {

struct Task {
  std::vector<ScalingRow> rows;
  ScalingExtra extra;
};

Task simulate(const StickLaw& law, const ScalingConfig& cfg, const ScalingResult& ctx, double p,
              std::size_t rep) {
  Rng rng = Rng::stream(cfg.seed, {rep, std::bit_cast<std::uint64_t>(p)});
  const double eps = std::pow(p, -ctx.eps_exponent);
  const double beta = ctx.beta_star;
  const double tmax = *std::max_element(cfg.t.begin(), cfg.t.end());
  const auto need_idx = static_cast<std::size_t>(std::floor(p * tmax));
  const double need_K = p * std::max({tmax, cfg.v, cfg.horizon});
  const double need_KG = p * cfg.v / beta;

  ForestBuilder fb;
  std::vector<Stick> sticks;
  double two_v = 0.0;  // 2 * (V_0 + ... + V_{N-1})
  for (;;) {
    const std::size_t N = sticks.size();
    const double KN = two_v - fb.next_birth_time();
    const double KG = 2.0 * static_cast<double>(N) - static_cast<double>(fb.next_depth());
    if (N >= need_idx && KN >= need_K && KG >= need_KG && two_v >= p * tmax) break;
    if (N > 200'000'000) throw std::runtime_error("scaling run did not reach its horizon");
    Stick s = law.sample(rng);
    fb.push(s);
    two_v += 2.0 * s.v();
    sticks.push_back(std::move(s));
  }
  const std::size_t N = sticks.size();
  std::vector<double> H(N + 1), Hc(N + 1), V(N), cumV(N + 1, 0.0), ones(N, 1.0);
  for (std::size_t n = 0; n < N; ++n) {
    H[n] = fb.nodes()[n].birth_time;
    Hc[n] = static_cast<double>(fb.nodes()[n].depth);
    V[n] = sticks[n].v();
    cumV[n + 1] = cumV[n] + V[n];
  }
  H[N] = fb.next_birth_time();
  Hc[N] = static_cast<double>(fb.next_depth());
  Walk w = walk(sticks);
  ContourPath C = ContourPath::from_heights(H, V);
  ContourPath G = ContourPath::from_heights(Hc, ones);

  Task task;
  ScalingExtra& ex = task.extra;
  ex.p = p;
  ex.replicate = rep;
  ex.sticks = N;
  ex.minC = eps * C.min_between(p * cfg.u, p * cfg.v);
  ex.minCcal = eps * G.min_between(p * cfg.u / beta, p * cfg.v / beta);
  ex.maxinc = eps * C.max_increment(p * eps, p * cfg.horizon);
  if (law.unit_births()) ex.heights_equal = H == Hc ? 1 : 0;
  if (law.unit_sticks()) ex.contour_equal = C.breakpoints() == G.breakpoints() ? 1 : 0;

  for (double t : cfg.t) {
    const double pt = p * t;
    ScalingRow r;
    r.p = p;
    r.t = t;
    r.replicate = rep;
    const auto idx = static_cast<std::size_t>(std::floor(pt));
    const auto idx2 = static_cast<std::size_t>(std::floor(pt / (2.0 * beta)));
    // K_j = 2 V(j-1) - H(j) is strictly increasing
    std::size_t lo = 0, hi = N;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (2.0 * cumV[mid] - H[mid] >= pt) hi = mid;
      else lo = mid + 1;
    }
    const std::size_t phi = lo;
    const std::size_t phibar = static_cast<std::size_t>(
        std::lower_bound(cumV.begin() + 1, cumV.end(), pt, [](double a, double b) { return 2.0 * a < b; }) -
        (cumV.begin() + 1));

    r.Hp = eps * H[idx];
    r.Hcalp = eps * Hc[idx];
    r.Cp = eps * C.eval(pt);
    r.Sp = static_cast<double>(w.S[idx]) / (p * eps);
    r.phip = static_cast<double>(phi) / p;
    r.phibarp = static_cast<double>(phibar) / p;
    r.deltaH = r.Hp - ctx.alpha_star * r.Hcalp;
    r.H_at_phi_inf = eps * H[idx2];
    r.deltaC = r.Cp - r.H_at_phi_inf;
    r.epsDelta = eps * static_cast<double>(phi - phibar);
    r.v_phibar = V[phibar];

    // phi - phibar again, from the spine at phibar and the shifted spines
    const std::size_t m = phibar;
    long long lmax = w.S[m] - *std::min_element(w.S.begin() + static_cast<std::ptrdiff_t>(m), w.S.end());
    std::vector<double> D = D_table(w, sticks, m, lmax);
    ForestBuilder shifted;
    long long running_min = w.S[m];
    std::optional<std::size_t> found;
    for (std::size_t k = 0; m + k <= N; ++k) {
      if (k > 0) {
        shifted.push(sticks[m + k - 1]);
        running_min = std::min(running_min, w.S[m + k]);
      }
      const double vbar = k == 0 ? -V[m] : cumV[m + k] - cumV[m + 1];
      const double lhs = 2.0 * vbar - H[m];
      const double rhs = shifted.next_birth_time() - D[static_cast<std::size_t>(w.S[m] - running_min)] -
                         (2.0 * cumV[m + 1] - pt);
      if (lhs >= rhs) {
        found = k;
        break;
      }
    }
    r.delta_formula_ok = found && *found == phi - phibar;
    task.rows.push_back(r);
  }
  return task;
}

void fmt(std::string& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out += buf;
}

}  // namespace

ScalingResult run_scaling(const ScalingConfig& cfg, unsigned workers) {
  StickLaw law = parse_law(cfg.law);
  if (law.mean_offspring() > 1.0 + 1e-12) throw std::invalid_argument("law is supercritical");
  ScalingResult res;
  res.config = cfg;
  res.beta_star = law.mean_v();
  if (cfg.eps_exponent)
    res.eps_exponent = *cfg.eps_exponent;
  else if (auto a = law.offspring().stable_index(); a && law.family_kind() != StickLaw::Family::Independent)
    res.eps_exponent = 1.0 - 1.0 / *a;
  if (cfg.mean_ystar) {
    res.alpha_star = *cfg.mean_ystar;
    res.alpha_exact = true;
  } else if (auto a = law.mean_ystar()) {
    res.alpha_star = *a;
    res.alpha_exact = true;
  } else {
    Rng rng = Rng::stream(cfg.seed, {0xa1});
    std::vector<double> x(cfg.ystar_samples);
    for (auto& xi : x) {
      Stick s = law.sample(rng);
      double sum = 0.0;
      for (double a : s.births().atoms()) sum += a;
      xi = sum;
    }
    res.alpha_star = mean(x);
    res.alpha_star_se = std_error(x);
  }

  std::vector<double> ps = cfg.p;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  const std::size_t R = cfg.replicates;
  std::vector<Task> tasks(ps.size() * R);
  parallel_for(tasks.size(), workers,
               [&](std::size_t i) { tasks[i] = simulate(law, cfg, res, ps[i / R], i % R); });
  for (auto& tk : tasks) {
    for (auto& r : tk.rows) {
      if (!r.delta_formula_ok) ++res.delta_failures;
      res.rows.push_back(r);
    }
    if (tk.extra.heights_equal == 0) ++res.height_failures;
    if (tk.extra.contour_equal == 0) ++res.contour_failures;
    res.extras.push_back(tk.extra);
  }
  return res;
}

std::string rows_csv(const ScalingResult& r) {
  std::string out = "p,t,replicate,Hp,Hcalp,Cp,Sp,phip,phibarp,deltaH,deltaC,epsDelta\n";
  for (const auto& row : r.rows) {
    for (double x : {row.p, row.t, static_cast<double>(row.replicate), row.Hp, row.Hcalp, row.Cp, row.Sp,
                     row.phip, row.phibarp, row.deltaH, row.deltaC, row.epsDelta}) {
      fmt(out, x);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string extras_csv(const ScalingResult& r) {
  std::string out = "p,t,replicate,sticks,v_phibar,minC,minCcal,maxinc,heights_equal,contour_equal,delta_formula_ok\n";
  std::size_t per = r.config.t.size();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const auto& ex = r.extras[i / per];
    for (double x : {row.p, row.t, static_cast<double>(row.replicate), static_cast<double>(ex.sticks),
                     row.v_phibar, ex.minC, ex.minCcal, ex.maxinc, static_cast<double>(ex.heights_equal),
                     static_cast<double>(ex.contour_equal), row.delta_formula_ok ? 1.0 : 0.0}) {
      fmt(out, x);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

namespace {

nlohmann::json describe(std::vector<double> x) {
  nlohmann::json j;
  j["mean"] = mean(x);
  j["q10"] = quantile(x, 0.1);
  j["q50"] = quantile(x, 0.5);
  j["q90"] = quantile(std::move(x), 0.9);
  return j;
}

double mean_abs(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

}  // namespace

std::string summary_json(const ScalingResult& r) {
  nlohmann::json j;
  j["law"] = r.config.law;
  j["seed"] = r.config.seed;
  j["replicates"] = r.config.replicates;
  j["beta_star"] = r.beta_star;
  j["alpha_star"] = r.alpha_star;
  j["alpha_star_se"] = r.alpha_star_se;
  j["alpha_star_exact"] = r.alpha_exact;
  j["eps_exponent"] = r.eps_exponent;
  j["interval"] = {r.config.u, r.config.v};
  j["horizon"] = r.config.horizon;
  j["hard_checks"] = {{"height_failures", r.height_failures},
                      {"contour_failures", r.contour_failures},
                      {"delta_formula_failures", r.delta_failures},
                      {"ok", r.ok()}};
  std::vector<double> ps;
  for (const auto& e : r.extras)
    if (ps.empty() || ps.back() != e.p) ps.push_back(e.p);
  nlohmann::json by_p = nlohmann::json::array();
  for (double p : ps) {
    nlohmann::json jp;
    jp["p"] = p;
    jp["eps"] = std::pow(p, -r.eps_exponent);
    std::vector<double> minC, trees_num, trees_den, maxinc;
    std::size_t sticks = 0;
    for (const auto& e : r.extras) {
      if (e.p != p) continue;
      minC.push_back(e.minC);
      trees_num.push_back(e.minC - r.alpha_star * e.minCcal);
      trees_den.push_back(r.alpha_star * e.minCcal);
      maxinc.push_back(e.maxinc);
      sticks = std::max(sticks, e.sticks);
    }
    jp["max_sticks"] = sticks;
    jp["minC"] = describe(minC);
    jp["ratio_trees"] = mean_abs(trees_num) / mean(trees_den);
    jp["maxinc"] = describe(maxinc);
    nlohmann::json jt = nlohmann::json::array();
    for (double t : r.config.t) {
      std::vector<double> Hp, Hcalp, Cp, Sp, phip, phibarp, dH, dC, eD, aH, HC, vphi;
      for (const auto& row : r.rows) {
        if (row.p != p || row.t != t) continue;
        Hp.push_back(row.Hp);
        Hcalp.push_back(row.Hcalp);
        Cp.push_back(row.Cp);
        Sp.push_back(row.Sp);
        phip.push_back(row.phip);
        phibarp.push_back(row.phibarp);
        dH.push_back(row.deltaH);
        dC.push_back(row.deltaC);
        eD.push_back(row.epsDelta);
        aH.push_back(r.alpha_star * row.Hcalp);
        HC.push_back(row.H_at_phi_inf);
        vphi.push_back(row.v_phibar);
      }
      nlohmann::json e;
      e["t"] = t;
      e["Hp"] = describe(Hp);
      e["Hcalp"] = describe(Hcalp);
      e["Cp"] = describe(Cp);
      e["Sp"] = describe(Sp);
      e["phip"] = describe(phip);
      e["phibarp"] = describe(phibarp);
      e["deltaH"] = describe(dH);
      e["deltaC"] = describe(dC);
      e["epsDelta"] = describe(eD);
      e["v_phibar"] = describe(vphi);
      e["ratio_H"] = mean_abs(dH) / mean(aH);
      e["ratio_C"] = mean_abs(dC) / mean(HC);
      e["phi_inf"] = t / (2.0 * r.beta_star);
      jt.push_back(e);
    }
    jp["times"] = jt;
    by_p.push_back(jp);
  }
  j["by_p"] = by_p;
  return j.dump(2) + "\n";
}

}  // namespace cmj
