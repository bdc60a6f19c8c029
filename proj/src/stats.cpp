#include "cmj/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cmj {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x), ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  double var = ss / static_cast<double>(x.size() - 1);
  return std::sqrt(var / static_cast<double>(x.size()));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(x.begin(), x.end());
  double pos = q * static_cast<double>(x.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) return 1.0;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  double sn = std::sqrt(n);
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double chi2_tail(double stat, double dof) {
  if (dof < 1.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

double chi2_pvalue(std::span<const double> x, const std::map<double, double>& pmf) {
  const double n = static_cast<double>(x.size());
  std::map<double, double> counts;
  double outside = 0.0;
  for (double v : x) {
    if (pmf.count(v))
      counts[v] += 1.0;
    else
      outside += 1.0;
  }
  if (outside > 0.0) return 0.0;
  // pool consecutive cells until each expects at least 5 observations
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (const auto& [v, p] : pmf) {
    obs += counts[v];
    exp += p * n;
    if (exp >= 5.0) {
      cells.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (cells.empty())
      cells.emplace_back(obs, exp);
    else {
      cells.back().first += obs;
      cells.back().second += exp;
    }
  }
  double stat = 0.0;
  for (auto [o, e] : cells) stat += (o - e) * (o - e) / e;
  return chi2_tail(stat, static_cast<double>(cells.size()) - 1.0);
}

double chi2_two_sample_pvalue(std::span<const long> a, std::span<const long> b) {
  std::map<long, std::pair<double, double>> table;
  for (long v : a) table[v].first += 1.0;
  for (long v : b) table[v].second += 1.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  // pool sparse categories into their neighbours
  std::vector<std::pair<double, double>> cells;
  double ca = 0.0, cb = 0.0;
  for (const auto& [k, c] : table) {
    ca += c.first;
    cb += c.second;
    if (ca + cb >= 10.0) {
      cells.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (cells.empty())
      cells.emplace_back(ca, cb);
    else {
      cells.back().first += ca;
      cells.back().second += cb;
    }
  }
  double stat = 0.0;
  for (auto [oa, ob] : cells) {
    double tot = oa + ob;
    double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  return chi2_tail(stat, static_cast<double>(cells.size()) - 1.0);
}

}  // namespace cmj
