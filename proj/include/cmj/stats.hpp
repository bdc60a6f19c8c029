#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace cmj {

double mean(std::span<const double> x);
/// Standard error of the mean.
double std_error(std::span<const double> x);
/// Linear-interpolation quantile, q in [0,1].
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

/// One-sample Kolmogorov-Smirnov test against a continuous cdf; returns the
/// asymptotic p-value.
double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf);

/// Chi-square goodness of fit for discrete data against a pmf given as
/// value -> probability. Cells with small expected counts are pooled.
double chi2_pvalue(std::span<const double> x, const std::map<double, double>& pmf);

/// Chi-square test of homogeneity between two samples of category labels.
double chi2_two_sample_pvalue(std::span<const long> a, std::span<const long> b);

/// Half the l1 distance between two distributions over the same keys.
template <class K>
double total_variation(const std::map<K, double>& p, const std::map<K, double>& q) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += std::abs(v);
  return 0.5 * s;
}

}  // namespace cmj
