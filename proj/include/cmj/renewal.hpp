#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "cmj/laws.hpp"
#include "cmj/measures.hpp"
#include "cmj/rng.hpp"

namespace cmj {

/// Age at birth of a uniformly chosen child of a size-biased stick.
double sample_ystar(const StickLaw& law, Rng& rng);

struct LadderPair {
  std::size_t T = 0;   // first weak ascending ladder epoch of a fresh walk
  long long zeta = 0;  // undershoot just before it
  PointMeasure Q;
};

struct LadderSampleOptions {
  double c = 6.0;                    // abort once S(k) < -c sqrt(k)
  std::uint64_t step_cap = 1'000'000'000;
};

struct LadderDraw {
  std::optional<LadderPair> pair;  // empty when the walk was abandoned
  std::uint64_t steps = 0;
  bool capped = false;             // abandoned by the step cap, not the boundary
};

/// Runs one fresh walk to its first weak ascending ladder epoch.
LadderDraw sample_ladder_pair(const StickLaw& law, Rng& rng, const LadderSampleOptions& opt = {});

/// P(tau^-_x = t), t = 0..tmax, for the walk with steps |P|-1 and the given
/// finite offspring pmf.
std::vector<double> tau_minus_pmf(std::span<const double> offspring_pmf, std::size_t x,
                                  std::size_t tmax);

/// Law of (T, undershoot, |Q|) for T <= tmax given a finite offspring pmf.
std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> ladder_pair_law(
    std::span<const double> offspring_pmf, std::size_t tmax);

struct LadderOracleReport {
  std::size_t accepted = 0, attempts = 0, boundary_aborts = 0, cap_hits = 0;
  std::uint64_t steps = 0;
  double p_finite = 0.0, p_finite_se = 0.0, mean_offspring = 0.0;
  double tv = 0.0;            // empirical (T, undershoot, |Q|) law vs the exact one
  double oracle_mass = 0.0;   // exact mass with T <= tmax
  bool p_finite_ok = false;
  bool tv_ok = false;
  bool ok() const { return p_finite_ok && tv_ok; }
};

/// Draws until `accepted` ladder pairs are in and compares them against
/// ladder_pair_law; laws with T > tmax share one overflow cell.
LadderOracleReport run_ladder_oracle(const StickLaw& law, std::size_t accepted, std::size_t tmax,
                                     double tv_tol, Rng& rng, const LadderSampleOptions& opt = {});

/// Stationary overshoot of the life length.
double sample_vhat(const StickLaw& law, Rng& rng);
/// Uniform point of a size-biased life length ({0, h, ..., v} when arithmetic).
double sample_u(const StickLaw& law, Rng& rng);

}  // namespace cmj
