#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cmj/laws.hpp"
#include "cmj/measures.hpp"
#include "cmj/rng.hpp"

namespace cmj {

/// One coupled pair of walks W, W' driven by shared steps xi_k, signs rho_k
/// and marks. Indices of W/W' are walk time; A is in step time.
struct CouplingState {
  double alpha = 0.0, alpha_prime = 0.0;
  std::vector<double> xi;
  std::vector<PointMeasure> marks;
  std::vector<int> rho;
  bool a_found = false;
  std::size_t A = 0;
  std::vector<double> W, Wp;                       // W(0..), W'(0..)
  std::vector<std::size_t> kappa, kappa_prime;     // step index behind each walk step
  std::size_t sigma = 0, sigma_prime = 0;
  double gamma = 0.0;
  std::size_t psi = 0, psi_prime = 0;

  // read off the step itself; differences of the running sums would carry
  // rounding from different histories
  double delta(std::size_t k) const { return xi[kappa[k - 1] - 1]; }
  double delta_prime(std::size_t k) const { return xi[kappa_prime[k - 1] - 1]; }
  const PointMeasure& mark(std::size_t k) const { return marks[kappa[k - 1] - 1]; }
  const PointMeasure& mark_prime(std::size_t k) const { return marks[kappa_prime[k - 1] - 1]; }
};

struct CouplingOutcome {
  CouplingState state;
  bool decided = true;      // false when the step budget ran out first
  bool event = false;
  bool increments_match = false;  // over k = 0..m, evaluated whenever both sides exist
  bool marks_match = false;
};

struct CouplingParams {
  double eps = 0.0;
  double t = 50.0;
  std::size_t m = 3;
  std::size_t budget = 1'000'000;  // steps of xi
};

/// Step source: returns (xi_k, mark_k) and rho_k in {-1, +1}.
using StepSource = std::function<std::pair<double, PointMeasure>()>;
using SignSource = std::function<int()>;

CouplingOutcome run_coupling(double alpha, double alpha_prime, const StepSource& steps,
                             const SignSource& signs, const CouplingParams& par);

/// alpha = 2V*, alpha' = 2U*, xi = 2V* with the stick's births as marks.
CouplingOutcome run_coupling(const StickLaw& law, const CouplingParams& par, Rng& rng);

struct CouplingLawSummary {
  std::string law;
  double eps = 0.0;
  std::size_t replicas = 0, undecided = 0, events = 0, violations = 0;
  // goodness of fit p-values: W(0), pooled Delta_1..m, W'(0), pooled Delta'_1..m
  double p_w0 = 1.0, p_steps = 1.0, p_wp0 = 1.0, p_steps_prime = 1.0;
};

struct CouplingBatch {
  std::vector<CouplingLawSummary> laws;
  double family_level = 0.01;
  std::size_t violations() const;
  bool gof_ok() const;
  bool ok() const { return violations() == 0 && gof_ok(); }
};

struct CouplingCase {
  std::string law;
  double eps;
};

/// The default mix of arithmetic and non-arithmetic laws.
std::vector<CouplingCase> default_coupling_cases();

CouplingBatch run_coupling_batch(const std::vector<CouplingCase>& cases, std::size_t replicas,
                                 const CouplingParams& base, std::uint64_t seed,
                                 unsigned workers = 1);

}  // namespace cmj
