#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmj/measures.hpp"

namespace cmj {

struct SpineState {
  SpineSeq spine;
  double height = 0.0;
};

/// One step of the spine dynamics.
SpineSeq phi(const SpineSeq& y, const PointMeasure& nu);
void phi_inplace(SpineSeq& y, const PointMeasure& nu);

/// Spine after consuming the first n sticks.
SpineState spine_process(std::span<const Stick> sticks, std::size_t n);
/// Spine of the sticks m, m+1, ... after n-m steps.
SpineSeq shifted_spine(std::span<const Stick> sticks, std::size_t m, std::size_t n);

/// Distance from the top of the spine down to its l-th highest stub (down to
/// the ground when there are fewer than l stubs).
double stub_distance(const SpineSeq& y, std::size_t l);

struct CheckTally {
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct IdentityFailure {
  std::string check;
  std::size_t m = 0;
  std::size_t n = 0;
  std::string detail;
  std::vector<Stick> sticks;  // prefix of the input that the check reads
};

struct IdentityReport {
  std::map<std::string, CheckTally> tallies;
  std::vector<IdentityFailure> failures;  // first few only
  std::size_t pairs = 0;

  bool ok() const;
  std::size_t total_failed() const;
  void merge(const IdentityReport& other);
};

struct VerifyOptions {
  double tol = 1e-9;
  std::size_t max_failures_kept = 20;
};

/// Runs every structural identity on the given (m, n) pairs, m <= n <= size,
/// plus the per-index checks for every n.
IdentityReport verify_identities(std::span<const Stick> sticks,
                                 std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                 const VerifyOptions& opt = {});

/// All pairs when there are at most `budget` of them, else `budget` pairs
/// drawn from the given seed.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n_sticks,
                                                              std::size_t budget,
                                                              std::uint64_t seed);

}  // namespace cmj
