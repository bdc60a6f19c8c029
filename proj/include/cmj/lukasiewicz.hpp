#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cmj/measures.hpp"

namespace cmj {

struct Walk {
  std::vector<std::size_t> children;
  std::vector<long long> S;  // S[k] = sum_{j<k} (children[j] - 1), size N+1
};

Walk walk(std::span<const Stick> sticks);

/// A stick sequence re-indexed either forward from m (position i reads stick
/// m+i) or backward from n (position i reads stick n-1-i). Positions outside
/// the data are unavailable; searches that would need them report "open"
/// through an empty optional.
class LukView {
 public:
  static LukView forward(const Walk& w, std::span<const Stick> sticks, std::ptrdiff_t m);
  static LukView dual(const Walk& w, std::span<const Stick> sticks, std::ptrdiff_t n);

  /// The same view shifted by j positions.
  LukView shifted(std::ptrdiff_t j) const;

  /// Walk value at k (k may be negative).
  std::optional<long long> S(std::ptrdiff_t k) const;
  long long S_at(std::ptrdiff_t k) const;  // throws when unavailable

  bool has_stick(std::ptrdiff_t i) const;
  const Stick& stick(std::ptrdiff_t i) const;

  /// Largest k >= 0 with S(k) available, and likewise for S(-k).
  std::ptrdiff_t forward_extent() const;
  std::ptrdiff_t backward_extent() const;

 private:
  LukView(const Walk* w, std::span<const Stick> s, std::ptrdiff_t anchor, int dir)
      : walk_(w), sticks_(s), anchor_(anchor), dir_(dir) {}
  std::ptrdiff_t boundary(std::ptrdiff_t k) const { return anchor_ + dir_ * k; }

  const Walk* walk_;
  std::span<const Stick> sticks_;
  std::ptrdiff_t anchor_;  // boundary index of position 0 in the prefix-sum array
  int dir_;
};

/// inf{k > 0 : S(k) >= level}
std::optional<std::ptrdiff_t> tau_up(const LukView& v, long long level);
/// inf{k >= 0 : S(k) = -level}
std::optional<std::ptrdiff_t> tau_down(const LukView& v, long long level);
/// level - S(tau_up(level) - 1)
std::optional<long long> undershoot(const LukView& v, long long level);
/// The birth measure just before the passage above `level`, minus its
/// undershoot-many largest atoms.
std::optional<PointMeasure> mu(const LukView& v, long long level);

/// Weak ascending ladder epochs T(0)=0 < T(1) < ... that fall within the data.
std::vector<std::ptrdiff_t> ladder_times(const LukView& v);
/// Q(k), k >= 1, when T(k) is within the data.
std::optional<PointMeasure> ladder_measure(const LukView& v, std::size_t k);
/// min{k : T(k) >= j} and max{k : T(k) <= j}; need the data to reach j.
std::size_t ladder_inverse(const LukView& v, std::ptrdiff_t j);
std::size_t ladder_inverse_tilde(const LukView& v, std::ptrdiff_t j);
/// max_{k=0..m} S(-k)
std::optional<long long> backward_max(const LukView& v, std::ptrdiff_t m);

struct LadderDecomp {
  std::size_t n = 0;
  std::vector<std::size_t> T;   // T[0] = 0, then every epoch <= n
  std::vector<PointMeasure> Q;  // Q[k-1] = Q(k)
  std::vector<double> Y;        // Y[k-1] = sup of Q(k)
  std::vector<long long> zeta;  // undershoot at each epoch
  bool open = true;             // the next epoch would read sticks before index 0

  std::size_t height() const { return T.size() - 1; }
  double chrono_height() const;
  std::size_t inverse(std::size_t j) const;        // min{k : T(k) >= j}
  std::size_t inverse_tilde(std::size_t j) const;  // max{k : T(k) <= j}
  /// (Q(k), ..., Q(1))
  SpineSeq spine_prefix(std::size_t k) const;
  double y_sum(std::size_t k) const;  // Y(1) + ... + Y(k)
};

/// Ladder structure of the walk read backward from n, 0 <= n <= sticks.size().
LadderDecomp ladder_decomp(const Walk& w, std::span<const Stick> sticks, std::size_t n);

/// Non-negative part of {n - T(k) o dual_n}: n and its ancestors, descending.
std::vector<std::size_t> ancestors(const Walk& w, std::span<const Stick> sticks, std::size_t n);

/// Largest common element of the two ancestor sets; empty for disjoint trees.
std::optional<std::size_t> mrca(const Walk& w, std::span<const Stick> sticks, std::size_t m,
                                std::size_t n);

/// D_l of the spine at n, from the backward ladder structure.
double D_functional(const Walk& w, std::span<const Stick> sticks, std::size_t n, long long l);
/// D_0 .. D_lmax in one backward pass.
std::vector<double> D_table(const Walk& w, std::span<const Stick> sticks, std::size_t n,
                            long long lmax);

/// inf{n >= m+1 : S(n) = S(m+1) - k}, searched within the data.
std::optional<std::size_t> chi(const Walk& w, std::size_t m, long long k);

}  // namespace cmj
