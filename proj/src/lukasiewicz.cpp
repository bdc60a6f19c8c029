#include "cmj/lukasiewicz.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmj {

Walk walk(std::span<const Stick> sticks) {
  Walk w;
  w.children.reserve(sticks.size());
  w.S.reserve(sticks.size() + 1);
  w.S.push_back(0);
  for (const auto& s : sticks) {
    w.children.push_back(s.children());
    w.S.push_back(w.S.back() + static_cast<long long>(s.children()) - 1);
  }
  return w;
}

LukView LukView::forward(const Walk& w, std::span<const Stick> sticks, std::ptrdiff_t m) {
  return LukView(&w, sticks, m, +1);
}

LukView LukView::dual(const Walk& w, std::span<const Stick> sticks, std::ptrdiff_t n) {
  return LukView(&w, sticks, n, -1);
}

LukView LukView::shifted(std::ptrdiff_t j) const {
  return LukView(walk_, sticks_, boundary(j), dir_);
}

std::optional<long long> LukView::S(std::ptrdiff_t k) const {
  const auto N = static_cast<std::ptrdiff_t>(walk_->S.size()) - 1;
  std::ptrdiff_t b0 = anchor_, bk = boundary(k);
  if (b0 < 0 || b0 > N || bk < 0 || bk > N) return std::nullopt;
  return dir_ * (walk_->S[static_cast<std::size_t>(bk)] - walk_->S[static_cast<std::size_t>(b0)]);
}

long long LukView::S_at(std::ptrdiff_t k) const {
  auto s = S(k);
  if (!s) throw std::out_of_range("walk value outside the available sticks");
  return *s;
}

bool LukView::has_stick(std::ptrdiff_t i) const {
  std::ptrdiff_t b = std::min(boundary(i), boundary(i + 1));
  return b >= 0 && b < static_cast<std::ptrdiff_t>(sticks_.size());
}

const Stick& LukView::stick(std::ptrdiff_t i) const {
  if (!has_stick(i)) throw std::out_of_range("stick outside the available range");
  return sticks_[static_cast<std::size_t>(std::min(boundary(i), boundary(i + 1)))];
}

std::ptrdiff_t LukView::forward_extent() const {
  const auto N = static_cast<std::ptrdiff_t>(walk_->S.size()) - 1;
  if (anchor_ < 0 || anchor_ > N) return -1;
  return dir_ > 0 ? N - anchor_ : anchor_;
}

std::ptrdiff_t LukView::backward_extent() const {
  const auto N = static_cast<std::ptrdiff_t>(walk_->S.size()) - 1;
  if (anchor_ < 0 || anchor_ > N) return -1;
  return dir_ > 0 ? anchor_ : N - anchor_;
}

std::optional<std::ptrdiff_t> tau_up(const LukView& v, long long level) {
  for (std::ptrdiff_t k = 1; k <= v.forward_extent(); ++k)
    if (v.S_at(k) >= level) return k;
  return std::nullopt;
}

std::optional<std::ptrdiff_t> tau_down(const LukView& v, long long level) {
  for (std::ptrdiff_t k = 0; k <= v.forward_extent(); ++k)
    if (v.S_at(k) == -level) return k;
  return std::nullopt;
}

std::optional<long long> undershoot(const LukView& v, long long level) {
  auto t = tau_up(v, level);
  if (!t) return std::nullopt;
  return level - v.S_at(*t - 1);
}

std::optional<PointMeasure> mu(const LukView& v, long long level) {
  auto t = tau_up(v, level);
  if (!t) return std::nullopt;
  long long z = level - v.S_at(*t - 1);
  return v.stick(*t - 1).births().truncate_largest(static_cast<std::size_t>(z));
}

std::vector<std::ptrdiff_t> ladder_times(const LukView& v) {
  std::vector<std::ptrdiff_t> T{0};
  long long record = v.S(0).value_or(0);
  for (std::ptrdiff_t l = 1; l <= v.forward_extent(); ++l) {
    long long s = v.S_at(l);
    if (s >= record) {
      T.push_back(l);
      record = s;
    }
  }
  return T;
}

std::optional<PointMeasure> ladder_measure(const LukView& v, std::size_t k) {
  if (k == 0) throw std::invalid_argument("ladder measures are indexed from 1");
  auto T = ladder_times(v);
  if (k >= T.size()) return std::nullopt;
  return mu(v.shifted(T[k - 1]), 0);
}

static void require_reach(const LukView& v, std::ptrdiff_t j) {
  if (j > v.forward_extent()) throw std::out_of_range("ladder inverse beyond the available sticks");
}

std::size_t ladder_inverse(const LukView& v, std::ptrdiff_t j) {
  require_reach(v, j);
  auto T = ladder_times(v);
  auto it = std::lower_bound(T.begin(), T.end(), j);
  return static_cast<std::size_t>(it - T.begin());
}

std::size_t ladder_inverse_tilde(const LukView& v, std::ptrdiff_t j) {
  require_reach(v, j);
  auto T = ladder_times(v);
  auto it = std::upper_bound(T.begin(), T.end(), j);
  return static_cast<std::size_t>(it - T.begin()) - 1;
}

std::optional<long long> backward_max(const LukView& v, std::ptrdiff_t m) {
  if (m > v.backward_extent()) return std::nullopt;
  long long best = v.S_at(0);
  for (std::ptrdiff_t k = 1; k <= m; ++k) best = std::max(best, v.S_at(-k));
  return best;
}

double LadderDecomp::chrono_height() const { return y_sum(Y.size()); }

std::size_t LadderDecomp::inverse(std::size_t j) const {
  if (j > n) throw std::out_of_range("ladder inverse beyond the focal index");
  return static_cast<std::size_t>(std::lower_bound(T.begin(), T.end(), j) - T.begin());
}

std::size_t LadderDecomp::inverse_tilde(std::size_t j) const {
  if (j > n) throw std::out_of_range("ladder inverse beyond the focal index");
  return static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), j) - T.begin()) - 1;
}

SpineSeq LadderDecomp::spine_prefix(std::size_t k) const {
  if (k > Q.size()) throw std::out_of_range("not that many ladder epochs");
  SpineSeq out;
  for (std::size_t i = k; i >= 1; --i) out.push_back(Q[i - 1]);
  return out;
}

double LadderDecomp::y_sum(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += Y.at(i);
  return s;
}

LadderDecomp ladder_decomp(const Walk& w, std::span<const Stick> sticks, std::size_t n) {
  if (n > sticks.size()) throw std::out_of_range("focal index beyond the stick sequence");
  LadderDecomp d;
  d.n = n;
  LukView v = LukView::dual(w, sticks, static_cast<std::ptrdiff_t>(n));
  for (auto t : ladder_times(v)) d.T.push_back(static_cast<std::size_t>(t));
  for (std::size_t k = 1; k < d.T.size(); ++k) {
    LukView from = v.shifted(static_cast<std::ptrdiff_t>(d.T[k - 1]));
    auto step = static_cast<std::ptrdiff_t>(d.T[k] - d.T[k - 1]);
    long long z = -from.S_at(step - 1);
    d.zeta.push_back(z);
    d.Q.push_back(from.stick(step - 1).births().truncate_largest(static_cast<std::size_t>(z)));
    d.Y.push_back(d.Q.back().sup_support());
  }
  return d;
}

std::vector<std::size_t> ancestors(const Walk& w, std::span<const Stick> sticks, std::size_t n) {
  LukView v = LukView::dual(w, sticks, static_cast<std::ptrdiff_t>(n));
  std::vector<std::size_t> out;
  for (auto t : ladder_times(v)) out.push_back(n - static_cast<std::size_t>(t));
  return out;
}

std::optional<std::size_t> mrca(const Walk& w, std::span<const Stick> sticks, std::size_t m,
                                std::size_t n) {
  auto a = ancestors(w, sticks, m), b = ancestors(w, sticks, n);
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common),
                        std::greater<std::size_t>());
  if (common.empty()) return std::nullopt;
  return common.front();
}

double D_functional(const Walk& w, std::span<const Stick> sticks, std::size_t n, long long l) {
  if (l < 0) throw std::invalid_argument("D needs a non-negative level");
  if (l == 0) return 0.0;
  LukView v = LukView::dual(w, sticks, static_cast<std::ptrdiff_t>(n));
  LadderDecomp d = ladder_decomp(w, sticks, n);
  auto tau = tau_up(v, l);
  std::size_t reach = tau ? static_cast<std::size_t>(*tau) : n;
  double sum = 0.0;
  for (std::size_t i = 1; i < d.T.size() && d.T[i] <= reach; ++i) sum += d.Y[i - 1];
  if (tau) sum -= mu(v, l)->sup_support();
  return sum;
}

std::vector<double> D_table(const Walk& w, std::span<const Stick> sticks, std::size_t n,
                            long long lmax) {
  LadderDecomp d = ladder_decomp(w, sticks, n);
  std::vector<double> prefix(d.Y.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.Y.size(); ++i) prefix[i + 1] = prefix[i] + d.Y[i];
  auto dual_S = [&](std::size_t k) { return w.S[n] - w.S[n - k]; };

  std::vector<double> D(static_cast<std::size_t>(std::max(lmax, 0LL)) + 1, prefix.back());
  D[0] = 0.0;
  long long reached = 0;  // every level <= reached already has its passage time
  for (std::size_t k = 1; k <= n && reached < lmax; ++k) {
    long long s = dual_S(k);
    if (s <= reached) continue;
    const auto& births = sticks[n - k].births().atoms();
    std::size_t epochs = static_cast<std::size_t>(std::upper_bound(d.T.begin(), d.T.end(), k) -
                                                  d.T.begin()) - 1;
    for (long long l = reached + 1; l <= std::min(s, lmax); ++l) {
      auto z = static_cast<std::size_t>(l - dual_S(k - 1));
      double top = z < births.size() ? births[z] : 0.0;
      D[static_cast<std::size_t>(l)] = prefix[epochs] - top;
    }
    reached = s;
  }
  return D;
}

std::optional<std::size_t> chi(const Walk& w, std::size_t m, long long k) {
  if (m + 1 >= w.S.size()) return std::nullopt;
  long long target = w.S[m + 1] - k;
  for (std::size_t j = m + 1; j < w.S.size(); ++j)
    if (w.S[j] == target) return j;
  return std::nullopt;
}

}  // namespace cmj
