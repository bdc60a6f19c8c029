#include "cmj/spine.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace cmj {

void phi_inplace(SpineSeq& y, const PointMeasure& nu) {
  if (!nu.is_zero()) {
    y.push_back(nu);
    return;
  }
  while (!y.empty() && y.back().mass() < 2) y.pop_back();
  if (!y.empty()) y.replace_back(y.back().truncate_largest(1));
}

SpineSeq phi(const SpineSeq& y, const PointMeasure& nu) {
  SpineSeq out = y;
  phi_inplace(out, nu);
  return out;
}

SpineState spine_process(std::span<const Stick> sticks, std::size_t n) {
  if (n > sticks.size()) throw std::out_of_range("spine index beyond the stick sequence");
  SpineState st;
  for (std::size_t i = 0; i < n; ++i) phi_inplace(st.spine, sticks[i].births());
  st.height = st.spine.sup_support();
  return st;
}

SpineSeq shifted_spine(std::span<const Stick> sticks, std::size_t m, std::size_t n) {
  if (m > n) throw std::invalid_argument("shifted spine needs m <= n");
  return spine_process(sticks.subspan(m), n - m).spine;
}

double stub_distance(const SpineSeq& y, std::size_t l) {
  if (l == 0) return 0.0;
  // Every atom but the largest of an element is a stub; stubs of later
  // elements sit higher than those of earlier ones.
  double top = y.sup_support();
  double base = top;
  std::size_t seen = 0;
  for (std::size_t i = y.length(); i-- > 0;) {
    const auto& atoms = y[i].atoms();
    base -= atoms.front();
    if (seen + atoms.size() - 1 >= l) return top - (base + atoms[l - seen]);
    seen += atoms.size() - 1;
  }
  return top;
}

}  // namespace cmj
