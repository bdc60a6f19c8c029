#include "cmj/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cmj {

PointMeasure::PointMeasure(std::initializer_list<double> atoms)
    : PointMeasure(std::vector<double>(atoms)) {}

PointMeasure::PointMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  for (double a : atoms_) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("atom must be a finite positive age, got " + std::to_string(a));
  }
  std::stable_sort(atoms_.begin(), atoms_.end(), std::greater<double>());
}

PointMeasure PointMeasure::repeated(std::size_t n, double atom) {
  return PointMeasure(std::vector<double>(n, atom));
}

double PointMeasure::integral() const {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0.0);
}

PointMeasure PointMeasure::truncate_largest(std::size_t k) const {
  PointMeasure out;
  if (k < atoms_.size())
    out.atoms_.assign(atoms_.begin() + static_cast<std::ptrdiff_t>(k), atoms_.end());
  return out;
}

bool approx_equal(const PointMeasure& a, const PointMeasure& b, double tol) {
  if (a.mass() != b.mass()) return false;
  for (std::size_t i = 0; i < a.mass(); ++i)
    if (std::abs(a.atoms()[i] - b.atoms()[i]) > tol) return false;
  return true;
}

Stick::Stick(double v, PointMeasure births) : v_(v), births_(std::move(births)) {
  if (!(v_ > 0.0) || !std::isfinite(v_))
    throw std::invalid_argument("life length must be finite and positive");
  if (births_.sup_support() > v_)
    throw std::invalid_argument("birth age " + std::to_string(births_.sup_support()) +
                                " exceeds life length " + std::to_string(v_));
}

SpineSeq::SpineSeq(std::initializer_list<PointMeasure> elements) {
  for (const auto& e : elements) push_back(e);
}

SpineSeq::SpineSeq(std::vector<PointMeasure> elements) {
  for (auto& e : elements) push_back(std::move(e));
}

double SpineSeq::sup_support() const {
  double s = 0.0;
  for (const auto& e : elements_) s += e.sup_support();
  return s;
}

void SpineSeq::push_back(PointMeasure m) {
  if (!m.is_zero()) elements_.push_back(std::move(m));
}

void SpineSeq::truncate(std::size_t len) {
  if (len < elements_.size()) elements_.resize(len);
}

void SpineSeq::replace_back(PointMeasure m) {
  if (m.is_zero())
    elements_.pop_back();
  else
    elements_.back() = std::move(m);
}

SpineSeq SpineSeq::prefix(std::size_t len) const {
  SpineSeq out;
  len = std::min(len, elements_.size());
  out.elements_.assign(elements_.begin(), elements_.begin() + static_cast<std::ptrdiff_t>(len));
  return out;
}

SpineSeq SpineSeq::suffix(std::size_t from) const {
  SpineSeq out;
  if (from < elements_.size())
    out.elements_.assign(elements_.begin() + static_cast<std::ptrdiff_t>(from), elements_.end());
  return out;
}

SpineSeq concat(const SpineSeq& a, const SpineSeq& b) {
  SpineSeq out = a;
  for (const auto& e : b.elements()) out.push_back(e);
  return out;
}

bool approx_equal(const SpineSeq& a, const SpineSeq& b, double tol) {
  if (a.length() != b.length()) return false;
  for (std::size_t i = 0; i < a.length(); ++i)
    if (!approx_equal(a[i], b[i], tol)) return false;
  return true;
}

std::size_t mass(const PointMeasure& m) { return m.mass(); }
double sup_support(const PointMeasure& m) { return m.sup_support(); }
double sup_support(const SpineSeq& s) { return s.sup_support(); }
PointMeasure truncate_largest(const PointMeasure& m, std::size_t k) { return m.truncate_largest(k); }

}  // namespace cmj
