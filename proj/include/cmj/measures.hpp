#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cmj {

/// Finite point measure on (0, inf), atoms kept in non-increasing order.
class PointMeasure {
 public:
  PointMeasure() = default;
  PointMeasure(std::initializer_list<double> atoms);
  explicit PointMeasure(std::vector<double> atoms);

  /// n copies of the same atom.
  static PointMeasure repeated(std::size_t n, double atom);

  std::size_t mass() const { return atoms_.size(); }
  double sup_support() const { return atoms_.empty() ? 0.0 : atoms_.front(); }
  bool is_zero() const { return atoms_.empty(); }
  const std::vector<double>& atoms() const { return atoms_; }

  /// Sum of the atoms.
  double integral() const;

  /// Drops the k largest atoms; the zero measure once k >= mass.
  PointMeasure truncate_largest(std::size_t k) const;

  friend bool operator==(const PointMeasure&, const PointMeasure&) = default;

 private:
  std::vector<double> atoms_;
};

bool approx_equal(const PointMeasure& a, const PointMeasure& b, double tol);

class Stick {
 public:
  Stick(double v, PointMeasure births);

  double v() const { return v_; }
  const PointMeasure& births() const { return births_; }
  std::size_t children() const { return births_.mass(); }

  friend bool operator==(const Stick&, const Stick&) = default;

 private:
  double v_;
  PointMeasure births_;
};

/// Finite sequence of non-zero measures. Element 0 is the one closest to the
/// root; zero measures are never stored, so they act as the empty sequence.
class SpineSeq {
 public:
  SpineSeq() = default;
  SpineSeq(std::initializer_list<PointMeasure> elements);
  explicit SpineSeq(std::vector<PointMeasure> elements);

  std::size_t length() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  double sup_support() const;
  const std::vector<PointMeasure>& elements() const { return elements_; }
  const PointMeasure& operator[](std::size_t i) const { return elements_.at(i); }
  PointMeasure& back() { return elements_.back(); }

  void push_back(PointMeasure m);
  void pop_back() { elements_.pop_back(); }
  void truncate(std::size_t len);
  /// Replaces an element in place; a zero replacement removes it.
  void replace_back(PointMeasure m);

  /// Prefix of the given length.
  SpineSeq prefix(std::size_t len) const;
  /// Elements from index `from` to the end.
  SpineSeq suffix(std::size_t from) const;

  friend bool operator==(const SpineSeq&, const SpineSeq&) = default;

 private:
  std::vector<PointMeasure> elements_;
};

SpineSeq concat(const SpineSeq& a, const SpineSeq& b);
bool approx_equal(const SpineSeq& a, const SpineSeq& b, double tol);

std::size_t mass(const PointMeasure& m);
double sup_support(const PointMeasure& m);
double sup_support(const SpineSeq& s);
PointMeasure truncate_largest(const PointMeasure& m, std::size_t k);

}  // namespace cmj
