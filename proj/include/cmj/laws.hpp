#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmj/measures.hpp"
#include "cmj/rng.hpp"

namespace cmj {

class OffspringLaw {
 public:
  static OffspringLaw dirac(std::size_t k);
  /// P(k) = (1-q) q^k, k >= 0.
  static OffspringLaw geometric(double q);
  static OffspringLaw table(std::vector<double> pmf);
  /// Critical law with p_k proportional to k^-(alpha+1) for k >= 1.
  static OffspringLaw stable(double alpha);

  std::size_t sample(Rng& rng) const;
  /// Draw from k p_k / mean.
  std::size_t sample_size_biased(Rng& rng) const;
  double mean() const { return mean_; }
  double pmf(std::size_t k) const;
  /// Largest k with positive mass, when finite.
  std::optional<std::size_t> max_support() const;
  /// Bounded laws: t[k] such that a raw 64-bit draw u < t[k] (first such k)
  /// has law p_k. Empty for unbounded laws.
  std::vector<std::uint64_t> raw_thresholds() const;
  /// alpha for the stable law, empty otherwise.
  std::optional<double> stable_index() const;
  std::string describe() const;

 private:
  enum class Kind { Dirac, Geometric, Table, Stable };
  Kind kind_ = Kind::Dirac;
  std::size_t k_ = 0;
  double q_ = 0.0;      // geometric ratio, or the stable index
  double p0_ = 0.0;     // stable: mass at zero
  double c_ = 0.0;      // stable: normalising constant
  std::vector<double> cdf_, sb_cdf_;
  double mean_ = 0.0;
};

class LifeLaw {
 public:
  /// V == c; treated as arithmetic with span c unless `arithmetic` is false.
  static LifeLaw constant(double c, bool arithmetic = true);
  static LifeLaw exponential(double rate);
  static LifeLaw uniform(double a, double b);
  /// Uniform over the given positive integers.
  static LifeLaw integers(std::vector<long> values);

  double sample(Rng& rng) const;
  /// Draw from v P(V in dv) / E V.
  double sample_size_biased(Rng& rng) const;
  double mean() const { return mean_; }
  /// Span of the lattice, 0 for non-arithmetic laws.
  double span() const { return span_; }
  double min_value() const;
  double max_value() const;  // +inf when unbounded
  double cdf(double x) const;
  /// Lattice laws: (value, probability) pairs.
  std::vector<std::pair<double, double>> atoms() const;
  std::string describe() const;

 private:
  enum class Kind { Constant, Exponential, Uniform, Integers };
  Kind kind_ = Kind::Constant;
  double a_ = 1.0, b_ = 1.0;
  std::vector<long> values_;
  double mean_ = 1.0;
  double span_ = 0.0;
};

enum class BirthRule { Uniform, AtDeath, Fixed, Grid };

/// Law of (V*, P*).
class StickLaw {
 public:
  enum class Family { Independent, Family1, Family2, Generalized };

  static StickLaw independent(OffspringLaw offspring, LifeLaw life, BirthRule rule,
                              std::vector<double> fixed_ages = {}, double grid = 0.0);
  /// V = 1 + xi with xi stable-critical; f only used by the generalized family.
  static StickLaw family(Family fam, double alpha, std::string f_name = "identity");

  Stick sample(Rng& rng) const;
  /// Stick given its number of children.
  Stick sample_given_count(std::size_t k, Rng& rng) const;
  /// Stick drawn with weight V.
  Stick sample_life_biased(Rng& rng) const;
  /// Age of the r-th largest atom (0-based) of a stick with k children,
  /// without building the stick.
  double atom_given_count(std::size_t k, std::size_t r, Rng& rng) const;

  const OffspringLaw& offspring() const { return offspring_; }
  std::optional<LifeLaw> life() const;
  Family family_kind() const { return family_; }
  double mean_offspring() const { return offspring_.mean(); }
  double mean_v() const;
  /// E of the integral of u against P*, when known in closed form.
  std::optional<double> mean_ystar() const;
  double span() const;
  bool arithmetic() const { return span() > 0.0; }
  /// Every birth happens at age 1, so chronological and genealogical heights agree.
  bool unit_births() const;
  /// Also V == 1: the law is its own genealogical image.
  bool unit_sticks() const;

  std::string spec;

 private:
  PointMeasure births_given(std::size_t k, double v, Rng& rng) const;

  Family family_ = Family::Independent;
  OffspringLaw offspring_;
  LifeLaw life_;
  BirthRule rule_ = BirthRule::Uniform;
  std::vector<double> fixed_;
  double grid_ = 0.0;
  std::function<double(double)> f_;
  std::string f_name_;
};

/// Parses "name" or "name:key=value,key=value". Names: gw, geometric,
/// binary, deterministic, family1, family2, generalized, custom.
StickLaw parse_law(std::string_view spec);

}  // namespace cmj
