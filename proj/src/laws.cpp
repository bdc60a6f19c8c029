#include "cmj/laws.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmj {

namespace {

std::size_t sample_cdf(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                           static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

// P(X = k) proportional to k^-a, k >= 1, a > 1 (Devroye's rejection).
std::size_t sample_zipf(double a, Rng& rng) {
  const double b = std::pow(2.0, a - 1.0);
  for (;;) {
    double u = rng.uniform_pos(), v = rng.uniform();
    double x = std::floor(std::pow(u, -1.0 / (a - 1.0)));
    if (!(x < 4e18)) continue;
    double t = std::pow(1.0 + 1.0 / x, a - 1.0);
    if (v * x * (t - 1.0) / (b - 1.0) <= t / b) return static_cast<std::size_t>(x);
  }
}

std::size_t sample_geometric(double q, Rng& rng) {
  if (q <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(std::log(rng.uniform_pos()) / std::log(q)));
}

std::vector<double> split_numbers(const std::string& s, char sep = '/') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double x = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) throw std::invalid_argument("expected numbers in '" + s + "'");
  return out;
}

}  // namespace

OffspringLaw OffspringLaw::dirac(std::size_t k) {
  OffspringLaw o;
  o.kind_ = Kind::Dirac;
  o.k_ = k;
  o.mean_ = static_cast<double>(k);
  return o;
}

OffspringLaw OffspringLaw::geometric(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("geometric ratio must be in [0,1)");
  OffspringLaw o;
  o.kind_ = Kind::Geometric;
  o.q_ = q;
  o.mean_ = q / (1.0 - q);
  return o;
}

OffspringLaw OffspringLaw::table(std::vector<double> pmf) {
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability in offspring table");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("offspring table must sum to 1");
  OffspringLaw o;
  o.kind_ = Kind::Table;
  double acc = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    sb += static_cast<double>(k) * pmf[k];
    o.cdf_.push_back(acc);
    o.sb_cdf_.push_back(sb);
  }
  o.mean_ = sb;
  return o;
}

OffspringLaw OffspringLaw::stable(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw std::invalid_argument("stable index must be in (1,2]");
  OffspringLaw o;
  o.kind_ = Kind::Stable;
  o.q_ = alpha;
  o.c_ = 1.0 / boost::math::zeta(alpha);
  o.p0_ = 1.0 - o.c_ * boost::math::zeta(alpha + 1.0);
  o.mean_ = 1.0;
  return o;
}

std::size_t OffspringLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Dirac: return k_;
    case Kind::Geometric: return sample_geometric(q_, rng);
    case Kind::Table: return sample_cdf(cdf_, rng);
    case Kind::Stable: return rng.uniform() < p0_ ? 0 : sample_zipf(q_ + 1.0, rng);
  }
  return 0;
}

std::size_t OffspringLaw::sample_size_biased(Rng& rng) const {
  if (mean_ <= 0.0) throw std::domain_error("size-biasing a law without children");
  switch (kind_) {
    case Kind::Dirac: return k_;
    case Kind::Geometric: return 1 + sample_geometric(q_, rng) + sample_geometric(q_, rng);
    case Kind::Table: return sample_cdf(sb_cdf_, rng);
    case Kind::Stable: return sample_zipf(q_, rng);
  }
  return 0;
}

double OffspringLaw::pmf(std::size_t k) const {
  switch (kind_) {
    case Kind::Dirac: return k == k_ ? 1.0 : 0.0;
    case Kind::Geometric: return (1.0 - q_) * std::pow(q_, static_cast<double>(k));
    case Kind::Table:
      if (k >= cdf_.size()) return 0.0;
      return cdf_[k] - (k ? cdf_[k - 1] : 0.0);
    case Kind::Stable:
      return k == 0 ? p0_ : c_ * std::pow(static_cast<double>(k), -(q_ + 1.0));
  }
  return 0.0;
}

std::optional<std::size_t> OffspringLaw::max_support() const {
  switch (kind_) {
    case Kind::Dirac: return k_;
    case Kind::Geometric:
      if (q_ == 0.0) return 0;
      return std::nullopt;
    case Kind::Table: {
      std::size_t k = cdf_.size();
      while (k > 0 && pmf(k - 1) == 0.0) --k;
      return k ? k - 1 : 0;
    }
    case Kind::Stable: return std::nullopt;
  }
  return std::nullopt;
}

std::string OffspringLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Dirac: os << "dirac(" << k_ << ")"; break;
    case Kind::Geometric: os << "geometric(" << q_ << ")"; break;
    case Kind::Table: os << "table(" << cdf_.size() << " values)"; break;
    case Kind::Stable: os << "stable(" << q_ << ")"; break;
  }
  return os.str();
}

LifeLaw LifeLaw::constant(double c, bool arithmetic) {
  if (!(c > 0.0)) throw std::invalid_argument("life length must be positive");
  LifeLaw l;
  l.kind_ = Kind::Constant;
  l.a_ = l.b_ = l.mean_ = c;
  l.span_ = arithmetic ? c : 0.0;
  return l;
}

LifeLaw LifeLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  LifeLaw l;
  l.kind_ = Kind::Exponential;
  l.a_ = rate;
  l.mean_ = 1.0 / rate;
  return l;
}

LifeLaw LifeLaw::uniform(double a, double b) {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("uniform life needs 0 < a < b");
  LifeLaw l;
  l.kind_ = Kind::Uniform;
  l.a_ = a;
  l.b_ = b;
  l.mean_ = 0.5 * (a + b);
  return l;
}

LifeLaw LifeLaw::integers(std::vector<long> values) {
  if (values.empty()) throw std::invalid_argument("integer life needs values");
  LifeLaw l;
  l.kind_ = Kind::Integers;
  long g = 0;
  double sum = 0.0;
  for (long v : values) {
    if (v <= 0) throw std::invalid_argument("integer life values must be positive");
    g = std::gcd(g, v);
    sum += static_cast<double>(v);
  }
  std::sort(values.begin(), values.end());
  l.values_ = std::move(values);
  l.mean_ = sum / static_cast<double>(l.values_.size());
  l.span_ = static_cast<double>(g);
  return l;
}

double LifeLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Exponential: return rng.exponential(a_);
    case Kind::Uniform: return a_ + (b_ - a_) * rng.uniform_pos();
    case Kind::Integers: return static_cast<double>(values_[rng.below(values_.size())]);
  }
  return 0.0;
}

double LifeLaw::sample_size_biased(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Exponential: return rng.exponential(a_) + rng.exponential(a_);
    case Kind::Uniform: return std::sqrt(a_ * a_ + rng.uniform() * (b_ * b_ - a_ * a_));
    case Kind::Integers: {
      double total = mean_ * static_cast<double>(values_.size());
      double u = rng.uniform() * total, acc = 0.0;
      for (long v : values_) {
        acc += static_cast<double>(v);
        if (u < acc) return static_cast<double>(v);
      }
      return static_cast<double>(values_.back());
    }
  }
  return 0.0;
}

double LifeLaw::min_value() const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Exponential: return 0.0;
    case Kind::Uniform: return a_;
    case Kind::Integers: return static_cast<double>(values_.front());
  }
  return 0.0;
}

double LifeLaw::max_value() const {
  switch (kind_) {
    case Kind::Constant: return a_;
    case Kind::Exponential: return std::numeric_limits<double>::infinity();
    case Kind::Uniform: return b_;
    case Kind::Integers: return static_cast<double>(values_.back());
  }
  return 0.0;
}

double LifeLaw::cdf(double x) const {
  switch (kind_) {
    case Kind::Constant: return x >= a_ ? 1.0 : 0.0;
    case Kind::Exponential: return x <= 0.0 ? 0.0 : 1.0 - std::exp(-a_ * x);
    case Kind::Uniform: return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    case Kind::Integers: {
      auto n = std::upper_bound(values_.begin(), values_.end(), x,
                                [](double y, long v) { return y < static_cast<double>(v); }) -
               values_.begin();
      return static_cast<double>(n) / static_cast<double>(values_.size());
    }
  }
  return 0.0;
}

std::vector<std::pair<double, double>> LifeLaw::atoms() const {
  std::vector<std::pair<double, double>> out;
  if (kind_ == Kind::Constant) out.emplace_back(a_, 1.0);
  if (kind_ == Kind::Integers) {
    for (long v : values_) {
      if (!out.empty() && out.back().first == static_cast<double>(v))
        out.back().second += 1.0 / static_cast<double>(values_.size());
      else
        out.emplace_back(static_cast<double>(v), 1.0 / static_cast<double>(values_.size()));
    }
  }
  return out;
}

std::string LifeLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "const(" << a_ << ")"; break;
    case Kind::Exponential: os << "exp(" << a_ << ")"; break;
    case Kind::Uniform: os << "uniform(" << a_ << "," << b_ << ")"; break;
    case Kind::Integers: os << "integers(" << values_.size() << " values)"; break;
  }
  return os.str();
}

StickLaw StickLaw::independent(OffspringLaw offspring, LifeLaw life, BirthRule rule,
                               std::vector<double> fixed_ages, double grid) {
  StickLaw s;
  s.family_ = Family::Independent;
  s.offspring_ = std::move(offspring);
  s.life_ = std::move(life);
  s.rule_ = rule;
  if (rule == BirthRule::Fixed) {
    auto top = s.offspring_.max_support();
    if (!top) throw std::invalid_argument("fixed birth ages need a bounded offspring law");
    if (fixed_ages.size() < *top) throw std::invalid_argument("not enough fixed birth ages");
    std::sort(fixed_ages.begin(), fixed_ages.end(), std::greater<double>());
    if (!fixed_ages.empty() && (fixed_ages.back() <= 0.0 || fixed_ages.front() > s.life_.min_value()))
      throw std::invalid_argument("fixed birth ages must lie in (0, min life length]");
    s.fixed_ = std::move(fixed_ages);
  }
  if (rule == BirthRule::Grid) {
    if (!(grid > 0.0) || s.life_.min_value() < grid)
      throw std::invalid_argument("grid births need 0 < grid <= min life length");
    s.grid_ = grid;
  }
  return s;
}

StickLaw StickLaw::family(Family fam, double alpha, std::string f_name) {
  if (fam == Family::Independent) throw std::invalid_argument("not an example family");
  StickLaw s;
  s.family_ = fam;
  s.offspring_ = OffspringLaw::stable(alpha);
  s.life_ = LifeLaw::constant(1.0);
  s.f_name_ = f_name;
  if (fam == Family::Family2 || f_name == "identity") {
    s.f_ = [](double k) { return k; };
  } else if (f_name == "sqrt") {
    s.f_ = [](double k) { return std::sqrt(k); };
  } else if (f_name == "half") {
    s.f_ = [](double k) { return 0.5 * k; };
  } else if (f_name == "one") {
    s.f_ = [](double) { return 1.0; };
  } else if (f_name.rfind("pow/", 0) == 0) {
    double g = std::stod(f_name.substr(4));
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("pow exponent must be in (0,1]");
    s.f_ = [g](double k) { return std::pow(k, g); };
  } else {
    throw std::invalid_argument("unknown f '" + f_name + "'");
  }
  return s;
}

Stick StickLaw::sample(Rng& rng) const { return sample_given_count(offspring_.sample(rng), rng); }

namespace {

PointMeasure family_births(StickLaw::Family fam, std::size_t k,
                           const std::function<double(double)>& f) {
  if (k == 0) return {};
  auto dk = static_cast<double>(k);
  if (fam == StickLaw::Family::Family1) return PointMeasure::repeated(k, 1.0);
  std::vector<double> atoms(k - 1, 1.0);
  double top = f(dk);
  if (!(top > 0.0) || top > 1.0 + dk) throw std::domain_error("f must map k into (0, 1+k]");
  atoms.push_back(top);
  return PointMeasure(std::move(atoms));
}

}  // namespace

Stick StickLaw::sample_given_count(std::size_t k, Rng& rng) const {
  if (family_ != Family::Independent)
    return Stick(1.0 + static_cast<double>(k), family_births(family_, k, f_));
  double v = life_.sample(rng);
  return Stick(v, births_given(k, v, rng));
}

PointMeasure StickLaw::births_given(std::size_t k, double v, Rng& rng) const {
  std::vector<double> atoms;
  atoms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    switch (rule_) {
      case BirthRule::Uniform: atoms.push_back(v * rng.uniform_pos()); break;
      case BirthRule::AtDeath: atoms.push_back(v); break;
      case BirthRule::Fixed: atoms.push_back(fixed_[i]); break;
      case BirthRule::Grid: {
        auto g = static_cast<std::uint64_t>(std::floor(v / grid_ + 1e-12));
        atoms.push_back(grid_ * static_cast<double>(1 + rng.below(g)));
        break;
      }
    }
  }
  return PointMeasure(std::move(atoms));
}

Stick StickLaw::sample_life_biased(Rng& rng) const {
  if (family_ != Family::Independent) {
    // weight 1 + xi: an even mixture of the plain and the size-biased count
    double m = offspring_.mean();
    std::size_t k = rng.uniform() * (1.0 + m) < 1.0 ? offspring_.sample(rng)
                                                     : offspring_.sample_size_biased(rng);
    return sample_given_count(k, rng);
  }
  double v = life_.sample_size_biased(rng);
  std::size_t k = offspring_.sample(rng);
  return Stick(v, births_given(k, v, rng));
}

double StickLaw::atom_given_count(std::size_t k, std::size_t r, Rng& rng) const {
  if (r >= k) throw std::out_of_range("atom rank beyond the number of children");
  if (family_ != Family::Independent) {
    if (family_ == Family::Family1) return 1.0;
    return r == 0 ? f_(static_cast<double>(k)) : 1.0;
  }
  if (k <= 1'000'000) return sample_given_count(k, rng).births().atoms()[r];
  throw std::length_error("stick too large to build");
}

std::optional<LifeLaw> StickLaw::life() const {
  if (family_ != Family::Independent) return std::nullopt;
  return life_;
}

double StickLaw::mean_v() const {
  return family_ == Family::Independent ? life_.mean() : 1.0 + offspring_.mean();
}

double StickLaw::span() const { return family_ == Family::Independent ? life_.span() : 1.0; }

std::vector<std::uint64_t> OffspringLaw::raw_thresholds() const {
  std::vector<std::uint64_t> t;
  if (kind_ == Kind::Dirac) {
    t.assign(k_ + 1, 0);
    t[k_] = std::numeric_limits<std::uint64_t>::max();
  } else if (kind_ == Kind::Table) {
    for (double c : cdf_) {
      double x = std::ldexp(c / cdf_.back(), 64);
      t.push_back(x >= 0x1p64 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(x));
    }
    t.back() = std::numeric_limits<std::uint64_t>::max();
  }
  return t;
}

std::optional<double> OffspringLaw::stable_index() const {
  if (kind_ == Kind::Stable) return q_;
  return std::nullopt;
}

bool StickLaw::unit_sticks() const {
  return family_ == Family::Independent && rule_ == BirthRule::AtDeath && life_.min_value() == 1.0 &&
         life_.max_value() == 1.0;
}

bool StickLaw::unit_births() const { return family_ == Family::Family1 || unit_sticks(); }

std::optional<double> StickLaw::mean_ystar() const {
  const double m = offspring_.mean();
  switch (family_) {
    case Family::Family1: return m;
    case Family::Family2: return 2.0 * m - (1.0 - offspring_.pmf(0));
    case Family::Generalized: return std::nullopt;
    case Family::Independent: break;
  }
  switch (rule_) {
    case BirthRule::Uniform: return m * life_.mean() / 2.0;
    case BirthRule::AtDeath: return m * life_.mean();
    case BirthRule::Fixed: {
      double e = 0.0, prefix = 0.0;
      for (std::size_t k = 1; k <= *offspring_.max_support(); ++k) {
        prefix += fixed_[k - 1];
        e += offspring_.pmf(k) * prefix;
      }
      return e;
    }
    case BirthRule::Grid: {
      auto at = life_.atoms();
      if (at.empty()) return std::nullopt;
      double e = 0.0;
      for (auto [v, p] : at) e += p * (std::floor(v / grid_ + 1e-12) + 1.0) * grid_ / 2.0;
      return m * e;
    }
  }
  return std::nullopt;
}

namespace {

using Options = std::map<std::string, std::string>;

std::string take(Options& o, const std::string& key, const std::string& fallback) {
  auto it = o.find(key);
  if (it == o.end()) return fallback;
  std::string v = it->second;
  o.erase(it);
  return v;
}

double take_num(Options& o, const std::string& key, double fallback) {
  auto s = take(o, key, "");
  return s.empty() ? fallback : split_numbers(s).at(0);
}

OffspringLaw parse_offspring(const std::string& s) {
  auto colon = s.find(':');
  std::string kind = s.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "geom") return OffspringLaw::geometric(split_numbers(arg).at(0));
  if (kind == "table") return OffspringLaw::table(split_numbers(arg));
  if (kind == "dirac") return OffspringLaw::dirac(static_cast<std::size_t>(split_numbers(arg).at(0)));
  if (kind == "stable") return OffspringLaw::stable(split_numbers(arg).at(0));
  throw std::invalid_argument("unknown offspring law '" + s + "'");
}

LifeLaw parse_life(const std::string& s) {
  auto colon = s.find(':');
  std::string kind = s.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "const") {
    bool cont = arg.size() > 5 && arg.substr(arg.size() - 5) == "/cont";
    return LifeLaw::constant(split_numbers(cont ? arg.substr(0, arg.size() - 5) : arg).at(0), !cont);
  }
  if (kind == "exp") return LifeLaw::exponential(split_numbers(arg).at(0));
  if (kind == "uniform") {
    auto v = split_numbers(arg);
    if (v.size() != 2) throw std::invalid_argument("uniform life needs a/b");
    return LifeLaw::uniform(v[0], v[1]);
  }
  if (kind == "ints") {
    std::vector<long> vals;
    for (double x : split_numbers(arg)) vals.push_back(std::lround(x));
    return LifeLaw::integers(vals);
  }
  throw std::invalid_argument("unknown life law '" + s + "'");
}

}  // namespace

StickLaw parse_law(std::string_view spec_view) {
  std::string spec(spec_view);
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  Options opt;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value in law spec, got '" + item + "'");
      opt[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }

  StickLaw law = [&]() -> StickLaw {
    if (name == "gw")
      return StickLaw::independent(OffspringLaw::geometric(take_num(opt, "q", 0.5)),
                                   LifeLaw::constant(1.0), BirthRule::AtDeath);
    if (name == "geometric")
      return StickLaw::independent(OffspringLaw::geometric(take_num(opt, "q", 0.5)),
                                   LifeLaw::constant(take_num(opt, "v", 1.0)), BirthRule::Uniform);
    if (name == "binary") {
      double p = take_num(opt, "p", 0.5);
      auto ages = split_numbers(take(opt, "ages", "0.75/0.25"));
      return StickLaw::independent(OffspringLaw::table({1.0 - p, 0.0, p}),
                                   LifeLaw::constant(take_num(opt, "v", 1.0)), BirthRule::Fixed, ages);
    }
    if (name == "deterministic") {
      double a = take_num(opt, "a", 0.5);
      return StickLaw::independent(OffspringLaw::dirac(1), LifeLaw::constant(take_num(opt, "v", 1.0)),
                                   BirthRule::Fixed, {a});
    }
    if (name == "family1") return StickLaw::family(StickLaw::Family::Family1, take_num(opt, "alpha", 1.5));
    if (name == "family2") return StickLaw::family(StickLaw::Family::Family2, take_num(opt, "alpha", 1.5));
    if (name == "generalized")
      return StickLaw::family(StickLaw::Family::Generalized, take_num(opt, "alpha", 1.5),
                              take(opt, "f", "sqrt"));
    if (name == "custom") {
      OffspringLaw off = parse_offspring(take(opt, "offspring", "geom:0.5"));
      LifeLaw life = parse_life(take(opt, "life", "const:1"));
      std::string births = take(opt, "births", "uniform");
      if (births == "uniform") return StickLaw::independent(off, life, BirthRule::Uniform);
      if (births == "death") return StickLaw::independent(off, life, BirthRule::AtDeath);
      if (births.rfind("grid:", 0) == 0)
        return StickLaw::independent(off, life, BirthRule::Grid, {}, split_numbers(births.substr(5)).at(0));
      if (births.rfind("fixed:", 0) == 0)
        return StickLaw::independent(off, life, BirthRule::Fixed, split_numbers(births.substr(6)));
      throw std::invalid_argument("unknown birth rule '" + births + "'");
    }
    throw std::invalid_argument("unknown law '" + name + "'");
  }();
  if (!opt.empty()) throw std::invalid_argument("unknown law option '" + opt.begin()->first + "'");
  law.spec = spec;
  return law;
}

}  // namespace cmj
