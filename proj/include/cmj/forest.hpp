#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cmj/measures.hpp"

namespace cmj {

struct ForestNode {
  std::optional<std::size_t> parent;
  double birth_age = 0.0;  // age of the parent at this birth; 0 for roots
  double birth_time = 0.0;
  std::size_t depth = 0;
  std::size_t tree_id = 0;
  double v = 0.0;
};

/// Grafts sticks one at a time onto the highest pending stub.
class ForestBuilder {
 public:
  void push(const Stick& s);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<ForestNode>& nodes() const { return nodes_; }
  std::vector<ForestNode> release() { return std::move(nodes_); }

  /// Birth time and depth the next stick would receive.
  double next_birth_time() const;
  std::size_t next_depth() const;
  bool has_pending_stubs() const { return !stack_.empty(); }
  std::size_t trees() const { return trees_; }

 private:
  struct Frame {
    std::size_t node;
    std::vector<double> atoms;
    std::size_t cursor;
  };
  std::vector<Frame> stack_;
  std::vector<ForestNode> nodes_;
  std::size_t trees_ = 0;
};

class ChronForest {
 public:
  ChronForest(std::vector<Stick> sticks, std::vector<ForestNode> nodes, double next_birth_time,
              std::size_t next_depth, bool pending, std::size_t trees);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Stick>& sticks() const { return sticks_; }
  const std::vector<ForestNode>& nodes() const { return nodes_; }
  const ForestNode& node(std::size_t i) const { return nodes_.at(i); }

  /// False when the sticks ran out with stubs still pending.
  bool complete() const { return !pending_; }
  std::size_t trees() const { return trees_; }

  /// Chronological and genealogical height of individual n, for n <= size();
  /// n == size() refers to the individual the next stick would become.
  double height(std::size_t n) const;
  std::size_t depth(std::size_t n) const;

  /// Ancestor indices of n, starting with n itself and ending at its root.
  std::vector<std::size_t> lineage(std::size_t n) const;

 private:
  std::vector<Stick> sticks_;
  std::vector<ForestNode> nodes_;
  double next_birth_time_;
  std::size_t next_depth_;
  bool pending_;
  std::size_t trees_;
};

ChronForest build_forest(std::vector<Stick> sticks);

/// Maps (V, P) to (1, |P| atoms at 1).
std::vector<Stick> genealogical_map(std::span<const Stick> sticks);

/// Piecewise-linear path with slopes +-1. Breakpoint 2n sits at time K_n with
/// value H(n); breakpoint 2n+1 is the death of individual n.
class ContourPath {
 public:
  /// heights has one more entry than lifes.
  static ContourPath from_heights(std::span<const double> heights, std::span<const double> lifes);

  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }
  std::size_t individuals() const { return points_.size() / 2; }
  double K(std::size_t n) const { return points_.at(2 * n).first; }
  double end_time() const { return points_.back().first; }

  /// Throws std::out_of_range outside [0, end_time()].
  double eval(double t) const;
  double min_between(double a, double b) const;
  /// Max of |C(s+w) - C(s)| over 0 <= s <= horizon - w.
  double max_increment(double w, double horizon) const;

 private:
  std::vector<std::pair<double, double>> points_;
};

ContourPath contour_path(const ChronForest& forest);

/// Exact minimum of the contour on [K_m, K_n].
double min_contour(const ContourPath& path, std::size_t m, std::size_t n);
double min_contour(const ChronForest& forest, std::size_t m, std::size_t n);

}  // namespace cmj
