#include "cmj/forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cmj {

void ForestBuilder::push(const Stick& s) {
  ForestNode node;
  node.v = s.v();
  if (stack_.empty()) {
    node.tree_id = trees_++;
  } else {
    Frame& top = stack_.back();
    const ForestNode& parent = nodes_[top.node];
    node.parent = top.node;
    node.birth_age = top.atoms[top.cursor++];
    node.birth_time = parent.birth_time + node.birth_age;
    node.depth = parent.depth + 1;
    node.tree_id = parent.tree_id;
  }
  nodes_.push_back(node);
  if (s.children() > 0) stack_.push_back(Frame{nodes_.size() - 1, s.births().atoms(), 0});
  while (!stack_.empty() && stack_.back().cursor == stack_.back().atoms.size()) stack_.pop_back();
}

double ForestBuilder::next_birth_time() const {
  if (stack_.empty()) return 0.0;
  const Frame& top = stack_.back();
  return nodes_[top.node].birth_time + top.atoms[top.cursor];
}

std::size_t ForestBuilder::next_depth() const {
  return stack_.empty() ? 0 : nodes_[stack_.back().node].depth + 1;
}

ChronForest::ChronForest(std::vector<Stick> sticks, std::vector<ForestNode> nodes,
                         double next_birth_time, std::size_t next_depth, bool pending,
                         std::size_t trees)
    : sticks_(std::move(sticks)),
      nodes_(std::move(nodes)),
      next_birth_time_(next_birth_time),
      next_depth_(next_depth),
      pending_(pending),
      trees_(trees) {}

double ChronForest::height(std::size_t n) const {
  if (n == nodes_.size()) return next_birth_time_;
  return nodes_.at(n).birth_time;
}

std::size_t ChronForest::depth(std::size_t n) const {
  if (n == nodes_.size()) return next_depth_;
  return nodes_.at(n).depth;
}

std::vector<std::size_t> ChronForest::lineage(std::size_t n) const {
  std::vector<std::size_t> out{n};
  for (auto p = nodes_.at(n).parent; p; p = nodes_[*p].parent) out.push_back(*p);
  return out;
}

ChronForest build_forest(std::vector<Stick> sticks) {
  ForestBuilder b;
  for (const auto& s : sticks) b.push(s);
  double next_h = b.next_birth_time();
  std::size_t next_d = b.next_depth();
  bool pending = b.has_pending_stubs();
  std::size_t trees = b.trees();
  return ChronForest(std::move(sticks), b.release(), next_h, next_d, pending, trees);
}

std::vector<Stick> genealogical_map(std::span<const Stick> sticks) {
  std::vector<Stick> out;
  out.reserve(sticks.size());
  for (const auto& s : sticks) out.emplace_back(1.0, PointMeasure::repeated(s.children(), 1.0));
  return out;
}

ContourPath ContourPath::from_heights(std::span<const double> heights,
                                      std::span<const double> lifes) {
  if (heights.size() != lifes.size() + 1)
    throw std::invalid_argument("contour needs one more height than life lengths");
  ContourPath c;
  c.points_.reserve(2 * lifes.size() + 1);
  double t = 0.0;
  c.points_.emplace_back(t, heights[0]);
  for (std::size_t n = 0; n < lifes.size(); ++n) {
    double top = heights[n] + lifes[n];
    t += lifes[n];
    c.points_.emplace_back(t, top);
    t += top - heights[n + 1];
    c.points_.emplace_back(t, heights[n + 1]);
  }
  return c;
}

double ContourPath::eval(double t) const {
  if (!(t >= 0.0) || t > end_time())
    throw std::out_of_range("contour time " + std::to_string(t) + " outside [0, " +
                            std::to_string(end_time()) + "]");
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const auto& p, double x) { return p.first < x; });
  if (it->first == t || it == points_.begin()) return it->second;
  auto prev = std::prev(it);
  double w = (t - prev->first) / (it->first - prev->first);
  return prev->second + w * (it->second - prev->second);
}

double ContourPath::min_between(double a, double b) const {
  if (a > b) throw std::invalid_argument("empty interval");
  double best = std::min(eval(a), eval(b));
  auto it = std::upper_bound(points_.begin(), points_.end(), a,
                             [](double x, const auto& p) { return x < p.first; });
  for (; it != points_.end() && it->first < b; ++it) best = std::min(best, it->second);
  return best;
}

double ContourPath::max_increment(double w, double horizon) const {
  if (!(w > 0.0) || horizon > end_time() || horizon < w)
    throw std::invalid_argument("bad window for contour increments");
  double last = horizon - w;
  auto diff = [&](double s) { return std::abs(eval(s + w) - eval(s)); };
  double best = std::max(diff(0.0), diff(last));
  for (const auto& [t, v] : points_) {
    if (t > horizon) break;
    if (t <= last) best = std::max(best, diff(t));
    if (t - w >= 0.0 && t - w <= last) best = std::max(best, diff(t - w));
  }
  return best;
}

ContourPath contour_path(const ChronForest& forest) {
  std::vector<double> heights(forest.size() + 1), lifes(forest.size());
  for (std::size_t n = 0; n <= forest.size(); ++n) heights[n] = forest.height(n);
  for (std::size_t n = 0; n < forest.size(); ++n) lifes[n] = forest.sticks()[n].v();
  return ContourPath::from_heights(heights, lifes);
}

double min_contour(const ContourPath& path, std::size_t m, std::size_t n) {
  if (m > n || n > path.individuals())
    throw std::out_of_range("min_contour indices out of range");
  const auto& pts = path.breakpoints();
  double best = pts[2 * m].second;
  for (std::size_t i = 2 * m; i <= 2 * n; ++i) best = std::min(best, pts[i].second);
  return best;
}

double min_contour(const ChronForest& forest, std::size_t m, std::size_t n) {
  return min_contour(contour_path(forest), m, n);
}

}  // namespace cmj
