#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmj/forest.hpp"
#include "cmj/measures.hpp"
#include "cmj/spine.hpp"

namespace cmj {

/// [{"v": 2, "births": [1.5, 0.5]}, ...]
std::string sticks_to_json(std::span<const Stick> sticks);
/// Errors carry the line number of the offending input.
std::vector<Stick> sticks_from_json(std::string_view text);
/// One stick per line: "v a1 a2 ...", '#' comments.
std::vector<Stick> sticks_from_text(std::string_view text);
/// JSON when the first non-blank character is '[', text otherwise.
std::vector<Stick> parse_sticks(std::string_view text);
std::string read_file(const std::string& path);

/// index,parent,birth_time,depth,v,tree_id (parent -1 for roots)
std::string forest_csv(const ChronForest& f);
/// time,value breakpoints
std::string contour_csv(const ContourPath& c);
/// n,H,Hcal for n = 0..size
std::string heights_csv(const ChronForest& f);

/// Number formatting shared by every CSV writer.
std::string format_number(double x);

struct RandomVerifyOptions {
  std::size_t forests = 100;
  std::size_t max_sticks = 200;
  std::size_t pairs = 200;  // per forest; all pairs when there are fewer
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// Identity suite over random subcritical forests drawn from a mix of laws,
/// including lattice births that produce ties.
IdentityReport verify_random_forests(const RandomVerifyOptions& opt);
std::vector<std::string> verify_law_mix();

/// Per-check tallies, pair count and kept failures as JSON.
std::string report_json(const IdentityReport& r);

}  // namespace cmj
