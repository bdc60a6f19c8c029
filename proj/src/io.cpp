#include "cmj/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmj/laws.hpp"
#include "cmj/parallel.hpp"
#include "cmj/rng.hpp"
#include "json.hpp"

namespace cmj {

using nlohmann::json;

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string sticks_to_json(std::span<const Stick> sticks) {
  json arr = json::array();
  for (const auto& s : sticks) arr.push_back({{"v", s.v()}, {"births", s.births().atoms()}});
  return arr.dump() + "\n";
}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Line on which the i-th element of the top-level array starts.
std::size_t element_line(std::string_view text, std::size_t index) {
  int depth = 0;
  bool in_string = false, expecting = false;
  std::size_t seen = 0, line = 1;
  for (std::size_t k = 0; k < text.size(); ++k) {
    char c = text[k];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') ++k;
      else if (c == '"') in_string = false;
      continue;
    }
    if (depth == 1 && expecting && c != ' ' && c != '\t' && c != '\r' && c != '\n' && c != ']') {
      if (seen++ == index) return line;
      expecting = false;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') {
      if (++depth == 1) expecting = true;
    } else if (c == ']' || c == '}') --depth;
    else if (c == ',' && depth == 1) expecting = true;
  }
  return line;
}

}  // namespace

std::vector<Stick> sticks_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("line " + std::to_string(line_of(text, e.byte ? e.byte - 1 : 0)) +
                                ": malformed JSON");
  }
  if (!j.is_array()) throw std::invalid_argument("line 1: expected an array of sticks");
  std::vector<Stick> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      if (!e.is_object() || !e.contains("v") || !e["v"].is_number())
        throw std::invalid_argument("needs a numeric \"v\"");
      std::vector<double> births;
      if (e.contains("births")) {
        if (!e["births"].is_array()) throw std::invalid_argument("\"births\" must be an array");
        for (const auto& b : e["births"]) {
          if (!b.is_number()) throw std::invalid_argument("birth ages must be numbers");
          births.push_back(b.get<double>());
        }
      }
      for (const auto& [key, val] : e.items())
        if (key != "v" && key != "births") throw std::invalid_argument("unknown field \"" + key + "\"");
      out.emplace_back(e["v"].get<double>(), PointMeasure(births));
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(element_line(text, i)) + ": stick " +
                                  std::to_string(i) + ": " + ex.what());
    }
  }
  return out;
}

std::vector<Stick> sticks_from_text(std::string_view text) {
  std::vector<Stick> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::istringstream ls(raw.substr(0, hash));
    std::vector<double> xs;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      double x = std::strtod(tok.c_str(), &end);
      if (*end != '\0') throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + tok + "'");
      xs.push_back(x);
    }
    if (xs.empty()) continue;
    try {
      out.emplace_back(xs[0], PointMeasure(std::vector<double>(xs.begin() + 1, xs.end())));
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(line) + ": " + ex.what());
    }
  }
  return out;
}

std::vector<Stick> parse_sticks(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '[') return sticks_from_json(text);
  return sticks_from_text(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string forest_csv(const ChronForest& f) {
  std::string out = "index,parent,birth_time,depth,v,tree_id\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& n = f.node(i);
    out += std::to_string(i) + ',' + (n.parent ? std::to_string(*n.parent) : "-1") + ',' +
           format_number(n.birth_time) + ',' + std::to_string(n.depth) + ',' + format_number(n.v) + ',' +
           std::to_string(n.tree_id) + '\n';
  }
  return out;
}

std::string contour_csv(const ContourPath& c) {
  std::string out = "time,value\n";
  for (auto [t, v] : c.breakpoints()) out += format_number(t) + ',' + format_number(v) + '\n';
  return out;
}

std::string heights_csv(const ChronForest& f) {
  std::string out = "n,H,Hcal\n";
  for (std::size_t n = 0; n <= f.size(); ++n)
    out += std::to_string(n) + ',' + format_number(f.height(n)) + ',' + std::to_string(f.depth(n)) + '\n';
  return out;
}

std::vector<std::string> verify_law_mix() {
  return {
      "geometric:q=0.45",
      "gw:q=0.5",
      "custom:offspring=table:0.4/0.3/0.2/0.1,life=ints:1/2/3,births=grid:1",
      "custom:offspring=table:0.5/0/0.5,life=const:2,births=fixed:1.5/0.5",
      "custom:offspring=geom:0.5,life=exp:1,births=uniform",
      "custom:offspring=table:0.55/0.2/0.1/0.1/0.05,life=uniform:0.5/1.5,births=grid:0.5",
      "family2:alpha=1.5",
  };
}

IdentityReport verify_random_forests(const RandomVerifyOptions& opt) {
  std::vector<StickLaw> laws;
  for (const auto& s : verify_law_mix()) laws.push_back(parse_law(s));
  std::vector<IdentityReport> reports(opt.forests);
  parallel_for(opt.forests, opt.workers, [&](std::size_t f) {
    Rng rng = Rng::stream(opt.seed, {0x7e, f});
    const StickLaw& law = laws[f % laws.size()];
    std::size_t n = opt.max_sticks / 2 + static_cast<std::size_t>(rng.below(opt.max_sticks - opt.max_sticks / 2 + 1));
    std::vector<Stick> sticks;
    sticks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sticks.push_back(law.sample(rng));
    auto pairs = sample_pairs(n, opt.pairs, rng());
    reports[f] = verify_identities(sticks, pairs);
  });
  IdentityReport all;
  for (const auto& r : reports) all.merge(r);
  return all;
}

std::string report_json(const IdentityReport& r) {
  json j;
  j["ok"] = r.ok();
  j["pairs"] = r.pairs;
  j["failed"] = r.total_failed();
  json checks = json::object();
  for (const auto& [name, t] : r.tallies) checks[name] = {{"passed", t.passed}, {"failed", t.failed}};
  j["checks"] = checks;
  json fails = json::array();
  for (const auto& f : r.failures) {
    std::vector<Stick> s = f.sticks;
    fails.push_back({{"check", f.check},
                     {"m", f.m},
                     {"n", f.n},
                     {"detail", f.detail},
                     {"sticks", json::parse(sticks_to_json(s))}});
  }
  j["failures"] = fails;
  return j.dump(2) + "\n";
}

}  // namespace cmj
