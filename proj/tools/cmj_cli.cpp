#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cmj/cmj.h"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 all hard checks held, 1 a check failed, 2 bad input or runtime error.
constexpr int kFailed = 1;
constexpr int kError = 2;

struct Owned {
  char* p = nullptr;
  ~Owned() { cmj_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

int fail(cmj_status st, const std::string& context) {
  std::cout << "{\"ok\": false, \"status\": " << static_cast<int>(st) << ", \"error\": \""
            << json_escape(context + ": " + cmj_last_error()) << "\"}\n";
  return kError;
}

int fail(const std::string& msg) {
  std::cout << "{\"ok\": false, \"error\": \"" << json_escape(msg) << "\"}\n";
  return kError;
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Report goes to --out when given, stdout otherwise.
int emit(const std::string& report, const std::string& out, int ok) {
  if (out.empty())
    std::cout << report;
  else if (!write_file(out, report))
    return fail("cannot write " + out);
  return ok ? 0 : kFailed;
}

struct Sticks {
  cmj_sticks* s = nullptr;
  ~Sticks() { cmj_sticks_free(s); }
};

struct Forest {
  cmj_forest* f = nullptr;
  ~Forest() { cmj_forest_free(f); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chronological CMJ forests: build, verify, oracle, couple, scale"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;

  auto* build = app.add_subcommand("build", "build a forest and write node, contour and height CSVs");
  std::string sticks_file, law;
  std::size_t n = 0;
  build->add_option("--sticks", sticks_file, "stick file (JSON array or 'v a1 a2 ...' lines)");
  build->add_option("--law", law, "sample sticks from this law instead");
  build->add_option("--n", n, "number of sticks to sample");
  auto* build_seed = build->add_option("--seed", seed, "seed for --law");
  build->add_option("--out", out, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "run the identity suite");
  std::size_t forests = 1000, max_sticks = 200, pairs = 200;
  std::string verify_file;
  verify->add_option("--forests", forests, "random forests")->capture_default_str();
  verify->add_option("--sticks", max_sticks, "max sticks per forest")->capture_default_str();
  verify->add_option("--pairs", pairs, "(m, n) pairs per forest")->capture_default_str();
  verify->add_option("--file", verify_file, "verify this stick file instead of random forests");
  verify->add_option("--seed", seed)->required();
  verify->add_option("--workers", workers)->capture_default_str();
  verify->add_option("--out", out, "report file");

  auto* oracle = app.add_subcommand("oracle", "ladder-pair sampler against the exact law");
  std::string oracle_law = "binary";
  std::size_t draws = 100000, tmax = 60;
  double tv = 0.01;
  oracle->add_option("--law", oracle_law)->capture_default_str();
  oracle->add_option("--draws", draws, "accepted draws")->capture_default_str();
  oracle->add_option("--tmax", tmax)->capture_default_str();
  oracle->add_option("--tv", tv, "total-variation tolerance")->capture_default_str();
  oracle->add_option("--seed", seed)->required();
  oracle->add_option("--out", out, "report file");

  auto* couple = app.add_subcommand("couple", "coupled walks harness");
  std::size_t replicas = 2500, m = 3;
  double t = 50.0;
  couple->add_option("--replicas", replicas, "replicas per law")->capture_default_str();
  couple->add_option("--t", t)->capture_default_str();
  couple->add_option("--m", m)->capture_default_str();
  couple->add_option("--seed", seed)->required();
  couple->add_option("--workers", workers)->capture_default_str();
  couple->add_option("--out", out, "report file");

  auto* scale = app.add_subcommand("scale", "scaling experiment");
  std::string config;
  scale->add_option("--config", config, "key = value config file")->required();
  scale->add_option("--seed", seed, "overrides the config seed")->required();
  scale->add_option("--workers", workers)->capture_default_str();
  scale->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kError;
  }

  if (*build) {
    if (sticks_file.empty() == law.empty()) return fail("build needs exactly one of --sticks or --law");
    Sticks s;
    if (!sticks_file.empty()) {
      auto text = slurp(sticks_file);
      if (!text) return fail("cannot read " + sticks_file);
      if (auto st = cmj_sticks_parse(text->c_str(), &s.s)) return fail(st, sticks_file);
    } else {
      if (!*build_seed) return fail("--seed is required with --law");
      if (auto st = cmj_sticks_sample(law.c_str(), n, seed, &s.s)) return fail(st, "law");
    }
    Forest f;
    if (auto st = cmj_forest_build(s.s, &f.f)) return fail(st, "build");
    Owned nodes, contour, heights;
    if (auto st = cmj_forest_csv(f.f, &nodes.p, &contour.p, &heights.p)) return fail(st, "csv");
    std::error_code ec;
    fs::create_directories(out, ec);
    std::string a = nodes.str(), b = contour.str(), c = heights.str();
    if (cmj_sticks_size(s.s) == 0) {
      // nothing was built: headers only
      for (auto* x : {&a, &b, &c}) x->erase(x->find('\n') + 1);
    }
    if (!write_file(fs::path(out) / "forest.csv", a) || !write_file(fs::path(out) / "contour.csv", b) ||
        !write_file(fs::path(out) / "heights.csv", c))
      return fail("cannot write into " + out);
    std::cout << "{\"ok\": true, \"sticks\": " << cmj_sticks_size(s.s) << ", \"trees\": " << cmj_forest_trees(f.f)
              << ", \"complete\": " << (cmj_forest_complete(f.f) ? "true" : "false") << "}\n";
    return 0;
  }

  if (*verify) {
    Owned report;
    int ok = 0;
    if (!verify_file.empty()) {
      auto text = slurp(verify_file);
      if (!text) return fail("cannot read " + verify_file);
      Sticks s;
      if (auto st = cmj_sticks_parse(text->c_str(), &s.s)) return fail(st, verify_file);
      if (auto st = cmj_verify(s.s, pairs, seed, &report.p, &ok)) return fail(st, "verify");
    } else if (auto st = cmj_verify_random(forests, max_sticks, pairs, seed, workers, &report.p, &ok)) {
      return fail(st, "verify");
    }
    return emit(report.str(), out, ok);
  }

  if (*oracle) {
    Owned report;
    int ok = 0;
    if (auto st = cmj_oracle(oracle_law.c_str(), draws, tmax, tv, seed, &report.p, &ok)) return fail(st, "oracle");
    return emit(report.str(), out, ok);
  }

  if (*couple) {
    Owned report;
    int ok = 0;
    if (auto st = cmj_couple(replicas, t, m, seed, workers, &report.p, &ok)) return fail(st, "couple");
    return emit(report.str(), out, ok);
  }

  if (*scale) {
    auto text = slurp(config);
    if (!text) return fail("cannot read " + config);
    if (seed > static_cast<std::uint64_t>(INT64_MAX)) return fail("--seed must fit in 63 bits");
    Owned rows, extras, summary;
    int ok = 0;
    if (auto st = cmj_scale(text->c_str(), static_cast<std::int64_t>(seed), workers, &rows.p, &extras.p,
                            &summary.p, &ok))
      return fail(st, config);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!write_file(fs::path(out) / "scaling.csv", rows.str()) ||
        !write_file(fs::path(out) / "scaling_extras.csv", extras.str()) ||
        !write_file(fs::path(out) / "summary.json", summary.str()))
      return fail("cannot write into " + out);
    std::cout << summary.str();
    return ok ? 0 : kFailed;
  }
  return 0;
}
