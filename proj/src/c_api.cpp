#include "cmj/cmj.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>

#include "cmj/coupling.hpp"
#include "cmj/forest.hpp"
#include "cmj/io.hpp"
#include "cmj/laws.hpp"
#include "cmj/renewal.hpp"
#include "cmj/scaling.hpp"
#include "cmj/spine.hpp"
#include "json.hpp"

struct cmj_sticks {
  std::vector<cmj::Stick> sticks;
};

struct cmj_forest {
  cmj::ChronForest forest;
  cmj::ContourPath contour;
};

namespace {

thread_local std::string last_error;

struct null_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parse failures surface as invalid_argument from the parsers; the caller
// tells us which status they map to.
template <class F>
cmj_status guard(F&& f, cmj_status on_invalid = CMJ_ERR_ARGUMENT) {
  try {
    f();
    last_error.clear();
    return CMJ_OK;
  } catch (const null_argument& e) {
    last_error = e.what();
    return CMJ_ERR_ARGUMENT;
  } catch (const std::out_of_range& e) {
    last_error = e.what();
    return CMJ_ERR_RANGE;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return on_invalid;
  } catch (const std::domain_error& e) {
    last_error = e.what();
    return CMJ_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CMJ_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CMJ_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw null_argument(std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* cmj_last_error(void) { return last_error.c_str(); }
const char* cmj_version(void) { return "0.1.0"; }
void cmj_string_free(char* s) { std::free(s); }

cmj_status cmj_sticks_create(cmj_sticks** out) {
  return guard([&] {
    need(out, "out");
    *out = new cmj_sticks{};
  });
}

cmj_status cmj_sticks_parse(const char* text, cmj_sticks** out) {
  return guard(
      [&] {
        need(text, "text");
        need(out, "out");
        *out = new cmj_sticks{cmj::parse_sticks(text)};
      },
      CMJ_ERR_PARSE);
}

cmj_status cmj_sticks_sample(const char* law, size_t n, uint64_t seed, cmj_sticks** out) {
  return guard([&] {
    need(law, "law");
    need(out, "out");
    cmj::StickLaw l = cmj::parse_law(law);
    cmj::Rng rng = cmj::Rng::stream(seed, {0x5e});
    auto s = std::make_unique<cmj_sticks>();
    s->sticks.reserve(n);
    for (size_t i = 0; i < n; ++i) s->sticks.push_back(l.sample(rng));
    *out = s.release();
  });
}

cmj_status cmj_sticks_push(cmj_sticks* s, double v, const double* births, size_t count) {
  return guard([&] {
    need(s, "sticks");
    if (count > 0) need(births, "births");
    std::vector<double> b(births, births + count);
    s->sticks.emplace_back(v, cmj::PointMeasure(std::move(b)));
  });
}

size_t cmj_sticks_size(const cmj_sticks* s) { return s ? s->sticks.size() : 0; }

cmj_status cmj_sticks_to_json(const cmj_sticks* s, char** out) {
  return guard([&] {
    need(s, "sticks");
    need(out, "out");
    *out = dup(cmj::sticks_to_json(s->sticks));
  });
}

void cmj_sticks_free(cmj_sticks* s) { delete s; }

cmj_status cmj_forest_build(const cmj_sticks* s, cmj_forest** out) {
  return guard([&] {
    need(s, "sticks");
    need(out, "out");
    cmj::ChronForest f = cmj::build_forest(s->sticks);
    cmj::ContourPath c = cmj::contour_path(f);
    *out = new cmj_forest{std::move(f), std::move(c)};
  });
}

size_t cmj_forest_size(const cmj_forest* f) { return f ? f->forest.size() : 0; }
int cmj_forest_complete(const cmj_forest* f) { return f && f->forest.complete() ? 1 : 0; }
size_t cmj_forest_trees(const cmj_forest* f) { return f ? f->forest.trees() : 0; }

cmj_status cmj_forest_height(const cmj_forest* f, size_t n, double* chrono, size_t* genealogical) {
  return guard([&] {
    need(f, "forest");
    if (n > f->forest.size()) throw std::out_of_range("index beyond the forest");
    if (chrono) *chrono = f->forest.height(n);
    if (genealogical) *genealogical = f->forest.depth(n);
  });
}

cmj_status cmj_forest_min_contour(const cmj_forest* f, size_t m, size_t n, double* out) {
  return guard([&] {
    need(f, "forest");
    need(out, "out");
    *out = cmj::min_contour(f->contour, m, n);
  });
}

cmj_status cmj_forest_csv(const cmj_forest* f, char** nodes, char** contour, char** heights) {
  return guard([&] {
    need(f, "forest");
    std::string a = nodes ? cmj::forest_csv(f->forest) : "";
    std::string b = contour ? cmj::contour_csv(f->contour) : "";
    std::string c = heights ? cmj::heights_csv(f->forest) : "";
    if (nodes) *nodes = dup(a);
    if (contour) *contour = dup(b);
    if (heights) *heights = dup(c);
  });
}

void cmj_forest_free(cmj_forest* f) { delete f; }

cmj_status cmj_verify(const cmj_sticks* s, size_t pairs, uint64_t seed, char** report, int* ok) {
  return guard([&] {
    need(s, "sticks");
    need(report, "report");
    auto p = cmj::sample_pairs(s->sticks.size(), pairs, seed);
    cmj::IdentityReport r = cmj::verify_identities(s->sticks, p);
    *report = dup(cmj::report_json(r));
    if (ok) *ok = r.ok() ? 1 : 0;
  });
}

cmj_status cmj_verify_random(size_t forests, size_t max_sticks, size_t pairs, uint64_t seed, unsigned workers,
                             char** report, int* ok) {
  return guard([&] {
    need(report, "report");
    if (max_sticks == 0) throw std::invalid_argument("max_sticks must be positive");
    cmj::RandomVerifyOptions o{forests, max_sticks, pairs, seed, workers};
    cmj::IdentityReport r = cmj::verify_random_forests(o);
    *report = dup(cmj::report_json(r));
    if (ok) *ok = r.ok() ? 1 : 0;
  });
}

cmj_status cmj_oracle(const char* law, size_t draws, size_t tmax, double tv_tol, uint64_t seed, char** report,
                      int* ok) {
  return guard([&] {
    need(law, "law");
    need(report, "report");
    cmj::StickLaw l = cmj::parse_law(law);
    cmj::Rng rng = cmj::Rng::stream(seed, {0x0a});
    cmj::LadderOracleReport r = cmj::run_ladder_oracle(l, draws, tmax, tv_tol, rng);
    nlohmann::json j = {{"law", l.spec},
                        {"accepted", r.accepted},
                        {"attempts", r.attempts},
                        {"boundary_aborts", r.boundary_aborts},
                        {"cap_hits", r.cap_hits},
                        {"steps", r.steps},
                        {"tmax", tmax},
                        {"oracle_mass_within_tmax", r.oracle_mass},
                        {"tv", r.tv},
                        {"tv_tolerance", tv_tol},
                        {"tv_ok", r.tv_ok},
                        {"p_finite", r.p_finite},
                        {"p_finite_se", r.p_finite_se},
                        {"mean_offspring", r.mean_offspring},
                        {"p_finite_ok", r.p_finite_ok},
                        {"ok", r.ok()}};
    *report = dup(j.dump(2) + "\n");
    if (ok) *ok = r.ok() ? 1 : 0;
  });
}

cmj_status cmj_couple(size_t replicas, double t, size_t m, uint64_t seed, unsigned workers, char** report,
                      int* ok) {
  return guard([&] {
    need(report, "report");
    cmj::CouplingParams par;
    par.t = t;
    par.m = m;
    cmj::CouplingBatch b = cmj::run_coupling_batch(cmj::default_coupling_cases(), replicas, par, seed, workers);
    nlohmann::json laws = nlohmann::json::array();
    for (const auto& l : b.laws)
      laws.push_back({{"law", l.law},
                      {"eps", l.eps},
                      {"replicas", l.replicas},
                      {"undecided", l.undecided},
                      {"events", l.events},
                      {"violations", l.violations},
                      {"p_w0", l.p_w0},
                      {"p_steps", l.p_steps},
                      {"p_wp0", l.p_wp0},
                      {"p_steps_prime", l.p_steps_prime}});
    nlohmann::json j = {{"t", t},
                        {"m", m},
                        {"laws", laws},
                        {"violations", b.violations()},
                        {"family_level", b.family_level},
                        {"per_test_level", b.family_level / (4.0 * static_cast<double>(b.laws.size()))},
                        {"gof_ok", b.gof_ok()},
                        {"ok", b.ok()}};
    *report = dup(j.dump(2) + "\n");
    if (ok) *ok = b.ok() ? 1 : 0;
  });
}

cmj_status cmj_scale(const char* config, int64_t seed_override, unsigned workers, char** rows_csv,
                     char** extras_csv, char** summary, int* ok) {
  cmj::ScalingConfig cfg;
  cmj_status st = guard(
      [&] {
        need(config, "config");
        cfg = cmj::parse_scaling_config(config);
      },
      CMJ_ERR_PARSE);
  if (st != CMJ_OK) return st;
  return guard([&] {
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    cmj::ScalingResult r = cmj::run_scaling(cfg, workers);
    std::string a = rows_csv ? cmj::rows_csv(r) : "";
    std::string b = extras_csv ? cmj::extras_csv(r) : "";
    std::string c = summary ? cmj::summary_json(r) : "";
    if (rows_csv) *rows_csv = dup(a);
    if (extras_csv) *extras_csv = dup(b);
    if (summary) *summary = dup(c);
    if (ok) *ok = r.ok() ? 1 : 0;
  });
}

}  // extern "C"
