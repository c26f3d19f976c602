#include <envydiv/cli.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <envydiv/errors.hpp>
#include <envydiv/json_io.hpp>
#include <envydiv/reductions.hpp>

namespace envydiv {

namespace {

constexpr int kValidationSamples = 200;

void emit(std::ostream &out, const json &j) { out << j.dump(2) << '\n'; }

SearchOptions search_options(const RunConfig &c) {
  SearchOptions o;
  o.tolerance = c.tolerance;
  o.max_depth = c.max_depth;
  o.multistarts = c.multistarts;
  o.seed = c.seed;
  o.threads = c.threads;
  o.raise_bottleneck = c.raise_bottleneck;
  return o;
}

PreferenceFile load_for(const RunConfig &c) {
  if (c.prefs.empty()) {
    throw InputError("--prefs is required");
  }
  auto file = load_preference_file(c.prefs);
  if (!file.seed) {
    file.seed = c.seed;
  }
  if (c.r && *c.r != file.r) {
    throw InputError("--r " + std::to_string(*c.r) + " does not match the preference file's r = " +
                     std::to_string(file.r));
  }
  return file;
}

Space space_for(const RunConfig &c, int r) {
  if (!c.space) {
    throw InputError("--space is required");
  }
  try {
    return Space::parse(*c.space, r);
  } catch (const InvalidConfiguration &e) {
    throw InputError(e.what());
  }
}

json space_json(const Space &s) { return {{"space", s.name()}, {"r", s.r}}; }

// Checks the solver's preconditions on samples. Returns the failed reports.
json precheck(const PreferenceFile &file, const PreferenceMatrix &prefs, const std::string &reduction,
              std::uint64_t seed, bool &ok) {
  json reports = json::array();
  ok = true;
  auto add = [&](const ValidationReport &r) {
    ok = ok && r.ok();
    reports.push_back(to_json(r));
  };
  add(validate(prefs, Property::covering, kValidationSamples, seed));
  add(validate(prefs, Property::equivariance, kValidationSamples, seed + 1));
  if (reduction == "phi") {
    add(validate(*source_preferences(file), Property::p_pe, kValidationSamples, seed + 2));
  }
  return reports;
}

json solve_json(const Space &space, const SolveResult &res, const std::string &reduction) {
  json out = {{"status", to_string(res.status)},
              {"variant", space_json(space)},
              {"reduction", reduction},
              {"hypothesis_met", res.hypothesis_met},
              {"search", {{"residual", res.search.residual}, {"evaluations", res.search.evaluations},
                          {"trace", res.search.trace}}}};
  if (!res.note.empty()) {
    out["note"] = res.note;
  }
  if (res.division) {
    const json d = to_json(*res.division);
    for (const auto &[k, v] : d.items()) {
      out[k] = v;
    }
  } else {
    out["best_point"] = to_json(res.search.point);
    out["residual"] = res.search.residual;
  }
  return out;
}

// Shared by solve, validate and brute: exceptions to exit codes.
template <typename Body> int guarded(std::ostream &out, std::ostream &log, Body body) {
  auto fail = [&](int code, const std::string &kind, const std::string &what) {
    log << "error: " << what << '\n';
    emit(out, {{"status", kind}, {"error", what}});
    return code;
  };
  try {
    return body();
  } catch (const InputError &e) {
    return fail(exit_input, "input_error", e.what());
  } catch (const PreconditionBreach &e) {
    return fail(exit_validation, "validation_failed", e.what());
  } catch (const PartitionEquivalenceViolation &e) {
    return fail(exit_validation, "validation_failed", e.what());
  } catch (const ResourceExhausted &e) {
    return fail(exit_resource, "resource_exhausted", e.what());
  } catch (const NoPerfectMatching &e) {
    return fail(exit_budget, "no_matching", e.what());
  } catch (const InvalidConfiguration &e) {
    return fail(exit_input, "input_error", e.what());
  } catch (const DomainMismatch &e) {
    return fail(exit_input, "input_error", e.what());
  } catch (const json::exception &e) {
    return fail(exit_input, "input_error", e.what());
  }
}

std::optional<std::filesystem::path> cache_path(const ComplexVariant &v) {
  const char *dir = std::getenv("ENVYDIV_CACHE_DIR");
  if (!dir || !*dir) {
    return std::nullopt;
  }
  std::string name = v.name();
  std::erase(name, ')');
  std::replace(name.begin(), name.end(), '(', '_');
  std::replace(name.begin(), name.end(), ',', '_');
  return std::filesystem::path(dir) / (name + ".json");
}

SimplicialComplex cached_build(const ComplexVariant &v, std::ostream &log) {
  const auto path = cache_path(v);
  if (path && std::filesystem::exists(*path)) {
    try {
      std::ifstream in(*path);
      auto complex = complex_from_json(json::parse(in));
      if (complex.variant() == v) {
        log << "loaded " << v.name() << " from " << path->string() << '\n';
        return complex;
      }
    } catch (const std::exception &e) {
      log << "ignoring unreadable cache entry " << path->string() << ": " << e.what() << '\n';
    }
  }
  auto complex = SimplicialComplex::build(v);
  if (path) {
    std::error_code ec;
    std::filesystem::create_directories(path->parent_path(), ec);
    std::ofstream of(*path);
    if (of) {
      of << to_json(complex).dump() << '\n';
    }
  }
  return complex;
}

} // namespace

int run_solve(const RunConfig &c, std::ostream &out, std::ostream &log) {
  return guarded(out, log, [&] {
    const auto file = load_for(c);
    const auto space = space_for(c, file.r);
    const auto how = reduction_for(file, space);
    const auto prefs = space_preferences(file, space);
    bool ok = true;
    const auto reports = precheck(file, *prefs, how, c.seed, ok);
    if (!ok) {
      log << prefs->description() << " failed validation\n";
      emit(out, {{"status", "validation_failed"}, {"reports", reports}});
      return static_cast<int>(exit_validation);
    }
    log << "solving " << prefs->description() << " (" << space.name() << ", r=" << space.r << ")\n";
    const auto res = solve(space, *prefs, search_options(c));
    auto j = solve_json(space, res, how);
    if (!res.hypothesis_met) {
      log << "warning: " << res.note << '\n';
    }
    if (res.status != SolveStatus::ok) {
      log << "no division: " << res.note << '\n';
      emit(out, j);
      return static_cast<int>(exit_budget);
    }
    if (!verify_division(*res.division, *prefs)) {
      j["status"] = "verification_failed";
      emit(out, j);
      return static_cast<int>(exit_budget);
    }
    if (how == "psi" || how == "phi") {
      try {
        j["tiles"] = to_json(to_tile_division(*res.division, *source_preferences(file)));
      } catch (const NoPerfectMatching &e) {
        j["tiles_note"] = e.what();
      }
    }
    log << "envy-free division found, residual " << res.division->residual << '\n';
    emit(out, j);
    return static_cast<int>(exit_ok);
  });
}

int run_validate(const RunConfig &c, std::ostream &out, std::ostream &log) {
  return guarded(out, log, [&] {
    const auto file = load_for(c);
    const auto source = source_preferences(file);
    std::optional<Space> space;
    if (c.space) {
      space = space_for(c, file.r);
    } else if (file.kind == PreferenceKind::new_style || file.reduction) {
      const auto how = file.kind == PreferenceKind::new_style ? std::string("lift") : *file.reduction;
      space = Space::make(how == "psi" ? SpaceKind::c1 : how == "phi" ? SpaceKind::c2 : SpaceKind::c3, file.r);
    }
    PreferencePtr lifted;
    if (space) {
      lifted = space_preferences(file, *space);
    }
    const bool old_style = file.kind == PreferenceKind::old_style;
    std::vector<Property> wanted;
    if (c.properties.empty()) {
      wanted.push_back(Property::covering);
      if (lifted) {
        wanted.push_back(Property::equivariance);
      }
      if (old_style) {
        wanted.push_back(Property::p_dte);
        wanted.push_back(Property::p_pe);
      }
      wanted.push_back(Property::continuity);
    } else {
      for (const auto &p : c.properties) {
        wanted.push_back(parse_property(p));
      }
    }
    json reports = json::array();
    bool ok = true;
    std::uint64_t seed = c.seed;
    for (const auto p : wanted) {
      const PreferenceMatrix *target = nullptr;
      if (p == Property::equivariance) {
        if (!lifted) {
          throw InputError("equivariance needs a space (--space) to lift old-style preferences onto");
        }
        target = lifted.get();
      } else if (p == Property::p_dte || p == Property::p_pe) {
        if (!old_style) {
          throw InputError(to_string(p) + " applies to old-style preferences only");
        }
        target = source.get();
      } else {
        target = old_style ? source.get() : lifted.get();
      }
      const auto report = validate(*target, p, c.samples, seed++);
      log << to_string(p) << ": " << (report.ok() ? "ok" : "violated") << " (" << report.failed_samples << " of "
          << report.samples << " samples fail)\n";
      ok = ok && report.ok();
      reports.push_back(to_json(report));
    }
    emit(out, {{"model", source->description()}, {"reports", reports}, {"ok", ok}});
    return static_cast<int>(ok ? exit_ok : exit_validation);
  });
}

int run_topology(const RunConfig &c, std::ostream &out, std::ostream &log) {
  return guarded(out, log, [&] {
    ComplexVariant v;
    auto need = [](const std::optional<int> &x, const char *flag) {
      if (!x) {
        throw InputError(std::string(flag) + " is required for this complex");
      }
      return *x;
    };
    try {
      if (c.complex == "chessboard") {
        v = ComplexVariant::chessboard(need(c.m, "--m"), need(c.n, "--n"));
      } else if (c.complex == "gorbushka-join") {
        v = ComplexVariant::gorbushka_join(need(c.r, "--r"));
      } else if (c.complex == "join-power") {
        v = ComplexVariant::join_power(need(c.r, "--r"));
      } else {
        throw InputError("--complex must be chessboard, gorbushka-join or join-power");
      }
    } catch (const InvalidConfiguration &e) {
      throw InputError(e.what());
    }
    const auto complex = cached_build(v, log);
    log << v.name() << ": " << complex.maximal_simplices().size() << " maximal simplices\n";
    auto j = to_json(reduced_homology(complex));
    j["variant"] = to_json(v);
    if (c.pseudomanifold) {
      j["pseudomanifold"] = is_pseudomanifold(complex);
    }
    emit(out, j);
    return static_cast<int>(exit_ok);
  });
}

int run_brute(const RunConfig &c, std::ostream &out, std::ostream &log) {
  return guarded(out, log, [&] {
    const auto file = load_for(c);
    const auto space = space_for(c, file.r);
    // Old-style files without a reduction are scanned over tiles directly.
    const bool tiles = file.kind == PreferenceKind::old_style && !file.reduction;
    const auto prefs = tiles ? source_preferences(file) : space_preferences(file, space);
    log << "scanning " << prefs->description() << " at grid " << c.grid << '\n';
    const auto res = brute_force(space, *prefs, c.grid);
    log << (res.feasible ? "division found" : "no division on the grid") << ", max-min score " << res.max_min << '\n';
    auto j = to_json(res);
    j["variant"] = space_json(space);
    j["domain"] = tiles ? "tiles" : "boxes";
    emit(out, j);
    return static_cast<int>(exit_ok);
  });
}

namespace {

struct Step {
  std::string name;
  std::string expected;
  std::string observed;
  bool pass;
};

Step solved_step(const std::string &name, const Space &space, const PreferenceMatrix &prefs, const RunConfig &c,
                 const std::function<std::pair<bool, std::string>(const ConfigPoint &)> &shape) {
  const auto res = solve(space, prefs, search_options(c));
  if (res.status != SolveStatus::ok || !verify_division(*res.division, prefs)) {
    return {name, "verified envy-free division", to_string(res.status) + ", residual " +
                                                     std::to_string(res.search.residual),
            false};
  }
  const auto &p = std::get<ConfigPoint>(res.division->point);
  const auto [ok, what] = shape(p);
  return {name, "verified envy-free division", "residual " + std::to_string(res.division->residual) + ", " + what,
          ok};
}

int count_essential(const Cut &cut) { return static_cast<int>(degenerate_and_essential(cut).essential.size()); }

} // namespace

int run_demo(const RunConfig &c, std::ostream &out, std::ostream &log) {
  return guarded(out, log, [&] {
    const auto &name = c.demo;
    const int r = c.r.value_or(name == "gale" ? 5 : name == "ppe" ? 4 : 3);
    std::vector<Step> steps;
    auto unsupported = [&](const std::string &range) {
      throw InputError("demo " + name + " supports r in " + range);
    };
    if (name == "gorbushka") {
      if (r < 3 || r > 4) {
        unsupported("{3, 4}");
      }
      const auto ends_only = make_builtin("gorbushka", r, {{"pdte", false}});
      const auto brute = brute_force(Space::make(SpaceKind::c1, r), *ends_only, 51);
      steps.push_back({"ends only, brute force at grid 51", "no division (max-min <= 1e-9)",
                       "max-min " + std::to_string(brute.max_min), !brute.feasible});
      const auto space = Space::make(SpaceKind::c1, r);
      const auto lifted = content_lift(make_builtin("gorbushka", r), space);
      steps.push_back(solved_step("degenerate tiles equal, solver on c1", space, *lifted, c, [&](const ConfigPoint &p) {
        const double last = p.cut().points().back();
        return std::make_pair(count_essential(p.cut()) == 1 && last <= 1e-3,
                              "last cut point at " + std::to_string(last));
      }));
    } else if (name == "burnt") {
      if (r < 2 || r > 6) {
        unsupported("[2, 6]");
      }
      const auto space = Space::make(SpaceKind::c3, r);
      steps.push_back(solved_step("burnt players, solver on c3", space, *content_lift(make_builtin("burnt", r), space),
                                  c, [&](const ConfigPoint &p) {
                                    return std::make_pair(true, std::to_string(count_essential(p.cut())) +
                                                                    " non-degenerate tiles");
                                  }));
    } else if (name == "gale") {
      if (r < 2 || r > 6) {
        unsupported("[2, 6]");
      }
      const auto space = Space::make(SpaceKind::c1, r);
      const auto source = make_builtin("hungry", r);
      steps.push_back(solved_step("hungry players, solver on c1 via psi", space, *psi(source, 1e-3), c,
                                  [&](const ConfigPoint &p) {
                                    double shortest = 1.0;
                                    for (int t = 1; t <= r; ++t) {
                                      shortest = std::min(shortest, p.cut().length(t));
                                    }
                                    return std::make_pair(count_essential(p.cut()) == r && shortest >= 1e-3,
                                                          "shortest tile " + std::to_string(shortest));
                                  }));
    } else if (name == "ppe") {
      if (r < 2 || r > 5) {
        unsupported("[2, 5]");
      }
      const auto space = Space::make(SpaceKind::c2, r);
      const auto source = make_builtin("hungry", r);
      const auto pe = validate(*source, Property::p_pe, kValidationSamples, c.seed);
      steps.push_back({"hungry satisfies partition equivalence", "no violations",
                       std::to_string(pe.violation_count) + " violations", pe.ok()});
      steps.push_back(solved_step("hungry players, solver on c2 via phi", space, *phi(source), c,
                                  [&](const ConfigPoint &p) {
                                    const int k = count_essential(p.cut());
                                    return std::make_pair(k == r, std::to_string(k) +
                                                                      " non-degenerate intervals, one per player");
                                  }));
    } else {
      throw InputError("unknown demo '" + name + "' (gorbushka, burnt, gale, ppe)");
    }
    bool pass = true;
    json js = json::array();
    for (const auto &s : steps) {
      log << (s.pass ? "PASS " : "FAIL ") << s.name << ": expected " << s.expected << ", observed " << s.observed
          << '\n';
      pass = pass && s.pass;
      js.push_back({{"step", s.name}, {"expected", s.expected}, {"observed", s.observed}, {"pass", s.pass}});
    }
    emit(out, {{"demo", name}, {"r", r}, {"steps", js}, {"pass", pass}});
    return static_cast<int>(pass ? exit_ok : exit_budget);
  });
}

int run(const RunConfig &c, std::ostream &out, std::ostream &log) {
  if (c.command == "solve") {
    return run_solve(c, out, log);
  }
  if (c.command == "validate") {
    return run_validate(c, out, log);
  }
  if (c.command == "topology") {
    return run_topology(c, out, log);
  }
  if (c.command == "demo") {
    return run_demo(c, out, log);
  }
  if (c.command == "brute") {
    return run_brute(c, out, log);
  }
  log << "unknown command '" << c.command << "'\n";
  return exit_input;
}

} // namespace envydiv
