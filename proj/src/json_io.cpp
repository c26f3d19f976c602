#include <envydiv/json_io.hpp>

#include <fstream>
#include <limits>

#include <envydiv/errors.hpp>
#include <envydiv/reductions.hpp>

namespace envydiv {

namespace {

std::string kind_name(ComplexKind k) {
  switch (k) {
  case ComplexKind::chessboard:
    return "chessboard";
  case ComplexKind::gorbushka_join:
    return "gorbushka_join";
  case ComplexKind::join_power:
    return "join_power";
  case ComplexKind::explicit_facets:
    return "explicit";
  }
  return "?";
}

json cell_json(const Cell &c) { return json::array({c.row, c.col}); }

Cell cell_from(const json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw InputError("cells are [row, col] integer pairs");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

template <typename T> T required(const json &j, const char *key, const char *what) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string(what) + " needs \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw InputError(std::string(what) + ": \"" + key + "\" has the wrong type");
  }
}

json big(const BigInt &v) {
  if (v <= std::numeric_limits<long long>::max()) {
    return v.convert_to<long long>();
  }
  return v.str();
}

} // namespace

json to_json(const ComplexVariant &v) { return {{"name", kind_name(v.kind)}, {"m", v.rows}, {"n", v.cols}}; }

json to_json(const SimplicialComplex &complex) {
  json verts = json::array();
  for (const auto &c : complex.vertices()) {
    verts.push_back(cell_json(c));
  }
  json facets = json::array();
  for (const auto &f : complex.maximal_simplices()) {
    json s = json::array();
    for (const auto &c : f) {
      s.push_back(cell_json(c));
    }
    facets.push_back(std::move(s));
  }
  return {{"variant", to_json(complex.variant())}, {"vertices", verts}, {"maximal_simplices", facets}};
}

SimplicialComplex complex_from_json(const json &j) {
  const auto v = required<json>(j, "variant", "complex");
  const auto name = required<std::string>(v, "name", "variant");
  const int m = required<int>(v, "m", "variant");
  const int n = required<int>(v, "n", "variant");
  std::vector<Simplex> facets;
  for (const auto &f : required<json>(j, "maximal_simplices", "complex")) {
    std::vector<Cell> cells;
    for (const auto &c : f) {
      cells.push_back(cell_from(c));
    }
    facets.push_back(make_simplex(std::move(cells)));
  }
  try {
    if (name == "chessboard") {
      return SimplicialComplex::from_facets(std::move(facets), ComplexVariant::chessboard(m, n));
    }
    if (name == "gorbushka_join") {
      return SimplicialComplex::from_facets(std::move(facets), ComplexVariant::gorbushka_join(m));
    }
    if (name == "join_power") {
      return SimplicialComplex::from_facets(std::move(facets), ComplexVariant::join_power(m));
    }
  } catch (const InvalidConfiguration &e) {
    throw InputError(e.what());
  }
  if (name == "explicit") {
    return SimplicialComplex::from_facets(std::move(facets));
  }
  throw InputError("unknown complex variant '" + name + "'");
}

json to_json(const HomologyReport &report) {
  json torsion = json::array();
  for (const auto &degree : report.torsion) {
    json t = json::array();
    for (const auto &c : degree) {
      t.push_back(big(c));
    }
    torsion.push_back(std::move(t));
  }
  return {{"betti", report.betti}, {"torsion", torsion}, {"euler", report.euler}, {"face_counts", report.face_counts}};
}

json to_json(const Cut &cut) {
  return json(std::vector<double>(cut.points().begin(), cut.points().end()));
}

json to_json(const ConfigPoint &point) {
  json alloc = json::object();
  for (const auto &[tile, box] : point.allocation()) {
    alloc[std::to_string(tile)] = box;
  }
  return {{"variant", {{"space", point.space().name()}, {"r", point.space().r}}},
          {"cut", to_json(point.cut())},
          {"allocation", alloc}};
}

ConfigPoint config_point_from_json(const json &j) {
  const auto v = required<json>(j, "variant", "point");
  const auto space = Space::parse(required<std::string>(v, "space", "variant"), required<int>(v, "r", "variant"));
  const auto pts = required<std::vector<double>>(j, "cut", "point");
  Allocation alloc;
  const auto a = required<json>(j, "allocation", "point");
  if (!a.is_object()) {
    throw InputError("allocation maps tile labels to boxes");
  }
  for (const auto &[tile, box] : a.items()) {
    if (!box.is_number_integer()) {
      throw InputError("allocation boxes are integers");
    }
    try {
      alloc[std::stoi(tile)] = box.get<int>();
    } catch (const std::logic_error &) {
      throw InputError("allocation key '" + tile + "' is not a tile label");
    }
  }
  try {
    return ConfigPoint::make(space, Cut(pts), alloc);
  } catch (const InvalidConfiguration &e) {
    throw InputError(e.what());
  }
}

json to_json(const StochasticMatrix &m) { return m.rows(); }

json to_json(const EnvyFreeDivision &d) {
  json point;
  if (const auto *p = std::get_if<ConfigPoint>(&d.point)) {
    point = to_json(*p);
  } else {
    point = {{"cut", to_json(std::get<Cut>(d.point))}};
  }
  return {{"point", point},
          {"assignment", std::vector<int>(d.assignment.images().begin(), d.assignment.images().end())},
          {"residual", d.residual},
          {"matrix", to_json(d.matrix)},
          {"certificate", d.certificate}};
}

json to_json(const ValidationReport &report) {
  json witnesses = json::array();
  for (const auto &w : report.violations) {
    json point;
    if (const auto *p = std::get_if<ConfigPoint>(&w.point)) {
      point = to_json(*p);
    } else {
      point = {{"cut", to_json(std::get<Cut>(w.point))}};
    }
    witnesses.push_back({{"point", point}, {"player", w.player}, {"detail", w.detail}});
  }
  return {{"property", to_string(report.property)},
          {"samples", report.samples},
          {"violations", report.violation_count},
          {"failed_samples", report.failed_samples},
          {"witnesses", witnesses},
          {"max_deviation", report.max_deviation},
          {"ok", report.ok()}};
}

json to_json(const BruteForceResult &result) {
  json out = {{"feasible", result.feasible},
              {"max_min", result.max_min},
              {"grid", result.grid},
              {"points", result.points},
              {"threshold", kPreferenceThreshold}};
  out["best"] = result.best ? to_json(*result.best) : json(nullptr);
  return out;
}

PreferenceFile parse_preference_file(const json &j) {
  if (!j.is_object()) {
    throw InputError("preference file must be a JSON object");
  }
  PreferenceFile f;
  f.r = required<int>(j, "r", "preference file");
  const auto kind = j.value("kind", std::string("old"));
  if (kind == "old") {
    f.kind = PreferenceKind::old_style;
  } else if (kind == "new") {
    f.kind = PreferenceKind::new_style;
  } else {
    throw InputError("kind must be \"old\" or \"new\"");
  }
  f.model = required<std::string>(j, "model", "preference file");
  if (j.contains("params")) {
    f.params = j["params"];
    if (!f.params.is_object()) {
      throw InputError("params must be an object");
    }
  }
  if (j.contains("seed")) {
    f.seed = required<std::uint64_t>(j, "seed", "preference file");
  }
  if (j.contains("reduction")) {
    f.reduction = required<std::string>(j, "reduction", "preference file");
    if (*f.reduction != "psi" && *f.reduction != "phi" && *f.reduction != "lift") {
      throw InputError("reduction must be psi, phi or lift");
    }
    if (f.kind == PreferenceKind::new_style && *f.reduction != "lift") {
      throw InputError("new-style files are lifted; psi and phi take old-style preferences");
    }
  }
  if (j.contains("epsilon")) {
    f.epsilon = required<double>(j, "epsilon", "preference file");
  }
  if (j.contains("tiles")) {
    f.tiles = required<int>(j, "tiles", "preference file");
  }
  return f;
}

PreferenceFile load_preference_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read preference file " + path);
  }
  try {
    return parse_preference_file(json::parse(in));
  } catch (const json::parse_error &e) {
    throw InputError(path + ": " + e.what());
  }
}

PreferencePtr source_preferences(const PreferenceFile &file) {
  return make_builtin(file.model, file.r, file.params, file.seed.value_or(0), file.tiles);
}

std::string reduction_for(const PreferenceFile &file, const Space &space) {
  if (file.kind == PreferenceKind::new_style) {
    return "lift";
  }
  if (file.reduction) {
    return *file.reduction;
  }
  switch (space.kind) {
  case SpaceKind::c1:
    return "psi";
  case SpaceKind::c2:
    return "phi";
  case SpaceKind::c3:
    return "lift";
  }
  return "lift";
}

PreferencePtr space_preferences(const PreferenceFile &file, const Space &space) {
  if (file.r != space.r) {
    throw InputError("preference file is for r = " + std::to_string(file.r) + ", the run uses r = " +
                     std::to_string(space.r));
  }
  auto source = source_preferences(file);
  const auto how = reduction_for(file, space);
  try {
    if (how == "psi") {
      if (space.kind != SpaceKind::c1) {
        throw InputError("psi produces preferences on c1 only");
      }
      double epsilon = 0.0;
      if (file.epsilon) {
        epsilon = *file.epsilon;
      } else if (file.model == "hungry") {
        epsilon = file.params.value("min_length", 1e-3);
      } else {
        throw InputError("psi needs \"epsilon\" for model " + file.model);
      }
      return psi(source, epsilon, 512, file.seed.value_or(0) + 1);
    }
    if (how == "phi") {
      if (space.kind != SpaceKind::c2) {
        throw InputError("phi produces preferences on c2 only");
      }
      return phi(source);
    }
    return content_lift(source, space);
  } catch (const InvalidConfiguration &e) {
    throw InputError(e.what());
  }
}

} // namespace envydiv
