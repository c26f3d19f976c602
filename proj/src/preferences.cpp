#include <envydiv/preferences.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <envydiv/errors.hpp>

namespace envydiv {

std::vector<double> PreferenceMatrix::tile_scores(int, const Cut &) const {
  throw DomainMismatch(description() + " is a new-style oracle; it scores boxes of a configuration point");
}

std::vector<double> PreferenceMatrix::box_scores(int, const ConfigPoint &) const {
  throw DomainMismatch(description() + " is an old-style oracle; it scores tiles of a cut");
}

std::vector<double> scores(const PreferenceMatrix &prefs, int player, const DomainPoint &point) {
  if (player < 1 || player > prefs.players()) {
    throw InvalidConfiguration("player " + std::to_string(player) + " out of range");
  }
  if (const auto *cut = std::get_if<Cut>(&point)) {
    return prefs.tile_scores(player, *cut);
  }
  return prefs.box_scores(player, std::get<ConfigPoint>(point));
}

std::vector<double> normalized(std::vector<double> raw) {
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (sum > 0.0) {
    for (double &v : raw) {
      v /= sum;
    }
  }
  return raw;
}

std::vector<double> TileWeightModel::tile_scores(int player, const Cut &cut) const {
  if (cut.tile_count() != tiles_) {
    throw DomainMismatch(name_ + " expects cuts with " + std::to_string(tiles_) + " tiles");
  }
  return normalized(raw_weights(player, cut));
}

double interpolate(const BreakpointTable &table, double length) {
  if (table.empty()) {
    return 0.0;
  }
  if (length <= table.front().first) {
    return table.front().second;
  }
  for (size_t i = 1; i < table.size(); ++i) {
    const auto [x1, y1] = table[i];
    if (length <= x1) {
      const auto [x0, y0] = table[i - 1];
      const double t = x1 > x0 ? (length - x0) / (x1 - x0) : 1.0;
      return y0 + t * (y1 - y0);
    }
  }
  return table.back().second;
}

namespace {

// 1 on [0, flat], linear down to 0 at `width`.
double flat_top(double length, double flat, double width) {
  return std::clamp((width - length) / (width - flat), 0.0, 1.0);
}

/// Score grows with tile length; tiles no longer than `min_length` are ignored.
class Hungry final : public TileWeightModel {
public:
  Hungry(int players, int tiles, double min_length)
      : TileWeightModel("hungry", players, tiles), min_length_(min_length) {}

protected:
  std::vector<double> raw_weights(int, const Cut &cut) const override {
    std::vector<double> w;
    for (int i = 1; i <= cut.tile_count(); ++i) {
      w.push_back(std::max(0.0, cut.length(i) - min_length_));
    }
    return w;
  }

private:
  double min_length_;
};

/// Wants an end slice. With `pdte`, a degenerate end makes every degenerate
/// tile equally attractive, which extends continuously to short tiles.
class Gorbushka final : public TileWeightModel {
public:
  Gorbushka(int players, int tiles, bool pdte, double width)
      : TileWeightModel(pdte ? "gorbushka(pdte)" : "gorbushka", players, tiles), pdte_(pdte), width_(width) {}

protected:
  std::vector<double> raw_weights(int, const Cut &cut) const override {
    const int n = cut.tile_count();
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    w.front() = 1.0;
    w.back() = 1.0;
    if (pdte_) {
      const double ends = std::max(bump(cut.length(1)), bump(cut.length(n)));
      for (int i = 2; i < n; ++i) {
        w[static_cast<size_t>(i - 1)] = bump(cut.length(i)) * ends;
      }
    }
    return w;
  }

private:
  double bump(double length) const { return flat_top(length, width_ * 1e-4, width_); }

  bool pdte_;
  double width_;
};

/// Prefers small pieces; every tile up to `flat` long gets the top score.
class Burnt final : public TileWeightModel {
public:
  Burnt(int players, int tiles, double full_length, double flat)
      : TileWeightModel("burnt", players, tiles), full_length_(full_length), flat_(flat) {}

protected:
  std::vector<double> raw_weights(int, const Cut &cut) const override {
    std::vector<double> w;
    for (int i = 1; i <= cut.tile_count(); ++i) {
      w.push_back(flat_top(cut.length(i), flat_, full_length_));
    }
    return w;
  }

private:
  double full_length_;
  double flat_;
};

/// Per player, per tile label, a breakpoint table in the tile's length.
class Piecewise final : public TileWeightModel {
public:
  Piecewise(std::string name, int players, int tiles, std::vector<std::vector<BreakpointTable>> tables)
      : TileWeightModel(std::move(name), players, tiles), tables_(std::move(tables)) {}

protected:
  std::vector<double> raw_weights(int player, const Cut &cut) const override {
    const auto &row = tables_[static_cast<size_t>(player - 1)];
    std::vector<double> w;
    for (int i = 1; i <= cut.tile_count(); ++i) {
      w.push_back(std::max(0.0, interpolate(row[static_cast<size_t>(i - 1)], cut.length(i))));
    }
    return w;
  }

private:
  std::vector<std::vector<BreakpointTable>> tables_;
};

/// Wants only the longest tile (lowest label on ties). Covering but not
/// closed: the preferred set jumps wherever two tiles tie for longest.
class Greedy final : public TileWeightModel {
public:
  Greedy(int players, int tiles) : TileWeightModel("greedy", players, tiles) {}

protected:
  std::vector<double> raw_weights(int, const Cut &cut) const override {
    std::vector<double> w(static_cast<size_t>(cut.tile_count()), 0.0);
    int best = 1;
    for (int i = 2; i <= cut.tile_count(); ++i) {
      if (cut.length(i) > cut.length(best)) {
        best = i;
      }
    }
    w[static_cast<size_t>(best - 1)] = 1.0;
    return w;
  }
};

class ContentLift final : public PreferenceMatrix {
public:
  ContentLift(PreferencePtr source, Space space) : source_(std::move(source)), space_(space) {}

  PreferenceKind kind() const override { return PreferenceKind::new_style; }
  int players() const override { return source_->players(); }
  int tile_count() const override { return space_.tile_count(); }
  std::optional<Space> space() const override { return space_; }
  std::string description() const override { return source_->description() + " on " + space_.name(); }

  std::vector<double> box_scores(int player, const ConfigPoint &point) const override {
    if (!(point.space() == space_)) {
      throw DomainMismatch(description() + " queried with a point of " + point.space().name() + " r=" +
                           std::to_string(point.space().r));
    }
    const auto tiles = source_->tile_scores(player, point.cut());
    double degenerate = 0.0;
    for (int t = 1; t <= point.cut().tile_count(); ++t) {
      if (point.cut().is_degenerate(t)) {
        degenerate = std::max(degenerate, tiles[static_cast<size_t>(t - 1)]);
      }
    }
    std::vector<double> boxes;
    for (const auto &content : point.box_contents()) {
      double v = content.empty() ? degenerate : 0.0;
      for (int t : content) {
        v = std::max(v, tiles[static_cast<size_t>(t - 1)]);
      }
      boxes.push_back(v);
    }
    return normalized(std::move(boxes));
  }

private:
  PreferencePtr source_;
  Space space_;
};

double param(const nlohmann::json &params, const char *key, double fallback) {
  if (params.is_null() || !params.contains(key)) {
    return fallback;
  }
  if (!params[key].is_number()) {
    throw InputError(std::string("model parameter '") + key + "' must be a number");
  }
  return params[key].get<double>();
}

std::vector<std::vector<BreakpointTable>> parse_tables(const nlohmann::json &params, int players, int tiles) {
  if (params.is_null() || !params.contains("tables") || !params["tables"].is_array()) {
    throw InputError("piecewise model needs params.tables[player][tile] = [[length, weight], ...]");
  }
  const auto &t = params["tables"];
  if (static_cast<int>(t.size()) != players) {
    throw InputError("piecewise model needs one table row per player");
  }
  std::vector<std::vector<BreakpointTable>> out;
  for (const auto &row : t) {
    if (!row.is_array() || static_cast<int>(row.size()) != tiles) {
      throw InputError("piecewise model needs one breakpoint table per tile");
    }
    std::vector<BreakpointTable> player_tables;
    for (const auto &table : row) {
      BreakpointTable bt;
      double prev = -1.0;
      for (const auto &bp : table) {
        if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number() || !bp[1].is_number()) {
          throw InputError("breakpoints are [length, weight] pairs");
        }
        const double x = bp[0].get<double>();
        const double y = bp[1].get<double>();
        if (x < prev || x < 0.0 || x > 1.0 || y < 0.0) {
          throw InputError("breakpoint lengths must ascend inside [0,1] with non-negative weights");
        }
        prev = x;
        bt.emplace_back(x, y);
      }
      if (bt.empty()) {
        throw InputError("empty breakpoint table");
      }
      player_tables.push_back(std::move(bt));
    }
    out.push_back(std::move(player_tables));
  }
  return out;
}

// Weight 0 at length 0 and random positive weights at jittered lengths,
// so the model never prefers degenerate tiles and stays continuous.
std::vector<std::vector<BreakpointTable>> random_tables(int players, int tiles, int breakpoints,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.2, 0.8);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<std::vector<BreakpointTable>> out(static_cast<size_t>(players));
  for (auto &row : out) {
    for (int i = 0; i < tiles; ++i) {
      // One breakpoint per stratum keeps neighbours apart and slopes moderate.
      std::vector<double> xs;
      for (int b = 0; b < breakpoints; ++b) {
        xs.push_back((b + jitter(rng)) / (breakpoints + 1));
      }
      BreakpointTable bt{{0.0, 0.0}};
      for (double x : xs) {
        bt.emplace_back(x, weight(rng));
      }
      bt.emplace_back(1.0, weight(rng));
      row.push_back(std::move(bt));
    }
  }
  return out;
}

} // namespace

PreferencePtr make_builtin(const std::string &name, int players, const nlohmann::json &params, std::uint64_t seed,
                           std::optional<int> tiles) {
  if (players < 2) {
    throw InputError("built-in models need r >= 2 players");
  }
  const int n = tiles.value_or(players);
  if (n < 2) {
    throw InputError("built-in models need at least two tiles");
  }
  if (!params.is_null() && !params.is_object()) {
    throw InputError("model params must be a JSON object");
  }
  if (name == "hungry") {
    const double min_length = param(params, "min_length", 1e-3);
    if (min_length < 0.0 || min_length >= 1.0 / n) {
      throw InputError("hungry.min_length must lie in [0, 1/tiles)");
    }
    return std::make_shared<Hungry>(players, n, min_length);
  }
  if (name == "gorbushka") {
    bool pdte = true;
    if (!params.is_null() && params.contains("pdte")) {
      if (!params["pdte"].is_boolean()) {
        throw InputError("gorbushka.pdte must be a boolean");
      }
      pdte = params["pdte"].get<bool>();
    }
    const double width = param(params, "width", 0.05);
    if (width <= 0.0 || width >= 1.0) {
      throw InputError("gorbushka.width must lie in (0, 1)");
    }
    return std::make_shared<Gorbushka>(players, n, pdte, width);
  }
  if (name == "burnt") {
    const double full = param(params, "full_length", 0.75);
    const double flat = param(params, "flat", 0.05);
    if (!(flat >= 0.0 && flat < full && full <= 1.0) || full <= 1.0 / n) {
      throw InputError("burnt needs 0 <= flat < full_length <= 1 and full_length > 1/tiles");
    }
    return std::make_shared<Burnt>(players, n, full, flat);
  }
  if (name == "piecewise_random") {
    const double bp = param(params, "breakpoints", 4);
    if (bp < 1 || bp > 64 || bp != std::floor(bp)) {
      throw InputError("piecewise_random.breakpoints must be an integer in [1, 64]");
    }
    return std::make_shared<Piecewise>("piecewise_random", players, n,
                                       random_tables(players, n, static_cast<int>(bp), seed));
  }
  if (name == "piecewise") {
    return std::make_shared<Piecewise>("piecewise", players, n, parse_tables(params, players, n));
  }
  if (name == "greedy") {
    return std::make_shared<Greedy>(players, n);
  }
  throw InputError("unknown preference model '" + name + "'");
}

PreferencePtr content_lift(PreferencePtr source, const Space &space) {
  if (source->kind() != PreferenceKind::old_style) {
    throw InvalidConfiguration("content_lift needs an old-style source");
  }
  if (source->tile_count() != space.tile_count() || source->players() != space.r) {
    throw InvalidConfiguration("source oracle does not match the space's players and tiles");
  }
  return std::make_shared<ContentLift>(std::move(source), space);
}

std::string to_string(Property p) {
  switch (p) {
  case Property::covering:
    return "covering";
  case Property::equivariance:
    return "equivariance";
  case Property::p_dte:
    return "p_dte";
  case Property::p_pe:
    return "p_pe";
  case Property::continuity:
    return "continuity";
  }
  return "?";
}

Property parse_property(const std::string &name) {
  for (auto p : {Property::covering, Property::equivariance, Property::p_dte, Property::p_pe, Property::continuity}) {
    if (to_string(p) == name) {
      return p;
    }
  }
  throw InputError("unknown property '" + name + "'");
}

namespace {

DomainPoint sample(const PreferenceMatrix &prefs, std::mt19937_64 &rng) {
  if (prefs.kind() == PreferenceKind::old_style) {
    return random_cut(prefs.tile_count(), rng, 0.3);
  }
  return random_point(*prefs.space(), rng, 0.3);
}

// Moves `step` of length between two non-degenerate tiles; nullopt if the
// point has fewer than two tiles long enough.
std::optional<DomainPoint> perturb(const DomainPoint &point, double step, std::mt19937_64 &rng) {
  const Cut &cut = std::holds_alternative<Cut>(point) ? std::get<Cut>(point) : std::get<ConfigPoint>(point).cut();
  std::vector<int> movable;
  for (int t = 1; t <= cut.tile_count(); ++t) {
    if (cut.length(t) > 4 * step + kDegenerateTolerance) {
      movable.push_back(t);
    }
  }
  if (movable.size() < 2) {
    return std::nullopt;
  }
  std::uniform_int_distribution<size_t> pick(0, movable.size() - 1);
  const size_t a = pick(rng);
  size_t b = pick(rng);
  while (b == a) {
    b = pick(rng);
  }
  auto z = cut_to_z(cut);
  z.lengths[static_cast<size_t>(movable[a] - 1)] -= step;
  z.lengths[static_cast<size_t>(movable[b] - 1)] += step;
  Cut moved = z_to_cut(z);
  if (std::holds_alternative<Cut>(point)) {
    return moved;
  }
  const auto &p = std::get<ConfigPoint>(point);
  return canonicalize(moved, p.allocation(), p.space());
}

void record(ValidationReport &report, const ValidationOptions &options, DomainPoint point, int player,
            std::string detail) {
  ++report.violation_count;
  if (report.violations.size() < std::max<std::size_t>(options.max_witnesses, 1)) {
    report.violations.push_back({std::move(point), player, std::move(detail)});
  }
}

bool preferred(double s) { return s > kPreferenceThreshold; }

void check_pe_pair(const PreferenceMatrix &prefs, const Cut &x, const Cut &y, ValidationReport &report,
                   const ValidationOptions &options) {
  const auto cx = degenerate_and_essential(x);
  const auto cy = degenerate_and_essential(y);
  for (int j = 1; j <= prefs.players(); ++j) {
    const auto sx = prefs.tile_scores(j, x);
    const auto sy = prefs.tile_scores(j, y);
    for (size_t k = 0; k < cx.essential.size(); ++k) {
      const double a = sx[static_cast<size_t>(cx.essential[k].label - 1)];
      const double b = sy[static_cast<size_t>(cy.essential[k].label - 1)];
      report.max_deviation = std::max(report.max_deviation, std::abs(a - b));
      if (preferred(a) != preferred(b)) {
        record(report, options, x, j,
               "clause 1: essential tile " + std::to_string(cx.essential[k].label) +
                   " preference differs from its partition-equivalent counterpart");
      }
    }
    const bool any_deg_x = std::any_of(cx.degenerate.begin(), cx.degenerate.end(),
                                       [&](int t) { return preferred(sx[static_cast<size_t>(t - 1)]); });
    const bool all_deg_y = std::all_of(cy.degenerate.begin(), cy.degenerate.end(),
                                       [&](int t) { return preferred(sy[static_cast<size_t>(t - 1)]); });
    if (any_deg_x && !all_deg_y) {
      record(report, options, x, j, "clause 2: a degenerate tile is preferred but not every counterpart is");
    }
  }
}

} // namespace

ValidationReport validate(const PreferenceMatrix &prefs, Property property, int sample_count, std::uint64_t seed,
                          const ValidationOptions &options) {
  const bool is_old = prefs.kind() == PreferenceKind::old_style;
  if (property == Property::equivariance && is_old) {
    throw InvalidConfiguration("equivariance applies to new-style oracles only");
  }
  if ((property == Property::p_pe || property == Property::p_dte) && !is_old) {
    throw InvalidConfiguration(to_string(property) + " applies to old-style oracles only");
  }

  ValidationReport report;
  report.property = property;
  report.samples = sample_count;
  std::mt19937_64 rng(seed);

  for (int s = 0; s < sample_count; ++s) {
    const int before = report.violation_count;
    switch (property) {
    case Property::covering: {
      const auto p = sample(prefs, rng);
      for (int j = 1; j <= prefs.players(); ++j) {
        const auto v = scores(prefs, j, p);
        const double sum = std::accumulate(v.begin(), v.end(), 0.0);
        report.max_deviation = std::max(report.max_deviation, std::abs(sum - 1.0));
        if (*std::max_element(v.begin(), v.end()) <= kPreferenceThreshold) {
          record(report, options, p, j, "no box or tile is preferred");
        } else if (std::abs(sum - 1.0) > 1e-9 || *std::min_element(v.begin(), v.end()) < 0.0) {
          record(report, options, p, j, "scores are not a probability vector");
        }
      }
      break;
    }
    case Property::equivariance: {
      const auto p = std::get<ConfigPoint>(sample(prefs, rng));
      const auto sigma = Permutation::random(prefs.players(), rng);
      const auto q = act(sigma, p);
      for (int j = 1; j <= prefs.players(); ++j) {
        const auto a = prefs.box_scores(j, p);
        const auto b = prefs.box_scores(j, q);
        for (int i = 1; i <= prefs.players(); ++i) {
          const double dev = std::abs(b[static_cast<size_t>(sigma(i) - 1)] - a[static_cast<size_t>(i - 1)]);
          report.max_deviation = std::max(report.max_deviation, dev);
          if (dev > options.tolerance) {
            record(report, options, p, j,
                   "box " + std::to_string(i) + " score changes under relabeling " + sigma.to_string());
            break;
          }
        }
      }
      break;
    }
    case Property::p_dte: {
      const auto cut = random_cut(prefs.tile_count(), rng, 0.5);
      const auto deg = degenerate_and_essential(cut).degenerate;
      if (deg.size() < 2) {
        break;
      }
      for (int j = 1; j <= prefs.players(); ++j) {
        const auto v = prefs.tile_scores(j, cut);
        for (int t : deg) {
          const double dev = std::abs(v[static_cast<size_t>(t - 1)] - v[static_cast<size_t>(deg.front() - 1)]);
          report.max_deviation = std::max(report.max_deviation, dev);
          if (dev > options.tolerance) {
            record(report, options, cut, j, "degenerate tiles receive different scores");
            break;
          }
        }
      }
      break;
    }
    case Property::p_pe: {
      const auto x = random_cut(prefs.tile_count(), rng, 0.4);
      const auto ess = degenerate_and_essential(x).essential;
      // Same essential lengths in a random choice of slots.
      std::vector<int> slots(static_cast<size_t>(prefs.tile_count()));
      std::iota(slots.begin(), slots.end(), 0);
      for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(slots[static_cast<size_t>(i)], slots[static_cast<size_t>(pick(rng))]);
      }
      slots.resize(ess.size());
      std::sort(slots.begin(), slots.end());
      ZPoint z{std::vector<double>(static_cast<size_t>(prefs.tile_count()), 0.0)};
      for (size_t k = 0; k < ess.size(); ++k) {
        z.lengths[static_cast<size_t>(slots[k])] = x.length(ess[k].label);
      }
      const Cut y = z_to_cut(z);
      if (!partition_equivalent(x, y)) {
        break; // rounding moved an endpoint; skip this pair
      }
      check_pe_pair(prefs, x, y, report, options);
      check_pe_pair(prefs, y, x, report, options);
      break;
    }
    case Property::continuity: {
      const auto p = sample(prefs, rng);
      const auto q = perturb(p, options.step, rng);
      if (!q) {
        break;
      }
      for (int j = 1; j <= prefs.players(); ++j) {
        const auto a = scores(prefs, j, p);
        const auto b = scores(prefs, j, *q);
        double diff = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
          diff = std::max(diff, std::abs(a[i] - b[i]));
        }
        const double rate = diff / options.step;
        report.max_deviation = std::max(report.max_deviation, rate);
        if (rate > options.modulus) {
          record(report, options, p, j, "score jumps by " + std::to_string(diff) + " under a small move");
        }
      }
      break;
    }
    }
    if (report.violation_count > before) {
      ++report.failed_samples;
    }
  }
  return report;
}

} // namespace envydiv
