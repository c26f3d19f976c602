#include <envydiv/configspace.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <envydiv/errors.hpp>

namespace envydiv {

Space Space::make(SpaceKind kind, int r) {
  if (r < 2) {
    throw InvalidConfiguration("configuration spaces need r >= 2");
  }
  return {kind, r};
}

Space Space::parse(const std::string &name, int r) {
  if (name == "c1") {
    return make(SpaceKind::c1, r);
  }
  if (name == "c2") {
    return make(SpaceKind::c2, r);
  }
  if (name == "c3") {
    return make(SpaceKind::c3, r);
  }
  throw InvalidConfiguration("unknown space '" + name + "' (expected c1, c2 or c3)");
}

ComplexVariant Space::complex_variant() const {
  switch (kind) {
  case SpaceKind::c1:
    return ComplexVariant::gorbushka_join(r);
  case SpaceKind::c2:
    return ComplexVariant::chessboard(r, 2 * r - 1);
  case SpaceKind::c3:
    return ComplexVariant::join_power(r);
  }
  throw InvalidConfiguration("unknown space kind");
}

std::string Space::name() const {
  switch (kind) {
  case SpaceKind::c1:
    return "c1";
  case SpaceKind::c2:
    return "c2";
  case SpaceKind::c3:
    return "c3";
  }
  return "?";
}

Cut::Cut(std::vector<double> points) : points_(std::move(points)) {
  double prev = 0.0;
  for (double x : points_) {
    if (!std::isfinite(x) || x < prev || x > 1.0) {
      throw InvalidConfiguration("cut-points must satisfy 0 <= x_1 <= ... <= x_k <= 1");
    }
    prev = x;
  }
}

double Cut::left(int tile) const {
  if (tile < 1 || tile > tile_count()) {
    throw InvalidConfiguration("tile label out of range");
  }
  return tile == 1 ? 0.0 : points_[static_cast<size_t>(tile - 2)];
}

double Cut::right(int tile) const {
  if (tile < 1 || tile > tile_count()) {
    throw InvalidConfiguration("tile label out of range");
  }
  return tile == tile_count() ? 1.0 : points_[static_cast<size_t>(tile - 1)];
}

ZPoint cut_to_z(const Cut &cut) {
  ZPoint z;
  z.lengths.reserve(static_cast<size_t>(cut.tile_count()));
  for (int i = 1; i <= cut.tile_count(); ++i) {
    z.lengths.push_back(cut.length(i));
  }
  return z;
}

Cut z_to_cut(const ZPoint &z) {
  if (z.lengths.empty()) {
    throw InvalidConfiguration("z-point needs at least one component");
  }
  double sum = 0.0;
  for (double v : z.lengths) {
    if (!(v >= 0.0)) {
      throw InvalidConfiguration("tile lengths must be non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidConfiguration("tile lengths must sum to 1");
  }
  std::vector<double> points;
  points.reserve(z.lengths.size() - 1);
  double acc = 0.0;
  for (size_t i = 0; i + 1 < z.lengths.size(); ++i) {
    acc += z.lengths[i];
    points.push_back(std::clamp(acc, points.empty() ? 0.0 : points.back(), 1.0));
  }
  return Cut(std::move(points));
}

TileClassification degenerate_and_essential(const Cut &cut, double tol) {
  TileClassification out;
  for (int i = 1; i <= cut.tile_count(); ++i) {
    if (cut.is_degenerate(i, tol)) {
      out.degenerate.push_back(i);
    } else {
      out.essential.push_back({{cut.left(i), cut.right(i)}, i});
    }
  }
  return out;
}

bool partition_equivalent(const Cut &a, const Cut &b, double tol) {
  const auto ea = degenerate_and_essential(a, tol).essential;
  const auto eb = degenerate_and_essential(b, tol).essential;
  if (ea.size() != eb.size()) {
    return false;
  }
  for (size_t i = 0; i < ea.size(); ++i) {
    if (std::abs(ea[i].interval.left - eb[i].interval.left) > tol ||
        std::abs(ea[i].interval.right - eb[i].interval.right) > tol) {
      return false;
    }
  }
  return true;
}

void check_allocation_rule(const Space &space, const Allocation &nondegenerate) {
  std::vector<std::vector<int>> boxes(static_cast<size_t>(space.r));
  for (const auto &[tile, box] : nondegenerate) {
    if (tile < 1 || tile > space.tile_count() || box < 1 || box > space.r) {
      throw VariantConstraintViolation("allocation entry tile " + std::to_string(tile) + " -> box " +
                                       std::to_string(box) + " is out of range");
    }
    boxes[static_cast<size_t>(box - 1)].push_back(tile);
  }
  for (size_t b = 0; b < boxes.size(); ++b) {
    const auto &content = boxes[b];
    const std::string where = "box " + std::to_string(b + 1);
    switch (space.kind) {
    case SpaceKind::c1:
      if (content.size() > 2 ||
          (content.size() == 2 && std::find(content.begin(), content.end(), space.r) == content.end())) {
        throw VariantConstraintViolation(where + " holds two tiles and neither is the last tile");
      }
      break;
    case SpaceKind::c2:
      if (content.size() > 1) {
        throw VariantConstraintViolation(where + " holds more than one non-degenerate tile");
      }
      break;
    case SpaceKind::c3:
      break;
    }
  }
}

ConfigPoint ConfigPoint::make(const Space &space, Cut cut, Allocation allocation) {
  if (cut.tile_count() != space.tile_count()) {
    throw InvalidConfiguration("cut has " + std::to_string(cut.tile_count()) + " tiles, space " + space.name() +
                               " expects " + std::to_string(space.tile_count()));
  }
  for (int i = 1; i <= cut.tile_count(); ++i) {
    const bool allocated = allocation.contains(i);
    if (cut.is_degenerate(i) && allocated) {
      throw InvalidConfiguration("degenerate tile " + std::to_string(i) + " must not be allocated");
    }
    if (!cut.is_degenerate(i) && !allocated) {
      throw InvalidConfiguration("non-degenerate tile " + std::to_string(i) + " has no box");
    }
  }
  check_allocation_rule(space, allocation);
  ConfigPoint p;
  p.space_ = space;
  p.cut_ = std::move(cut);
  p.allocation_ = std::move(allocation);
  return p;
}

std::vector<std::vector<int>> ConfigPoint::box_contents() const {
  std::vector<std::vector<int>> boxes(static_cast<size_t>(space_.r));
  for (const auto &[tile, box] : allocation_) {
    boxes[static_cast<size_t>(box - 1)].push_back(tile);
  }
  return boxes;
}

std::vector<std::pair<Cell, double>> ConfigPoint::barycentric() const {
  std::vector<std::pair<Cell, double>> out;
  for (const auto &[tile, box] : allocation_) {
    out.push_back({{box, tile}, cut_.length(tile)});
  }
  return out;
}

Simplex ConfigPoint::support() const {
  std::vector<Cell> cells;
  for (const auto &[tile, box] : allocation_) {
    cells.push_back({box, tile});
  }
  return make_simplex(std::move(cells));
}

ConfigPoint canonicalize(const Cut &cut, const Allocation &allocation, const Space &space) {
  Allocation kept;
  for (int i = 1; i <= cut.tile_count(); ++i) {
    if (cut.is_degenerate(i)) {
      continue;
    }
    auto it = allocation.find(i);
    if (it == allocation.end()) {
      throw InvalidConfiguration("non-degenerate tile " + std::to_string(i) + " has no box");
    }
    kept.emplace(i, it->second);
  }
  return ConfigPoint::make(space, cut, std::move(kept));
}

ConfigPoint act(const Permutation &sigma, const ConfigPoint &point) {
  if (sigma.size() != point.space().r) {
    throw InvalidConfiguration("permutation size does not match the number of boxes");
  }
  Allocation moved;
  for (const auto &[tile, box] : point.allocation()) {
    moved.emplace(tile, sigma(box));
  }
  return ConfigPoint::make(point.space(), point.cut(), std::move(moved));
}

ConfigPoint point_from_barycentric(const Space &space, std::span<const Cell> placement,
                                   std::span<const double> weights) {
  if (placement.size() != weights.size() || placement.empty()) {
    throw InvalidConfiguration("placement and weights must be nonempty and of equal length");
  }
  const auto variant = space.complex_variant();
  if (!is_face(variant, placement)) {
    throw InvalidConfiguration("placement is not a face of " + variant.name());
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw InvalidConfiguration("barycentric weights must be positive");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidConfiguration("barycentric weights must sum to 1");
  }

  ZPoint z{std::vector<double>(static_cast<size_t>(space.tile_count()), 0.0)};
  Allocation alloc;
  for (size_t i = 0; i < placement.size(); ++i) {
    z.lengths[static_cast<size_t>(placement[i].col - 1)] = weights[i];
    alloc[placement[i].col] = placement[i].row;
  }
  Cut cut = z_to_cut(z);
  return canonicalize(cut, alloc, space);
}

namespace {

// Lengths with the given tiles forced to zero, the rest drawn from Exp(1).
ZPoint random_lengths(int tile_count, const std::vector<bool> &zero, std::mt19937_64 &rng) {
  std::exponential_distribution<double> draw(1.0);
  ZPoint z{std::vector<double>(static_cast<size_t>(tile_count), 0.0)};
  double sum = 0.0;
  for (size_t i = 0; i < z.lengths.size(); ++i) {
    if (!zero[i]) {
      z.lengths[i] = std::max(draw(rng), 1e-3);
      sum += z.lengths[i];
    }
  }
  for (double &v : z.lengths) {
    v /= sum;
  }
  return z;
}

} // namespace

Cut random_cut(int tile_count, std::mt19937_64 &rng, double degenerate_probability) {
  std::bernoulli_distribution collapse(degenerate_probability);
  std::uniform_int_distribution<int> any_tile(0, tile_count - 1);
  std::vector<bool> zero(static_cast<size_t>(tile_count));
  for (size_t i = 0; i < zero.size(); ++i) {
    zero[i] = collapse(rng);
  }
  zero[static_cast<size_t>(any_tile(rng))] = false;
  return z_to_cut(random_lengths(tile_count, zero, rng));
}

ConfigPoint random_point(const Space &space, std::mt19937_64 &rng, double degenerate_probability) {
  const int tiles = space.tile_count();
  std::vector<bool> zero(static_cast<size_t>(tiles), false);
  if (space.kind == SpaceKind::c2) {
    std::uniform_int_distribution<int> count(1, space.r);
    const int keep = count(rng);
    std::vector<int> order(static_cast<size_t>(tiles));
    std::iota(order.begin(), order.end(), 0);
    for (int i = tiles - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick(rng))]);
    }
    for (int i = keep; i < tiles; ++i) {
      zero[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;
    }
  } else {
    std::bernoulli_distribution collapse(degenerate_probability);
    std::uniform_int_distribution<int> any_tile(0, tiles - 1);
    for (size_t i = 0; i < zero.size(); ++i) {
      zero[i] = collapse(rng);
    }
    zero[static_cast<size_t>(any_tile(rng))] = false;
  }
  const Cut cut = z_to_cut(random_lengths(tiles, zero, rng));

  Allocation alloc;
  std::vector<int> live;
  for (int t = 1; t <= tiles; ++t) {
    if (!cut.is_degenerate(t)) {
      live.push_back(t);
    }
  }
  if (space.kind == SpaceKind::c3) {
    std::uniform_int_distribution<int> box(1, space.r);
    for (int t : live) {
      alloc[t] = box(rng);
    }
  } else {
    const auto boxes = Permutation::random(space.r, rng);
    for (size_t i = 0; i < live.size(); ++i) {
      alloc[live[i]] = boxes(static_cast<int>(i) + 1);
    }
    const bool last_live = !live.empty() && live.back() == space.r;
    if (space.kind == SpaceKind::c1 && last_live && live.size() >= 2 && std::bernoulli_distribution(0.5)(rng)) {
      std::uniform_int_distribution<size_t> partner(0, live.size() - 2);
      alloc[space.r] = alloc[live[partner(rng)]];
    }
  }
  return ConfigPoint::make(space, cut, std::move(alloc));
}

} // namespace envydiv
