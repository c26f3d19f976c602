#include <envydiv/reductions.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <envydiv/errors.hpp>

namespace envydiv {

namespace {

double degenerate_score(const Cut &cut, const std::vector<double> &tiles) {
  double d = 0.0;
  for (int t = 1; t <= cut.tile_count(); ++t) {
    if (cut.is_degenerate(t)) {
      d = std::max(d, tiles[static_cast<size_t>(t - 1)]);
    }
  }
  return d;
}

bool breaches(const Cut &cut, const std::vector<double> &tiles, double epsilon) {
  const int r = cut.tile_count();
  const double len = cut.length(r);
  return !cut.is_degenerate(r) && len < epsilon && tiles[static_cast<size_t>(r - 1)] > kPreferenceThreshold;
}

class Psi final : public PreferenceMatrix {
public:
  Psi(PreferencePtr source, double epsilon)
      : source_(std::move(source)), epsilon_(epsilon), space_(Space::make(SpaceKind::c1, source_->players())) {}

  PreferenceKind kind() const override { return PreferenceKind::new_style; }
  int players() const override { return source_->players(); }
  int tile_count() const override { return space_.tile_count(); }
  std::optional<Space> space() const override { return space_; }
  std::string description() const override { return "psi(" + source_->description() + ")"; }

  std::vector<double> box_scores(int player, const ConfigPoint &point) const override {
    if (!(point.space() == space_)) {
      throw DomainMismatch(description() + " is defined on " + space_.name());
    }
    const Cut &cut = point.cut();
    const int r = space_.r;
    const auto s = source_->tile_scores(player, cut);
    if (breaches(cut, s, epsilon_)) {
      throw PreconditionBreach("player " + std::to_string(player) + " prefers tile " + std::to_string(r) +
                               " of length " + std::to_string(cut.length(r)) + " < epsilon");
    }
    const bool has_degenerate = !degenerate_and_essential(cut).degenerate.empty();
    const double d = has_degenerate ? degenerate_score(cut, s) : 0.0;
    auto score = [&](int tile) { return s[static_cast<size_t>(tile - 1)]; };

    std::vector<double> boxes;
    for (const auto &content : point.box_contents()) {
      if (content.empty()) {
        boxes.push_back(d);
      } else if (content.size() == 2) {
        boxes.push_back(std::max(score(content[0]), score(content[1])));
      } else if (content[0] != r) {
        boxes.push_back(score(content[0]));
      } else {
        boxes.push_back(has_degenerate ? std::max(score(r), d) : score(r));
      }
    }
    return normalized(std::move(boxes));
  }

private:
  PreferencePtr source_;
  double epsilon_;
  Space space_;
};

class Phi final : public PreferenceMatrix {
public:
  Phi(PreferencePtr source, bool check)
      : source_(std::move(source)), check_(check), space_(Space::make(SpaceKind::c2, source_->players())) {}

  PreferenceKind kind() const override { return PreferenceKind::new_style; }
  int players() const override { return source_->players(); }
  int tile_count() const override { return space_.tile_count(); }
  std::optional<Space> space() const override { return space_; }
  std::string description() const override { return "phi(" + source_->description() + ")"; }

  std::vector<double> box_scores(int player, const ConfigPoint &point) const override {
    if (!(point.space() == space_)) {
      throw DomainMismatch(description() + " is defined on " + space_.name());
    }
    auto left = reduce(player, point, EliminationOrder::from_left);
    if (check_) {
      const auto right = reduce(player, point, EliminationOrder::from_right);
      for (size_t i = 0; i < left.size(); ++i) {
        if (std::abs(left[i] - right[i]) > 1e-12) {
          throw PartitionEquivalenceViolation("player " + std::to_string(player) + " scores box " +
                                              std::to_string(i + 1) + " differently after another elimination");
        }
      }
    }
    return left;
  }

private:
  std::vector<double> reduce(int player, const ConfigPoint &point, EliminationOrder order) const {
    const int r = space_.r;
    const Cut y = eliminate_superfluous(point.cut(), r, order);
    const auto s = source_->tile_scores(player, y);
    const auto ex = degenerate_and_essential(point.cut());
    const auto ey = degenerate_and_essential(y);
    double degenerate_mass = 0.0;
    for (int t : ey.degenerate) {
      degenerate_mass += s[static_cast<size_t>(t - 1)];
    }
    std::vector<double> boxes(static_cast<size_t>(r), 0.0);
    for (size_t k = 0; k < ex.essential.size(); ++k) {
      const int box = point.allocation().at(ex.essential[k].label);
      boxes[static_cast<size_t>(box - 1)] = s[static_cast<size_t>(ey.essential[k].label - 1)];
    }
    const auto contents = point.box_contents();
    const auto empty = std::count_if(contents.begin(), contents.end(), [](const auto &c) { return c.empty(); });
    for (size_t i = 0; i < contents.size(); ++i) {
      if (contents[i].empty()) {
        boxes[i] = degenerate_mass / static_cast<double>(empty);
      }
    }
    return normalized(std::move(boxes));
  }

  PreferencePtr source_;
  bool check_;
  Space space_;
};

void require_old_style(const PreferenceMatrix &source, int tiles) {
  if (source.kind() != PreferenceKind::old_style) {
    throw InvalidConfiguration("reductions take old-style preferences");
  }
  if (source.tile_count() != tiles) {
    throw InvalidConfiguration("source preferences must score cuts with " + std::to_string(tiles) + " tiles");
  }
}

} // namespace

void check_psi_precondition(const PreferenceMatrix &source, double epsilon, int samples, std::uint64_t seed) {
  const int r = source.tile_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    // Tile r gets a length in (0, epsilon); the rest is a random cut of the remainder.
    const double len = epsilon * (0.001 + 0.998 * unit(rng));
    if (len <= kDegenerateTolerance) {
      continue;
    }
    auto z = cut_to_z(random_cut(r - 1, rng, 0.3)).lengths;
    for (double &v : z) {
      v *= 1.0 - len;
    }
    z.push_back(len);
    const Cut cut = z_to_cut(ZPoint{z});
    for (int j = 1; j <= source.players(); ++j) {
      if (breaches(cut, source.tile_scores(j, cut), epsilon)) {
        throw PreconditionBreach("player " + std::to_string(j) + " prefers tile " + std::to_string(r) +
                                 " of length " + std::to_string(len) + " < epsilon");
      }
    }
  }
}

PreferencePtr psi(PreferencePtr source, double epsilon, int precondition_samples, std::uint64_t seed) {
  require_old_style(*source, source->players());
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidConfiguration("psi needs 0 < epsilon < 1");
  }
  check_psi_precondition(*source, epsilon, precondition_samples, seed);
  return std::make_shared<Psi>(std::move(source), epsilon);
}

PreferencePtr phi(PreferencePtr source, bool check_consistency) {
  require_old_style(*source, source->players());
  return std::make_shared<Phi>(std::move(source), check_consistency);
}

Cut eliminate_superfluous(const Cut &cut, int r, EliminationOrder order) {
  const auto degenerate = degenerate_and_essential(cut).degenerate.size();
  if (r < 2 || static_cast<int>(cut.points().size()) < r - 1) {
    throw InvalidConfiguration("cut is too short to drop r-1 points");
  }
  if (static_cast<int>(degenerate) < r - 1) {
    throw InvalidConfiguration("cut has " + std::to_string(degenerate) + " degenerate tiles; need at least " +
                               std::to_string(r - 1));
  }
  std::vector<double> pts(cut.points().begin(), cut.points().end());
  std::vector<bool> keep(pts.size(), true);
  // Values within the degeneracy tolerance count as repeats.
  auto repeated = [&](size_t i) {
    if (pts[i] <= kDegenerateTolerance || pts[i] >= 1.0 - kDegenerateTolerance) {
      return true;
    }
    for (size_t k = 0; k < pts.size(); ++k) {
      if (k != i && keep[k] && std::abs(pts[k] - pts[i]) <= kDegenerateTolerance) {
        return true;
      }
    }
    return false;
  };
  int removed = 0;
  for (size_t step = 0; step < pts.size() && removed < r - 1; ++step) {
    const size_t i = order == EliminationOrder::from_left ? step : pts.size() - 1 - step;
    if (repeated(i)) {
      keep[i] = false;
      ++removed;
    }
  }
  std::vector<double> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) {
      out.push_back(pts[i]);
    }
  }
  return Cut(std::move(out));
}

} // namespace envydiv
