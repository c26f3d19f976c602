#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <envydiv/configspace.hpp>

namespace envydiv {

/// A box (or tile) counts as preferred when its score exceeds this.
inline constexpr double kPreferenceThreshold = 1e-9;

enum class PreferenceKind {
  old_style, ///< scores over the tiles of a cut
  new_style  ///< scores over the boxes of a configuration point
};

using DomainPoint = std::variant<Cut, ConfigPoint>;

/// Score oracle for r players. Each call returns a non-negative vector
/// summing to 1 whose support is the player's preferred set. Implementations
/// must be pure: the solver calls them from several threads.
class PreferenceMatrix {
public:
  virtual ~PreferenceMatrix() = default;

  [[nodiscard]] virtual PreferenceKind kind() const = 0;
  [[nodiscard]] virtual int players() const = 0;
  /// Old-style: number of tiles of the cuts it accepts. New-style: the space's tile count.
  [[nodiscard]] virtual int tile_count() const = 0;
  /// Set for new-style oracles only.
  [[nodiscard]] virtual std::optional<Space> space() const { return std::nullopt; }
  [[nodiscard]] virtual std::string description() const = 0;

  [[nodiscard]] virtual std::vector<double> tile_scores(int player, const Cut &cut) const;
  [[nodiscard]] virtual std::vector<double> box_scores(int player, const ConfigPoint &point) const;
};

using PreferencePtr = std::shared_ptr<const PreferenceMatrix>;

/// Dispatches on the point type; throws DomainMismatch for the wrong kind.
std::vector<double> scores(const PreferenceMatrix &prefs, int player, const DomainPoint &point);

/// Divides by the sum when positive; returns the input unchanged otherwise.
std::vector<double> normalized(std::vector<double> raw);

/// Old-style oracle given by unnormalized, per-player tile weights.
class TileWeightModel : public PreferenceMatrix {
public:
  TileWeightModel(std::string name, int players, int tiles) : name_(std::move(name)), players_(players), tiles_(tiles) {}

  [[nodiscard]] PreferenceKind kind() const override { return PreferenceKind::old_style; }
  [[nodiscard]] int players() const override { return players_; }
  [[nodiscard]] int tile_count() const override { return tiles_; }
  [[nodiscard]] std::string description() const override { return name_; }
  [[nodiscard]] std::vector<double> tile_scores(int player, const Cut &cut) const override;

protected:
  [[nodiscard]] virtual std::vector<double> raw_weights(int player, const Cut &cut) const = 0;

private:
  std::string name_;
  int players_;
  int tiles_;
};

/// Breakpoint table: (tile length, weight) pairs, lengths ascending from 0 to 1.
using BreakpointTable = std::vector<std::pair<double, double>>;

/// Piecewise-linear interpolation; constant beyond the end breakpoints.
double interpolate(const BreakpointTable &table, double length);

/// Built-in old-style model. Known names: hungry, gorbushka, burnt,
/// piecewise_random, piecewise, greedy. `tiles` defaults to `players`.
/// Throws InputError for unknown names and bad parameters.
PreferencePtr make_builtin(const std::string &name, int players, const nlohmann::json &params = {},
                           std::uint64_t seed = 0, std::optional<int> tiles = std::nullopt);

/// New-style oracle on `space` that scores a box by the best tile it holds and
/// an empty box by the degenerate-tile score. Equivariant by construction.
PreferencePtr content_lift(PreferencePtr source, const Space &space);

enum class Property { covering, equivariance, p_dte, p_pe, continuity };

std::string to_string(Property p);
Property parse_property(const std::string &name);

struct Witness {
  DomainPoint point;
  int player = 0;
  std::string detail;
};

struct ValidationReport {
  Property property = Property::covering;
  int samples = 0;
  std::vector<Witness> violations; ///< first few witnesses
  int violation_count = 0; ///< failed checks, possibly several per sample
  int failed_samples = 0;
  double max_deviation = 0.0;

  [[nodiscard]] bool ok() const { return violation_count == 0; }
};

struct ValidationOptions {
  double tolerance = 1e-9;      ///< identity tolerance for equivariance / p_dte / p_pe
  double step = 1e-7;           ///< perturbation size for continuity
  double modulus = 1e4;         ///< allowed score change per unit perturbation
  std::size_t max_witnesses = 16;
};

/// Statistical check of one preference axiom on seeded samples. Only ever
/// falsifies: an empty violation list means no counterexample was drawn.
/// Throws InvalidConfiguration when the property does not apply to the kind.
ValidationReport validate(const PreferenceMatrix &prefs, Property property, int sample_count, std::uint64_t seed,
                          const ValidationOptions &options = {});

} // namespace envydiv
