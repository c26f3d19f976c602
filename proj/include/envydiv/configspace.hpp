#pragma once

#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <envydiv/complexes.hpp>
#include <envydiv/permutation.hpp>

namespace envydiv {

/// Tile lengths at or below this are treated as zero.
inline constexpr double kDegenerateTolerance = 1e-9;

enum class SpaceKind {
  c1, ///< r tiles, one tile per box except tile r may share (gorbushka join).
  c2, ///< 2r-1 tiles, at most one non-degenerate tile per box (chessboard(r, 2r-1)).
  c3  ///< r tiles, unrestricted allocation (join power).
};

struct Space {
  SpaceKind kind = SpaceKind::c1;
  int r = 0;

  /// Throws InvalidConfiguration for r < 2.
  static Space make(SpaceKind kind, int r);
  static Space parse(const std::string &name, int r);

  [[nodiscard]] int tile_count() const { return kind == SpaceKind::c2 ? 2 * r - 1 : r; }
  [[nodiscard]] ComplexVariant complex_variant() const;
  [[nodiscard]] std::string name() const;

  friend bool operator==(const Space &, const Space &) = default;
};

/// Non-decreasing cut-points 0 <= x_1 <= ... <= x_k <= 1; tile i is
/// [x_{i-1}, x_i] with x_0 = 0 and x_{k+1} = 1.
class Cut {
public:
  Cut() = default;
  /// Throws InvalidConfiguration unless the points are ordered inside [0,1].
  explicit Cut(std::vector<double> points);

  [[nodiscard]] int tile_count() const { return static_cast<int>(points_.size()) + 1; }
  [[nodiscard]] std::span<const double> points() const { return points_; }
  [[nodiscard]] double left(int tile) const;
  [[nodiscard]] double right(int tile) const;
  [[nodiscard]] double length(int tile) const { return right(tile) - left(tile); }
  [[nodiscard]] bool is_degenerate(int tile, double tol = kDegenerateTolerance) const {
    return length(tile) <= tol;
  }

  friend bool operator==(const Cut &, const Cut &) = default;

private:
  std::vector<double> points_;
};

/// Tile lengths; a point of the standard simplex.
struct ZPoint {
  std::vector<double> lengths;
};

ZPoint cut_to_z(const Cut &cut);
/// Rejects negative components and sums off 1 by more than 1e-9.
Cut z_to_cut(const ZPoint &z);

struct Interval {
  double left = 0;
  double right = 0;
};

struct EssentialTile {
  Interval interval;
  int label = 0;
};

struct TileClassification {
  std::vector<int> degenerate;          ///< Deg(x), ascending
  std::vector<EssentialTile> essential; ///< Ess(x) with labels, left to right
};

TileClassification degenerate_and_essential(const Cut &cut, double tol = kDegenerateTolerance);

/// Same essential intervals, endpoints compared within tol. Tile counts may differ.
bool partition_equivalent(const Cut &a, const Cut &b, double tol = kDegenerateTolerance);

/// Tile label -> box label, both 1-based.
using Allocation = std::map<int, int>;

/// A canonical (cut, allocation) pair: only non-degenerate tiles are allocated.
class ConfigPoint {
public:
  /// Validates tile count, that the allocation covers exactly the
  /// non-degenerate tiles, and the space's allocation rule.
  static ConfigPoint make(const Space &space, Cut cut, Allocation allocation);

  [[nodiscard]] const Space &space() const { return space_; }
  [[nodiscard]] const Cut &cut() const { return cut_; }
  [[nodiscard]] const Allocation &allocation() const { return allocation_; }

  /// Tiles in each box; index b-1 for box b, tiles ascending.
  [[nodiscard]] std::vector<std::vector<int>> box_contents() const;

  /// Support cells (box, tile) with tile lengths as weights, column order.
  [[nodiscard]] std::vector<std::pair<Cell, double>> barycentric() const;
  [[nodiscard]] Simplex support() const;

  friend bool operator==(const ConfigPoint &, const ConfigPoint &) = default;

private:
  Space space_;
  Cut cut_;
  Allocation allocation_;
};

/// Throws VariantConstraintViolation if the allocation of the listed
/// non-degenerate tiles breaks the space's rule.
void check_allocation_rule(const Space &space, const Allocation &nondegenerate);

/// Drops degenerate tiles from the allocation and validates the rest.
ConfigPoint canonicalize(const Cut &cut, const Allocation &allocation, const Space &space);

/// Relabels boxes: (x, α) -> (x, σ ∘ α).
ConfigPoint act(const Permutation &sigma, const ConfigPoint &point);

/// Cut from column weights (absent columns get zero length), allocation from
/// rows. Rejects non-faces, non-positive weights, and weights not summing to 1.
ConfigPoint point_from_barycentric(const Space &space, std::span<const Cell> placement,
                                   std::span<const double> weights);

/// Random cut with roughly `degenerate_probability` of its tiles collapsed;
/// at least one tile is always non-degenerate.
Cut random_cut(int tile_count, std::mt19937_64 &rng, double degenerate_probability = 0.25);

/// Random canonical point of the space. For c2 the number of non-degenerate
/// tiles is drawn from 1..r so that the allocation can be admissible.
ConfigPoint random_point(const Space &space, std::mt19937_64 &rng, double degenerate_probability = 0.25);

} // namespace envydiv
