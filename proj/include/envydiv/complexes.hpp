#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <envydiv/permutation.hpp>

namespace envydiv {

/// A square of the board. Rows are boxes, columns are tiles; both 1-based.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell &, const Cell &) = default;
  // Column-major so that a sorted simplex lists its tiles left to right.
  friend std::strong_ordering operator<=>(const Cell &a, const Cell &b) {
    if (auto c = a.col <=> b.col; c != 0) {
      return c;
    }
    return a.row <=> b.row;
  }
};

/// Sorted, duplicate-free list of cells.
using Simplex = std::vector<Cell>;

enum class ComplexKind {
  chessboard,     ///< Δ_{m,n}: at most one cell per row and per column.
  gorbushka_join, ///< Δ_{r,r-1} * [r]: one row may hold two cells if one is in column r.
  join_power,     ///< [r]^{*r}: at most one cell per column.
  explicit_facets ///< arbitrary complex given by its facets.
};

struct ComplexVariant {
  ComplexKind kind = ComplexKind::chessboard;
  int rows = 0;
  int cols = 0;

  static ComplexVariant chessboard(int m, int n);
  static ComplexVariant gorbushka_join(int r);
  static ComplexVariant join_power(int r);

  [[nodiscard]] std::string name() const;
  friend bool operator==(const ComplexVariant &, const ComplexVariant &) = default;
};

/// Sorts and deduplicates.
Simplex make_simplex(std::vector<Cell> cells);

/// Face predicate of a board variant. Throws InvalidConfiguration for cells
/// off the board and for explicit_facets (which has no closed-form predicate).
bool is_face(const ComplexVariant &variant, std::span<const Cell> placement);

/// Relabels rows by sigma (box relabeling).
Simplex permute_rows(std::span<const Cell> simplex, const Permutation &sigma);

class SimplicialComplex {
public:
  /// Enumerates the maximal simplices of a board variant by backtracking over
  /// columns. Rejects r < 2 and board dimensions < 1.
  static SimplicialComplex build(const ComplexVariant &variant);

  /// Complex generated by the given facets; non-maximal entries are dropped.
  static SimplicialComplex from_facets(std::vector<Simplex> facets);

  /// Same, tagged with a board variant (used when restoring a cached complex).
  /// Throws InvalidConfiguration if some facet is not a face of the variant.
  static SimplicialComplex from_facets(std::vector<Simplex> facets, const ComplexVariant &variant);

  [[nodiscard]] const ComplexVariant &variant() const { return variant_; }
  [[nodiscard]] const std::vector<Cell> &vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Simplex> &maximal_simplices() const { return facets_; }

  /// Largest facet dimension; -1 for the empty complex.
  [[nodiscard]] int dimension() const;
  [[nodiscard]] bool is_pure() const;

  /// True iff the placement is a face of this complex.
  [[nodiscard]] bool contains(std::span<const Cell> placement) const;

  /// Nonempty faces grouped by dimension, each group sorted. Throws
  /// ResourceExhausted once more than `cap` faces would be produced.
  [[nodiscard]] std::vector<std::vector<Simplex>> faces_by_dimension(std::size_t cap = 100000) const;

private:
  ComplexVariant variant_;
  std::vector<Cell> vertices_;
  std::vector<Simplex> facets_;
};

} // namespace envydiv
