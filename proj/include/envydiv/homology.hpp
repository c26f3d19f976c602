#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <envydiv/complexes.hpp>

namespace envydiv {

using BigInt = boost::multiprecision::cpp_int;

/// Sparse integer matrix stored by rows.
class IntegerMatrix {
public:
  IntegerMatrix(std::size_t rows, std::size_t cols);

  [[nodiscard]] std::size_t rows() const { return row_entries_.size(); }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  void set(std::size_t row, std::size_t col, BigInt value);
  [[nodiscard]] BigInt get(std::size_t row, std::size_t col) const;
  [[nodiscard]] const std::map<std::size_t, BigInt> &row(std::size_t r) const { return row_entries_[r]; }

private:
  std::vector<std::map<std::size_t, BigInt>> row_entries_;
  std::size_t cols_;
};

/// Nonzero invariant factors d_1 | d_2 | ... of the Smith normal form, all
/// positive. Their count is the rank.
std::vector<BigInt> smith_invariant_factors(IntegerMatrix matrix);

/// Oriented boundary map from k-faces to (k-1)-faces; row index follows
/// `lower`, column index follows `upper`. Both lists must be sorted.
IntegerMatrix boundary_matrix(const std::vector<Simplex> &upper, const std::vector<Simplex> &lower);

struct HomologyReport {
  std::vector<long long> betti;             ///< reduced Betti numbers, index = degree
  std::vector<std::vector<BigInt>> torsion; ///< torsion coefficients > 1 per degree
  long long euler = 0;                      ///< Σ (-1)^k f_k over nonempty faces
  std::vector<std::size_t> face_counts;     ///< f_0, f_1, ...
};

/// Integer reduced homology in degrees 0..dim via Smith normal form.
HomologyReport reduced_homology(const SimplicialComplex &complex, std::size_t simplex_cap = 100000);

/// Every codimension-1 face in exactly two facets and the facet adjacency
/// graph connected. Throws NotPure when facets differ in dimension.
bool is_pseudomanifold(const SimplicialComplex &complex);

} // namespace envydiv
