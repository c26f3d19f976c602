#include <envydiv/homology.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include <envydiv/errors.hpp>

namespace envydiv {

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols) : row_entries_(rows), cols_(cols) {}

void IntegerMatrix::set(std::size_t row, std::size_t col, BigInt value) {
  if (row >= rows() || col >= cols_) {
    throw InvalidConfiguration("matrix index out of range");
  }
  if (value == 0) {
    row_entries_[row].erase(col);
  } else {
    row_entries_[row][col] = std::move(value);
  }
}

BigInt IntegerMatrix::get(std::size_t row, std::size_t col) const {
  const auto &r = row_entries_.at(row);
  auto it = r.find(col);
  return it == r.end() ? BigInt(0) : it->second;
}

namespace {

// Working copy for elimination: rows plus a column -> rows index.
struct Eliminator {
  std::vector<std::map<std::size_t, BigInt>> rows;
  std::vector<std::set<std::size_t>> col_rows;

  explicit Eliminator(const IntegerMatrix &m) : rows(m.rows()), col_rows(m.cols()) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      rows[r] = m.row(r);
      for (const auto &[c, v] : rows[r]) {
        col_rows[c].insert(r);
      }
    }
  }

  void put(std::size_t r, std::size_t c, BigInt v) {
    if (v == 0) {
      rows[r].erase(c);
      col_rows[c].erase(r);
    } else {
      rows[r][c] = std::move(v);
      col_rows[c].insert(r);
    }
  }

  BigInt at(std::size_t r, std::size_t c) const {
    auto it = rows[r].find(c);
    return it == rows[r].end() ? BigInt(0) : it->second;
  }

  // row_k -= t * row_p
  void row_axpy(std::size_t k, std::size_t p, const BigInt &t) {
    const auto pivot_row = rows[p];
    for (const auto &[c, v] : pivot_row) {
      put(k, c, at(k, c) - t * v);
    }
  }

  // col_l -= t * col_q
  void col_axpy(std::size_t l, std::size_t q, const BigInt &t) {
    const auto touched = col_rows[q];
    for (std::size_t k : touched) {
      put(k, l, at(k, l) - t * at(k, q));
    }
  }
};

} // namespace

std::vector<BigInt> smith_invariant_factors(IntegerMatrix matrix) {
  Eliminator e(matrix);
  std::vector<BigInt> diagonal;

  for (;;) {
    // Prefer a unit pivot; otherwise the entry of least magnitude, so that any
    // nonzero remainder left behind becomes a strictly smaller pivot next time.
    bool found = false;
    std::size_t p = 0;
    std::size_t q = 0;
    BigInt best;
    for (std::size_t r = 0; r < e.rows.size() && !(found && abs(best) == 1); ++r) {
      for (const auto &[c, v] : e.rows[r]) {
        if (!found || abs(v) < abs(best)) {
          found = true;
          best = v;
          p = r;
          q = c;
          if (abs(v) == 1) {
            break;
          }
        }
      }
    }
    if (!found) {
      break;
    }

    const BigInt a = e.at(p, q);
    const auto col_targets = e.col_rows[q];
    for (std::size_t k : col_targets) {
      if (k != p) {
        e.row_axpy(k, p, e.at(k, q) / a);
      }
    }
    const auto row_targets = e.rows[p];
    for (const auto &[l, v] : row_targets) {
      if (l != q) {
        e.col_axpy(l, q, e.at(p, l) / a);
      }
    }
    if (e.col_rows[q].size() == 1 && e.rows[p].size() == 1) {
      diagonal.push_back(abs(a));
      e.put(p, q, 0);
    }
  }

  // A diagonal matrix diag(a, b) is equivalent to diag(gcd, lcm); apply this
  // to every pair of non-units to reach the divisibility chain.
  std::vector<BigInt> units;
  std::vector<BigInt> rest;
  for (auto &d : diagonal) {
    (d == 1 ? units : rest).push_back(d);
  }
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (std::size_t j = i + 1; j < rest.size(); ++j) {
      const BigInt g = boost::multiprecision::gcd(rest[i], rest[j]);
      const BigInt l = rest[i] / g * rest[j];
      rest[i] = g;
      rest[j] = l;
    }
  }
  units.insert(units.end(), rest.begin(), rest.end());
  return units;
}

IntegerMatrix boundary_matrix(const std::vector<Simplex> &upper, const std::vector<Simplex> &lower) {
  IntegerMatrix m(lower.size(), upper.size());
  for (std::size_t j = 0; j < upper.size(); ++j) {
    const auto &s = upper[j];
    for (std::size_t omit = 0; omit < s.size(); ++omit) {
      Simplex face;
      face.reserve(s.size() - 1);
      for (std::size_t t = 0; t < s.size(); ++t) {
        if (t != omit) {
          face.push_back(s[t]);
        }
      }
      auto it = std::lower_bound(lower.begin(), lower.end(), face);
      if (it == lower.end() || *it != face) {
        throw InvalidConfiguration("boundary face missing from lower face list");
      }
      m.set(static_cast<std::size_t>(it - lower.begin()), j, omit % 2 == 0 ? 1 : -1);
    }
  }
  return m;
}

HomologyReport reduced_homology(const SimplicialComplex &complex, std::size_t simplex_cap) {
  const auto faces = complex.faces_by_dimension(simplex_cap);
  const std::size_t top = faces.size();

  HomologyReport report;
  for (std::size_t k = 0; k < top; ++k) {
    report.face_counts.push_back(faces[k].size());
    report.euler += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(faces[k].size());
  }

  // factors[k] = invariant factors of ∂_k : C_k -> C_{k-1}; ∂_0 is augmentation.
  std::vector<std::vector<BigInt>> factors(top + 1);
  if (top > 0 && !faces[0].empty()) {
    factors[0] = {BigInt(1)};
  }
  for (std::size_t k = 1; k < top; ++k) {
    factors[k] = smith_invariant_factors(boundary_matrix(faces[k], faces[k - 1]));
  }

  for (std::size_t k = 0; k < top; ++k) {
    const auto rank_k = static_cast<long long>(factors[k].size());
    const auto rank_up = static_cast<long long>(factors[k + 1].size());
    report.betti.push_back(static_cast<long long>(faces[k].size()) - rank_k - rank_up);
    std::vector<BigInt> tors;
    for (const auto &d : factors[k + 1]) {
      if (d > 1) {
        tors.push_back(d);
      }
    }
    report.torsion.push_back(std::move(tors));
  }
  return report;
}

bool is_pseudomanifold(const SimplicialComplex &complex) {
  const auto &facets = complex.maximal_simplices();
  if (facets.empty()) {
    return false;
  }
  if (!complex.is_pure()) {
    throw NotPure("complex " + complex.variant().name() + " is not pure");
  }

  std::map<Simplex, std::vector<std::size_t>> ridges;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    for (std::size_t omit = 0; omit < facets[i].size(); ++omit) {
      Simplex ridge = facets[i];
      ridge.erase(ridge.begin() + static_cast<std::ptrdiff_t>(omit));
      ridges[ridge].push_back(i);
    }
  }

  std::vector<std::size_t> parent(facets.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      x = parent[x] = parent[parent[x]];
    }
    return x;
  };
  for (const auto &[ridge, owners] : ridges) {
    if (owners.size() != 2) {
      return false;
    }
    parent[find(owners[0])] = find(owners[1]);
  }
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < facets.size(); ++i) {
    if (find(i) != root) {
      return false;
    }
  }
  return true;
}

} // namespace envydiv
