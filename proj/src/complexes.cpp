#include <envydiv/complexes.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include <envydiv/errors.hpp>

namespace envydiv {

ComplexVariant ComplexVariant::chessboard(int m, int n) {
  if (m < 1 || n < 1) {
    throw InvalidConfiguration("chessboard dimensions must be at least 1");
  }
  return {ComplexKind::chessboard, m, n};
}

ComplexVariant ComplexVariant::gorbushka_join(int r) {
  if (r < 2) {
    throw InvalidConfiguration("gorbushka join requires r >= 2");
  }
  return {ComplexKind::gorbushka_join, r, r};
}

ComplexVariant ComplexVariant::join_power(int r) {
  if (r < 2) {
    throw InvalidConfiguration("join power requires r >= 2");
  }
  return {ComplexKind::join_power, r, r};
}

std::string ComplexVariant::name() const {
  switch (kind) {
  case ComplexKind::chessboard:
    return "chessboard(" + std::to_string(rows) + "," + std::to_string(cols) + ")";
  case ComplexKind::gorbushka_join:
    return "gorbushka_join(" + std::to_string(rows) + ")";
  case ComplexKind::join_power:
    return "join_power(" + std::to_string(rows) + ")";
  case ComplexKind::explicit_facets:
    return "explicit";
  }
  return "unknown";
}

Simplex make_simplex(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

namespace {

// Predicate on an in-board placement; cells may be unsorted.
bool board_predicate(const ComplexVariant &v, std::span<const Cell> cells) {
  std::map<int, int> per_row;
  std::set<int> cols;
  bool touches_last_col = false;
  for (const auto &c : cells) {
    if (!cols.insert(c.col).second) {
      return false;
    }
    ++per_row[c.row];
  }
  switch (v.kind) {
  case ComplexKind::join_power:
    return true;
  case ComplexKind::chessboard:
    return std::all_of(per_row.begin(), per_row.end(), [](const auto &kv) { return kv.second <= 1; });
  case ComplexKind::gorbushka_join:
    for (const auto &[row, count] : per_row) {
      if (count > 2) {
        return false;
      }
      if (count == 2) {
        touches_last_col = std::any_of(cells.begin(), cells.end(),
                                       [&](const Cell &c) { return c.row == row && c.col == v.cols; });
        if (!touches_last_col) {
          return false;
        }
      }
    }
    return true;
  case ComplexKind::explicit_facets:
    break;
  }
  return false;
}

void check_on_board(const ComplexVariant &v, std::span<const Cell> cells) {
  for (const auto &c : cells) {
    if (c.row < 1 || c.row > v.rows || c.col < 1 || c.col > v.cols) {
      throw InvalidConfiguration("cell (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                                 ") lies off the " + v.name() + " board");
    }
  }
}

bool is_subset(std::span<const Cell> small, std::span<const Cell> big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

} // namespace

bool is_face(const ComplexVariant &variant, std::span<const Cell> placement) {
  if (variant.kind == ComplexKind::explicit_facets) {
    throw InvalidConfiguration("explicit complexes have no closed-form face predicate");
  }
  check_on_board(variant, placement);
  return board_predicate(variant, placement);
}

Simplex permute_rows(std::span<const Cell> simplex, const Permutation &sigma) {
  std::vector<Cell> out;
  out.reserve(simplex.size());
  for (const auto &c : simplex) {
    out.push_back({sigma(c.row), c.col});
  }
  return make_simplex(std::move(out));
}

SimplicialComplex SimplicialComplex::build(const ComplexVariant &variant) {
  if (variant.kind == ComplexKind::explicit_facets) {
    throw InvalidConfiguration("build() needs a board variant; use from_facets()");
  }
  if (variant.rows < 1 || variant.cols < 1) {
    throw InvalidConfiguration("board dimensions must be at least 1");
  }
  if (variant.kind != ComplexKind::chessboard && variant.rows < 2) {
    throw InvalidConfiguration("join variants require r >= 2");
  }

  SimplicialComplex out;
  out.variant_ = variant;
  for (int col = 1; col <= variant.cols; ++col) {
    for (int row = 1; row <= variant.rows; ++row) {
      out.vertices_.push_back({row, col});
    }
  }

  // Each column is either skipped or given one row. The predicate is monotone,
  // so prefixes that fail can be pruned.
  std::vector<Cell> current;
  std::vector<int> skipped;
  auto is_maximal = [&]() {
    for (int col : skipped) {
      for (int row = 1; row <= variant.rows; ++row) {
        current.push_back({row, col});
        const bool extendable = board_predicate(variant, current);
        current.pop_back();
        if (extendable) {
          return false;
        }
      }
    }
    return true;
  };
  auto recurse = [&](auto &&self, int col) -> void {
    if (col > variant.cols) {
      if (!current.empty() && is_maximal()) {
        out.facets_.push_back(make_simplex(current));
      }
      return;
    }
    for (int row = 1; row <= variant.rows; ++row) {
      current.push_back({row, col});
      if (board_predicate(variant, current)) {
        self(self, col + 1);
      }
      current.pop_back();
    }
    skipped.push_back(col);
    self(self, col + 1);
    skipped.pop_back();
  };
  recurse(recurse, 1);
  std::sort(out.facets_.begin(), out.facets_.end());
  return out;
}

SimplicialComplex SimplicialComplex::from_facets(std::vector<Simplex> facets, const ComplexVariant &variant) {
  for (const auto &f : facets) {
    if (!is_face(variant, f)) {
      throw InvalidConfiguration("facet is not a face of " + variant.name());
    }
  }
  auto out = from_facets(std::move(facets));
  out.variant_ = variant;
  return out;
}

SimplicialComplex SimplicialComplex::from_facets(std::vector<Simplex> facets) {
  for (auto &f : facets) {
    f = make_simplex(std::move(f));
  }
  std::sort(facets.begin(), facets.end());
  facets.erase(std::unique(facets.begin(), facets.end()), facets.end());

  SimplicialComplex out;
  out.variant_ = {ComplexKind::explicit_facets, 0, 0};
  std::set<Cell> verts;
  for (size_t i = 0; i < facets.size(); ++i) {
    if (facets[i].empty()) {
      continue;
    }
    bool dominated = false;
    for (size_t j = 0; j < facets.size() && !dominated; ++j) {
      dominated = j != i && facets[j].size() > facets[i].size() && is_subset(facets[i], facets[j]);
    }
    if (!dominated) {
      out.facets_.push_back(facets[i]);
    }
    for (const auto &c : facets[i]) {
      verts.insert(c);
      out.variant_.rows = std::max(out.variant_.rows, c.row);
      out.variant_.cols = std::max(out.variant_.cols, c.col);
    }
  }
  out.vertices_.assign(verts.begin(), verts.end());
  return out;
}

int SimplicialComplex::dimension() const {
  int dim = -1;
  for (const auto &f : facets_) {
    dim = std::max(dim, static_cast<int>(f.size()) - 1);
  }
  return dim;
}

bool SimplicialComplex::is_pure() const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Simplex &f) { return static_cast<int>(f.size()) - 1 == dimension(); });
}

bool SimplicialComplex::contains(std::span<const Cell> placement) const {
  const Simplex s = make_simplex({placement.begin(), placement.end()});
  if (variant_.kind != ComplexKind::explicit_facets) {
    return is_face(variant_, s);
  }
  return std::any_of(facets_.begin(), facets_.end(), [&](const Simplex &f) { return is_subset(s, f); });
}

std::vector<std::vector<Simplex>> SimplicialComplex::faces_by_dimension(std::size_t cap) const {
  const int dim = dimension();
  std::vector<std::set<Simplex>> groups(static_cast<size_t>(std::max(dim + 1, 0)));
  std::size_t total = 0;
  for (const auto &f : facets_) {
    const auto k = f.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      Simplex face;
      for (size_t b = 0; b < k; ++b) {
        if (mask & (std::uint64_t{1} << b)) {
          face.push_back(f[b]);
        }
      }
      if (groups[face.size() - 1].insert(std::move(face)).second && ++total > cap) {
        throw ResourceExhausted("complex has more than " + std::to_string(cap) + " faces");
      }
    }
  }
  std::vector<std::vector<Simplex>> out;
  out.reserve(groups.size());
  for (auto &g : groups) {
    out.emplace_back(g.begin(), g.end());
  }
  return out;
}

} // namespace envydiv
