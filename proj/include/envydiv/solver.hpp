#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <envydiv/permutation.hpp>
#include <envydiv/preferences.hpp>

namespace envydiv {

/// r x r scores, row j = player j, column i = box (or tile) i.
class StochasticMatrix {
public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(std::vector<std::vector<double>> rows);

  [[nodiscard]] int size() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] double operator()(int player, int box) const {
    return rows_[static_cast<size_t>(player - 1)][static_cast<size_t>(box - 1)];
  }
  [[nodiscard]] const std::vector<std::vector<double>> &rows() const { return rows_; }
  /// F_i = (1/r) * sum_j f_i^j.
  [[nodiscard]] std::vector<double> averages() const;
  /// max_i |F_i - 1/r|.
  [[nodiscard]] double residual() const;

private:
  std::vector<std::vector<double>> rows_;
};

StochasticMatrix average_matrix(const PreferenceMatrix &prefs, const ConfigPoint &point);

/// Largest t such that some permutation has every f^j_{sigma(j)} >= t.
double bottleneck_value(const StochasticMatrix &m);

struct SearchOptions {
  double tolerance = 1e-6;
  int max_depth = 12;
  int multistarts = 32;
  std::uint64_t seed = 20240611;
  unsigned threads = 0; ///< 0: hardware concurrency
  /// After a zero is found, move the division to a point whose worst-off
  /// player scores higher (the residual there is no longer small).
  bool raise_bottleneck = false;
};

struct SearchResult {
  ConfigPoint point;
  double residual = 0.0;
  bool converged = false;
  long evaluations = 0;
  /// Best residual after each depth level of the winning start.
  std::vector<double> trace;
};

/// Minimizes the residual over the facets of the space's complex (one per
/// orbit of box relabelings), from the best coarse-lattice points.
SearchResult search(const Space &space, const PreferenceMatrix &prefs, const SearchOptions &options = {});

/// Lexicographically least sigma with f^j_{sigma(j)} > threshold for all j.
/// Throws NoPerfectMatching.
Permutation extract_assignment(const StochasticMatrix &m, double threshold = kPreferenceThreshold);

struct BirkhoffTerm {
  double weight;
  Permutation permutation;
};

/// Greedy peeling with lexicographically least matchings. Throws
/// NotDoublyStochastic when rows or columns miss 1 by more than tol, or the
/// support stops admitting a perfect matching before the mass is used up.
std::vector<BirkhoffTerm> birkhoff(const StochasticMatrix &m, double tol = 1e-9);

struct EnvyFreeDivision {
  DomainPoint point;
  StochasticMatrix matrix;
  Permutation assignment = Permutation::identity(1); ///< player j gets box (or tile) assignment(j)
  double residual = 0.0;
  std::vector<bool> certificate; ///< per player: assigned box preferred
};

enum class SolveStatus { ok, budget_exhausted, no_matching };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::budget_exhausted;
  std::optional<EnvyFreeDivision> division;
  SearchResult search;
  bool hypothesis_met = false;
  std::string note;
};

/// C1: r prime or r = 4. C2 and C3: r a prime power.
bool meets_hypothesis(const Space &space);

/// Search, then extract an assignment. `prefs` must be new-style on `space`.
SolveResult solve(const Space &space, const PreferenceMatrix &prefs, const SearchOptions &options = {});

/// Reads a C1 or C2 division back as a tile division under the old-style
/// source it was reduced from: each player gets a distinct tile of the (reduced)
/// cut that the source prefers. Throws NoPerfectMatching otherwise.
EnvyFreeDivision to_tile_division(const EnvyFreeDivision &division, const PreferenceMatrix &source);

struct BruteForceResult {
  bool feasible = false;  ///< max-min score above the preference threshold
  double max_min = 0.0;
  int grid = 0;
  long points = 0; ///< grid points (cut, allocation) scanned
  std::optional<EnvyFreeDivision> best;
};

/// Exhaustive scan of cuts with points i/(grid-1), every admissible allocation
/// (new-style) and every assignment. Old-style oracles are scanned over cuts and
/// tile assignments. Needs r <= 4 and grid <= 64; throws ResourceExhausted past
/// `max_evaluations` oracle calls.
BruteForceResult brute_force(const Space &space, const PreferenceMatrix &prefs, int grid,
                             long max_evaluations = 50'000'000);

/// Every player's assigned box (tile) scores above the threshold, also after
/// relabeling boxes so that player j holds box j.
bool verify_division(const EnvyFreeDivision &division, const PreferenceMatrix &prefs);

} // namespace envydiv
