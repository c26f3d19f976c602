#include <envydiv/solver.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <envydiv/complexes.hpp>
#include <envydiv/errors.hpp>
#include <envydiv/reductions.hpp>

namespace envydiv {

StochasticMatrix::StochasticMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  for (const auto &row : rows_) {
    if (row.size() != rows_.size()) {
      throw InvalidConfiguration("score matrix must be square");
    }
  }
}

std::vector<double> StochasticMatrix::averages() const {
  const size_t r = rows_.size();
  std::vector<double> f(r, 0.0);
  for (const auto &row : rows_) {
    for (size_t i = 0; i < r; ++i) {
      f[i] += row[i];
    }
  }
  for (double &v : f) {
    v /= static_cast<double>(r);
  }
  return f;
}

double StochasticMatrix::residual() const {
  double worst = 0.0;
  const double target = 1.0 / static_cast<double>(rows_.size());
  for (double f : averages()) {
    worst = std::max(worst, std::abs(f - target));
  }
  return worst;
}

StochasticMatrix average_matrix(const PreferenceMatrix &prefs, const ConfigPoint &point) {
  std::vector<std::vector<double>> rows;
  for (int j = 1; j <= prefs.players(); ++j) {
    rows.push_back(prefs.box_scores(j, point));
  }
  return StochasticMatrix(std::move(rows));
}

namespace {

using Adjacency = std::vector<std::vector<bool>>;

// Kuhn's augmenting paths on players [from, r) and the free columns.
bool augment(const Adjacency &adj, size_t j, std::vector<int> &owner, std::vector<bool> &seen,
             const std::vector<bool> &taken) {
  for (size_t b = 0; b < adj.size(); ++b) {
    if (!adj[j][b] || taken[b] || seen[b]) {
      continue;
    }
    seen[b] = true;
    if (owner[b] < 0 || augment(adj, static_cast<size_t>(owner[b]), owner, seen, taken)) {
      owner[b] = static_cast<int>(j);
      return true;
    }
  }
  return false;
}

bool completes(const Adjacency &adj, size_t from, const std::vector<bool> &taken) {
  std::vector<int> owner(adj.size(), -1);
  for (size_t j = from; j < adj.size(); ++j) {
    std::vector<bool> seen(adj.size(), false);
    if (!augment(adj, j, owner, seen, taken)) {
      return false;
    }
  }
  return true;
}

std::optional<Permutation> least_matching(const Adjacency &adj) {
  const size_t r = adj.size();
  std::vector<bool> taken(r, false);
  if (!completes(adj, 0, taken)) {
    return std::nullopt;
  }
  std::vector<int> images;
  for (size_t j = 0; j < r; ++j) {
    for (size_t b = 0; b < r; ++b) {
      if (!adj[j][b] || taken[b]) {
        continue;
      }
      taken[b] = true;
      if (completes(adj, j + 1, taken)) {
        images.push_back(static_cast<int>(b + 1));
        break;
      }
      taken[b] = false;
    }
  }
  return Permutation(images);
}

Adjacency support(const std::vector<std::vector<double>> &rows, double threshold, bool inclusive = false) {
  Adjacency adj(rows.size(), std::vector<bool>(rows.size(), false));
  for (size_t j = 0; j < rows.size(); ++j) {
    for (size_t b = 0; b < rows.size(); ++b) {
      adj[j][b] = inclusive ? rows[j][b] >= threshold : rows[j][b] > threshold;
    }
  }
  return adj;
}

} // namespace

double bottleneck_value(const StochasticMatrix &m) {
  std::vector<double> values;
  for (const auto &row : m.rows()) {
    values.insert(values.end(), row.begin(), row.end());
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  size_t lo = 0;
  size_t hi = values.size() - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi + 1) / 2;
    if (least_matching(support(m.rows(), values[mid], true))) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return values[lo];
}

Permutation extract_assignment(const StochasticMatrix &m, double threshold) {
  auto sigma = least_matching(support(m.rows(), threshold));
  if (!sigma) {
    throw NoPerfectMatching("no assignment gives every player a box scored above " + std::to_string(threshold) +
                            "; tighten the residual tolerance");
  }
  return *sigma;
}

std::vector<BirkhoffTerm> birkhoff(const StochasticMatrix &m, double tol) {
  const int r = m.size();
  auto rows = m.rows();
  for (int a = 0; a < r; ++a) {
    double row = 0.0;
    double col = 0.0;
    for (int b = 0; b < r; ++b) {
      const double x = rows[static_cast<size_t>(a)][static_cast<size_t>(b)];
      if (x < -tol) {
        throw NotDoublyStochastic("negative entry");
      }
      row += x;
      col += rows[static_cast<size_t>(b)][static_cast<size_t>(a)];
    }
    if (std::abs(row - 1.0) > tol || std::abs(col - 1.0) > tol) {
      throw NotDoublyStochastic("row or column " + std::to_string(a + 1) + " does not sum to 1");
    }
  }
  // Entries below this are rounding debris from earlier subtractions.
  const double floor = 1e-13;
  std::vector<BirkhoffTerm> terms;
  double remaining = 1.0;
  while (remaining > floor * r) {
    const auto sigma = least_matching(support(rows, floor));
    if (!sigma) {
      throw NotDoublyStochastic("support lost its perfect matching with mass " + std::to_string(remaining) + " left");
    }
    double w = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= r; ++j) {
      w = std::min(w, rows[static_cast<size_t>(j - 1)][static_cast<size_t>((*sigma)(j)-1)]);
    }
    for (int j = 1; j <= r; ++j) {
      auto &x = rows[static_cast<size_t>(j - 1)][static_cast<size_t>((*sigma)(j)-1)];
      x = std::max(0.0, x - w);
    }
    remaining -= w;
    terms.push_back({w, *sigma});
    if (terms.size() > static_cast<size_t>(r * r)) {
      throw NotDoublyStochastic("peeling did not terminate");
    }
  }
  // Rounding leaves the weights a hair off 1 in total.
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0,
                                       [](double acc, const BirkhoffTerm &t) { return acc + t.weight; });
  for (auto &t : terms) {
    t.weight /= total;
  }
  return terms;
}

std::string to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::ok:
    return "ok";
  case SolveStatus::budget_exhausted:
    return "budget_exhausted";
  case SolveStatus::no_matching:
    return "no_matching";
  }
  return "?";
}

namespace {

bool is_prime(int n) {
  if (n < 2) {
    return false;
  }
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      return false;
    }
  }
  return true;
}

bool is_prime_power(int n) {
  for (int p = 2; p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) {
        n /= p;
      }
      return n == 1 && is_prime(p);
    }
  }
  return false;
}

// One facet per orbit of row relabelings: rows renamed in order of first
// appearance along the columns (each column holds at most one cell).
std::vector<Simplex> orbit_representatives(const SimplicialComplex &complex) {
  std::set<Simplex> reps;
  for (const auto &facet : complex.maximal_simplices()) {
    std::map<int, int> rename;
    Simplex s;
    for (const auto &c : facet) {
      auto [it, fresh] = rename.try_emplace(c.row, static_cast<int>(rename.size()) + 1);
      s.push_back({it->second, c.col});
    }
    std::sort(s.begin(), s.end());
    reps.insert(std::move(s));
  }
  return {reps.begin(), reps.end()};
}

class Objective {
public:
  Objective(const Space &space, const PreferenceMatrix &prefs, const Simplex &facet)
      : space_(space), prefs_(prefs), facet_(facet) {}

  ConfigPoint point(const std::vector<double> &lambda) const {
    std::vector<Cell> cells;
    std::vector<double> w;
    double total = 0.0;
    for (size_t k = 0; k < lambda.size(); ++k) {
      if (lambda[k] > 1e-15) {
        cells.push_back(facet_[k]);
        w.push_back(lambda[k]);
        total += lambda[k];
      }
    }
    for (double &v : w) {
      v /= total;
    }
    return point_from_barycentric(space_, cells, w);
  }

  StochasticMatrix matrix(const std::vector<double> &lambda) {
    ++evaluations;
    return average_matrix(prefs_, point(lambda));
  }

  double operator()(const std::vector<double> &lambda) { return matrix(lambda).residual(); }

  long evaluations = 0;

private:
  const Space &space_;
  const PreferenceMatrix &prefs_;
  const Simplex &facet_;
};

void project(std::vector<double> &lambda) {
  double total = 0.0;
  for (double &v : lambda) {
    v = std::max(0.0, v);
    total += v;
  }
  for (double &v : lambda) {
    v /= total;
  }
}

// Solves a small dense system in place; false when singular.
bool gauss(std::vector<std::vector<double>> a, std::vector<double> &b) {
  const size_t n = b.size();
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    for (size_t i = c + 1; i < n; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[p][c])) {
        p = i;
      }
    }
    if (std::abs(a[p][c]) < 1e-14) {
      return false;
    }
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (size_t i = 0; i < n; ++i) {
      if (i == c) {
        continue;
      }
      const double f = a[i][c] / a[c][c];
      for (size_t k = c; k < n; ++k) {
        a[i][k] -= f * a[c][k];
      }
      b[i] -= f * b[c];
    }
  }
  for (size_t i = 0; i < n; ++i) {
    b[i] /= a[i][i];
  }
  return true;
}

struct Start {
  double residual;
  size_t facet;
  std::vector<double> lambda;
};

struct Outcome {
  std::vector<double> lambda;
  double residual = std::numeric_limits<double>::infinity();
  double bottleneck = 0.0;
  long evaluations = 0;
  std::vector<double> trace;
};

// Local moves minimize the smooth sum of squared deviations; the best point
// in the max-norm residual seen along the way is what gets reported.
class Tracker {
public:
  explicit Tracker(Objective &f) : f_(f) {}

  double operator()(const std::vector<double> &lambda) {
    const auto avg = f_.matrix(lambda).averages();
    const double target = 1.0 / static_cast<double>(avg.size());
    double worst = 0.0;
    double squares = 0.0;
    for (double v : avg) {
      worst = std::max(worst, std::abs(v - target));
      squares += (v - target) * (v - target);
    }
    if (worst < best_residual) {
      best_residual = worst;
      best_lambda = lambda;
    }
    return squares;
  }

  std::vector<double> deviations(const std::vector<double> &lambda) const {
    auto avg = f_.matrix(lambda).averages();
    for (double &v : avg) {
      v -= 1.0 / static_cast<double>(avg.size());
    }
    return avg;
  }

  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> best_lambda;

private:
  Objective &f_;
};

// Newton steps on F_i = 1/r for all boxes but one, moving mass against the
// largest coordinate so the step stays inside the facet.
void polish(Tracker &f, std::vector<double> &lambda, double &value, double target) {
  const size_t d = lambda.size();
  if (d < 2) {
    return;
  }
  for (int iter = 0; iter < 25 && f.best_residual > target; ++iter) {
    const size_t pivot = static_cast<size_t>(std::max_element(lambda.begin(), lambda.end()) - lambda.begin());
    std::vector<size_t> free;
    for (size_t k = 0; k < d; ++k) {
      if (k != pivot) {
        free.push_back(k);
      }
    }
    const auto g0 = f.deviations(lambda);
    std::vector<double> g;
    for (size_t i = 0; i + 1 < d; ++i) {
      g.push_back(g0[i]);
    }
    const double h = std::min(1e-7, lambda[pivot] / 4);
    std::vector<std::vector<double>> jac(d - 1, std::vector<double>(d - 1));
    for (size_t c = 0; c < free.size(); ++c) {
      auto l = lambda;
      l[free[c]] += h;
      l[pivot] -= h;
      const auto gk = f.deviations(l);
      for (size_t i = 0; i + 1 < d; ++i) {
        jac[i][c] = (gk[i] - g[i]) / h;
      }
    }
    auto delta = g;
    for (double &v : delta) {
      v = -v;
    }
    if (!gauss(jac, delta)) {
      return;
    }
    bool improved = false;
    for (double t = 1.0; t > 1e-3; t /= 2) {
      auto l = lambda;
      for (size_t c = 0; c < free.size(); ++c) {
        l[free[c]] += t * delta[c];
        l[pivot] -= t * delta[c];
      }
      project(l);
      const double v = f(l);
      if (v < value) {
        value = v;
        lambda = std::move(l);
        improved = true;
        break;
      }
    }
    if (!improved) {
      return;
    }
  }
}

// Kuhn triangulation of the simplex {k >= 0, sum k = n} in d barycentric
// coordinates: walk from a base point along the unit steps of a permutation, in
// cumulative coordinates y_i = k_1 + ... + k_i. Each cell lists d lattice points.
std::vector<std::vector<std::vector<int>>> kuhn_cells(size_t d, int n) {
  const size_t m = d - 1;
  std::vector<std::vector<std::vector<int>>> cells;
  if (m == 0) {
    cells.push_back({{n}});
    return cells;
  }
  auto to_barycentric = [&](const std::vector<int> &y) {
    std::vector<int> k(d);
    int prev = 0;
    for (size_t i = 0; i < m; ++i) {
      k[i] = y[i] - prev;
      prev = y[i];
    }
    k[m] = n - prev;
    return k;
  };
  auto inside = [&](const std::vector<int> &y) {
    for (size_t i = 0; i < m; ++i) {
      if (y[i] < (i == 0 ? 0 : y[i - 1]) || y[i] > n) {
        return false;
      }
    }
    return true;
  };
  std::vector<size_t> order(m);
  std::vector<int> base(m, 0);
  // Base points with 0 <= y_1 <= ... <= y_m <= n - 1.
  std::function<void(size_t, int)> bases = [&](size_t i, int lo) {
    if (i == m) {
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<std::vector<int>> cell{to_barycentric(base)};
        auto y = base;
        bool ok = true;
        for (size_t t = 0; t < m && ok; ++t) {
          ++y[order[t]];
          ok = inside(y);
          cell.push_back(to_barycentric(y));
        }
        if (ok) {
          cells.push_back(std::move(cell));
        }
      } while (std::next_permutation(order.begin(), order.end()));
      return;
    }
    for (int v = lo; v <= n - 1; ++v) {
      base[i] = v;
      bases(i + 1, v);
    }
  };
  bases(0, 0);
  return cells;
}

// A cell of some facet in the recursion: its vertices in the facet's
// barycentric coordinates, with the test map deviations at each.
struct Piece {
  size_t facet;
  std::vector<std::vector<double>> vertices;
  std::vector<std::vector<double>> values;
  double score = -std::numeric_limits<double>::infinity(); ///< min weight of the linear zero
  std::vector<double> weights;                              ///< that zero, in vertex weights
};

// Zero of the affine interpolant over the cell: sum_t w_t G(v_t) = 0 with
// sum_t w_t = 1, using r - 1 of the r (dependent) deviation components.
void locate(Piece &c) {
  const size_t d = c.vertices.size();
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 1.0));
  for (size_t i = 0; i + 1 < d; ++i) {
    for (size_t t = 0; t < d; ++t) {
      a[i][t] = c.values[t][i];
    }
  }
  std::vector<double> w(d, 0.0);
  w.back() = 1.0;
  if (!gauss(a, w)) {
    c.score = -std::numeric_limits<double>::infinity();
    c.weights.assign(d, 1.0 / static_cast<double>(d));
    return;
  }
  c.score = *std::min_element(w.begin(), w.end());
  c.weights = std::move(w);
}

std::vector<double> combine(const std::vector<std::vector<double>> &vertices, const std::vector<double> &weights) {
  std::vector<double> l(vertices.front().size(), 0.0);
  for (size_t t = 0; t < vertices.size(); ++t) {
    for (size_t k = 0; k < l.size(); ++k) {
      l[k] += std::max(0.0, weights[t]) * vertices[t][k];
    }
  }
  project(l);
  return l;
}

void compositions(int total, size_t parts, std::vector<int> &current, const std::function<void()> &visit) {
  if (current.size() + 1 == parts) {
    current.push_back(total);
    visit();
    current.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    current.push_back(k);
    compositions(total - k, parts, current, visit);
    current.pop_back();
  }
}

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) {
    v = v * (n - k + i) / i;
  }
  return v;
}

template <typename Task> void run_parallel(size_t count, unsigned threads, Task task) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<size_t>(workers, std::max<size_t>(count, 1)));
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next = count;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (auto &t : pool) {
      t.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace

bool meets_hypothesis(const Space &space) {
  if (space.kind == SpaceKind::c1) {
    return is_prime(space.r) || space.r == 4;
  }
  return is_prime_power(space.r);
}

SearchResult search(const Space &space, const PreferenceMatrix &prefs, const SearchOptions &options) {
  if (prefs.kind() != PreferenceKind::new_style || !prefs.space() || !(*prefs.space() == space)) {
    throw DomainMismatch("search needs new-style preferences on " + space.name());
  }
  if (options.max_depth < 1 || options.multistarts < 1 || !(options.tolerance > 0.0)) {
    throw InvalidConfiguration("search needs max_depth >= 1, multistarts >= 1 and a positive tolerance");
  }
  const auto facets = orbit_representatives(SimplicialComplex::build(space.complex_variant()));
  const size_t d = facets.front().size();
  const double target = options.tolerance * 1e-3;

  // Coarse triangulation, kept to a few hundred thousand cells in total.
  int n0 = 4 * space.r;
  while (n0 > 2 && static_cast<double>(facets.size()) * std::pow(n0, static_cast<double>(d - 1)) > 2e5) {
    --n0;
  }
  const auto coarse_cells = kuhn_cells(d, n0);

  struct Best {
    double residual = std::numeric_limits<double>::infinity();
    size_t facet = 0;
    std::vector<double> lambda;
    double bottleneck = -1.0;
    std::vector<double> trace;
  };
  Best best;
  std::atomic<long> evaluations{0};
  std::vector<std::pair<size_t, std::vector<double>>> zeros_seen;
  auto offer = [&](size_t facet, const std::vector<double> &lambda, double residual) {
    if (residual < best.residual) {
      best.residual = residual;
      best.facet = facet;
      best.lambda = lambda;
    }
    if (residual <= options.tolerance) {
      zeros_seen.emplace_back(facet, lambda);
    }
  };

  // Level 0: every coarse cell of every facet.
  std::vector<std::vector<Piece>> per_facet(facets.size());
  run_parallel(facets.size(), options.threads, [&](size_t fi) {
    Objective f(space, prefs, facets[fi]);
    std::map<std::vector<int>, std::vector<double>> cache;
    auto value = [&](const std::vector<int> &k) -> const std::vector<double> & {
      auto it = cache.find(k);
      if (it == cache.end()) {
        std::vector<double> l;
        for (int v : k) {
          l.push_back(static_cast<double>(v) / n0);
        }
        auto avg = f.matrix(l).averages();
        for (double &x : avg) {
          x -= 1.0 / static_cast<double>(avg.size());
        }
        it = cache.emplace(k, std::move(avg)).first;
      }
      return it->second;
    };
    for (const auto &cell : coarse_cells) {
      Piece c;
      c.facet = fi;
      for (const auto &k : cell) {
        std::vector<double> l;
        for (int v : k) {
          l.push_back(static_cast<double>(v) / n0);
        }
        c.vertices.push_back(std::move(l));
        c.values.push_back(value(k));
      }
      locate(c);
      per_facet[fi].push_back(std::move(c));
    }
    evaluations += f.evaluations;
  });
  std::vector<Piece> beam;
  for (auto &cells : per_facet) {
    for (auto &c : cells) {
      beam.push_back(std::move(c));
    }
  }

  const size_t width = static_cast<size_t>(options.multistarts);
  const auto children = kuhn_cells(d, 2);
  std::vector<double> trace;
  for (int level = 0; level < options.max_depth; ++level) {
    std::stable_sort(beam.begin(), beam.end(), [](const Piece &a, const Piece &b) { return a.score > b.score; });
    if (beam.size() > width) {
      beam.resize(width);
    }
    // Newton from the linear zero of each kept cell.
    std::vector<std::pair<std::vector<double>, double>> polished(beam.size());
    run_parallel(beam.size(), options.threads, [&](size_t i) {
      Objective f(space, prefs, facets[beam[i].facet]);
      Tracker t(f);
      auto lambda = combine(beam[i].vertices, beam[i].weights);
      double v = t(lambda);
      polish(t, lambda, v, target);
      polished[i] = {t.best_lambda, t.best_residual};
      evaluations += f.evaluations;
    });
    // Reduced in beam order, so thread timing never changes the outcome.
    for (size_t i = 0; i < beam.size(); ++i) {
      offer(beam[i].facet, polished[i].first, polished[i].second);
    }
    trace.push_back(best.residual);
    if (best.residual <= target || level + 1 == options.max_depth) {
      break;
    }
    // Halve every kept cell.
    std::vector<std::vector<Piece>> next(beam.size());
    run_parallel(beam.size(), options.threads, [&](size_t i) {
      const auto &parent = beam[i];
      Objective f(space, prefs, facets[parent.facet]);
      std::map<std::vector<int>, std::pair<std::vector<double>, std::vector<double>>> cache;
      for (const auto &cell : children) {
        Piece c;
        c.facet = parent.facet;
        for (const auto &k : cell) {
          auto it = cache.find(k);
          if (it == cache.end()) {
            std::vector<double> w;
            for (int v : k) {
              w.push_back(v / 2.0);
            }
            std::vector<double> l(d, 0.0);
            for (size_t t = 0; t < d; ++t) {
              for (size_t q = 0; q < d; ++q) {
                l[q] += w[t] * parent.vertices[t][q];
              }
            }
            auto avg = f.matrix(l).averages();
            for (double &x : avg) {
              x -= 1.0 / static_cast<double>(avg.size());
            }
            it = cache.emplace(k, std::make_pair(std::move(l), std::move(avg))).first;
          }
          c.vertices.push_back(it->second.first);
          c.values.push_back(it->second.second);
        }
        locate(c);
        next[i].push_back(std::move(c));
      }
      evaluations += f.evaluations;
    });
    beam.clear();
    for (auto &cells : next) {
      for (auto &c : cells) {
        beam.push_back(std::move(c));
      }
    }
  }

  // Among zeros, the one whose worst-off player does best; earlier wins ties.
  for (const auto &[facet, lambda] : zeros_seen) {
    Objective f(space, prefs, facets[facet]);
    const double b = bottleneck_value(f.matrix(lambda));
    if (b > best.bottleneck) {
      best.bottleneck = b;
      best.facet = facet;
      best.lambda = lambda;
      best.residual = f.matrix(lambda).residual();
    }
  }
  Objective f(space, prefs, facets[best.facet]);
  return SearchResult{f.point(best.lambda), best.residual, best.residual <= options.tolerance, evaluations.load(),
                      trace};
}

namespace {

// Pattern search for the largest bottleneck score, over every orbit facet
// from its best coarse-lattice points. Envy-freeness needs only the assigned
// entries to be positive, so any point with a positive bottleneck is a
// division; this moves toward the one whose worst-off player does best.
std::optional<std::pair<ConfigPoint, double>> best_bottleneck(const Space &space, const PreferenceMatrix &prefs,
                                                              const SearchOptions &options) {
  const auto facets = orbit_representatives(SimplicialComplex::build(space.complex_variant()));
  const size_t d = facets.front().size();
  int n0 = 64;
  while (n0 > 2 && static_cast<double>(facets.size()) * binomial(n0 + static_cast<int>(d) - 1, static_cast<int>(d) - 1) > 2e5) {
    --n0;
  }
  std::vector<std::vector<double>> lattice;
  std::vector<int> current;
  compositions(n0, d, current, [&] {
    std::vector<double> l;
    for (int k : current) {
      l.push_back(static_cast<double>(k) / n0);
    }
    lattice.push_back(std::move(l));
  });
  std::vector<Start> coarse(facets.size() * lattice.size());
  run_parallel(facets.size(), options.threads, [&](size_t fi) {
    Objective f(space, prefs, facets[fi]);
    for (size_t li = 0; li < lattice.size(); ++li) {
      coarse[fi * lattice.size() + li] = {-bottleneck_value(f.matrix(lattice[li])), fi, lattice[li]};
    }
  });
  std::stable_sort(coarse.begin(), coarse.end(), [](const Start &a, const Start &b) { return a.residual < b.residual; });
  coarse.resize(std::min(coarse.size(), static_cast<size_t>(options.multistarts)));

  std::vector<Outcome> outcomes(coarse.size());
  run_parallel(coarse.size(), options.threads, [&](size_t i) {
    Objective f(space, prefs, facets[coarse[i].facet]);
    auto lambda = coarse[i].lambda;
    double best = coarse[i].residual;
    double h = 1.0 / n0;
    for (int level = 0; level < options.max_depth; ++level, h /= 2) {
      for (int sweep = 0; sweep < 200; ++sweep) {
        bool improved = false;
        for (size_t a = 0; a < d; ++a) {
          for (size_t b = 0; b < d; ++b) {
            if (a == b || lambda[b] <= 0.0) {
              continue;
            }
            auto l = lambda;
            const double move = std::min(h, lambda[b]);
            l[a] += move;
            l[b] -= move;
            const double v = -bottleneck_value(f.matrix(l));
            if (v < best - 1e-12) {
              best = v;
              lambda = std::move(l);
              improved = true;
            }
          }
        }
        if (!improved) {
          break;
        }
      }
    }
    outcomes[i] = {lambda, best, 0.0, f.evaluations, {}};
  });
  size_t win = 0;
  for (size_t i = 1; i < outcomes.size(); ++i) {
    if (outcomes[i].residual < outcomes[win].residual) {
      win = i;
    }
  }
  if (outcomes.empty() || -outcomes[win].residual <= kPreferenceThreshold) {
    return std::nullopt;
  }
  Objective f(space, prefs, facets[coarse[win].facet]);
  return std::make_pair(f.point(outcomes[win].lambda), -outcomes[win].residual);
}

} // namespace

SolveResult solve(const Space &space, const PreferenceMatrix &prefs, const SearchOptions &options) {
  SolveResult result;
  result.hypothesis_met = meets_hypothesis(space);
  result.search = search(space, prefs, options);
  if (!result.hypothesis_met) {
    result.note = "r = " + std::to_string(space.r) + " is outside the existence hypothesis for " + space.name() +
                  "; a failed search proves nothing either way";
  }
  if (!result.search.converged) {
    result.status = SolveStatus::budget_exhausted;
    result.note += (result.note.empty() ? "" : "; ") + std::string("best residual ") +
                   std::to_string(result.search.residual) + " above tolerance: either no zero exists or the budget " +
                   "was too small, the search cannot tell which";
    return result;
  }
  const auto m = average_matrix(prefs, result.search.point);
  EnvyFreeDivision division{result.search.point, m, Permutation::identity(space.r), m.residual(), {}};
  try {
    division.assignment = extract_assignment(m);
  } catch (const NoPerfectMatching &e) {
    result.status = SolveStatus::no_matching;
    result.note += e.what();
    result.division = division;
    return result;
  }
  if (options.raise_bottleneck) {
    const double at_zero = bottleneck_value(m);
    division.assignment = *least_matching(support(m.rows(), at_zero, true));
    if (auto better = best_bottleneck(space, prefs, options); better && better->second > at_zero + 1e-12) {
      const auto mb = average_matrix(prefs, better->first);
      division.point = better->first;
      division.matrix = mb;
      division.residual = mb.residual();
      division.assignment = *least_matching(support(mb.rows(), bottleneck_value(mb), true));
    }
  }
  for (int j = 1; j <= space.r; ++j) {
    division.certificate.push_back(division.matrix(j, division.assignment(j)) > kPreferenceThreshold);
  }
  result.division = std::move(division);
  result.status = SolveStatus::ok;
  return result;
}

EnvyFreeDivision to_tile_division(const EnvyFreeDivision &division, const PreferenceMatrix &source) {
  const auto *point = std::get_if<ConfigPoint>(&division.point);
  if (!point || point->space().kind == SpaceKind::c3) {
    throw DomainMismatch("only C1 and C2 divisions read back as tile divisions");
  }
  const int r = point->space().r;
  const bool c2 = point->space().kind == SpaceKind::c2;
  const Cut cut = c2 ? eliminate_superfluous(point->cut(), r) : point->cut();
  const auto cls = degenerate_and_essential(cut);
  const auto boxes = point->box_contents();
  // For C2: essential tiles of the point, in order, match those of the reduced cut.
  std::map<int, int> reduced_label;
  if (c2) {
    const auto ex = degenerate_and_essential(point->cut()).essential;
    for (size_t k = 0; k < ex.size(); ++k) {
      reduced_label[ex[k].label] = cls.essential[k].label;
    }
  }
  std::vector<std::vector<double>> rows;
  Adjacency adj(static_cast<size_t>(r), std::vector<bool>(static_cast<size_t>(r), false));
  for (int j = 1; j <= r; ++j) {
    rows.push_back(source.tile_scores(j, cut));
    const auto &content = boxes[static_cast<size_t>(division.assignment(j) - 1)];
    std::vector<int> allowed;
    for (int t : content) {
      allowed.push_back(c2 ? reduced_label.at(t) : t);
    }
    if (content.empty() || (!c2 && content.size() == 1 && content[0] == r)) {
      allowed.insert(allowed.end(), cls.degenerate.begin(), cls.degenerate.end());
    }
    for (int t : allowed) {
      adj[static_cast<size_t>(j - 1)][static_cast<size_t>(t - 1)] =
          rows.back()[static_cast<size_t>(t - 1)] > kPreferenceThreshold;
    }
  }
  const auto sigma = least_matching(adj);
  if (!sigma) {
    throw NoPerfectMatching("the division does not give every player a distinct preferred tile");
  }
  StochasticMatrix m(std::move(rows));
  EnvyFreeDivision out{cut, m, *sigma, division.residual, {}};
  for (int j = 1; j <= r; ++j) {
    out.certificate.push_back(m(j, (*sigma)(j)) > kPreferenceThreshold);
  }
  return out;
}

namespace {

// Calls visit(points) for every non-decreasing sequence of `count` grid values.
void grid_cuts(int grid, int count, const std::function<void(const std::vector<double> &)> &visit) {
  std::vector<int> idx(static_cast<size_t>(count), 0);
  std::vector<double> pts(static_cast<size_t>(count));
  while (true) {
    for (int k = 0; k < count; ++k) {
      pts[static_cast<size_t>(k)] = static_cast<double>(idx[static_cast<size_t>(k)]) / (grid - 1);
    }
    visit(pts);
    int k = count - 1;
    while (k >= 0 && idx[static_cast<size_t>(k)] == grid - 1) {
      --k;
    }
    if (k < 0) {
      return;
    }
    ++idx[static_cast<size_t>(k)];
    for (int i = k + 1; i < count; ++i) {
      idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(k)];
    }
  }
}

bool admissible(SpaceKind kind, int r, const std::vector<int> &tiles, const std::vector<int> &boxes) {
  if (kind == SpaceKind::c3) {
    return true;
  }
  std::vector<std::vector<int>> content(static_cast<size_t>(r));
  for (size_t k = 0; k < tiles.size(); ++k) {
    content[static_cast<size_t>(boxes[k] - 1)].push_back(tiles[k]);
  }
  for (const auto &c : content) {
    if (c.size() > 2 || (c.size() == 2 && (kind == SpaceKind::c2 || (c[0] != r && c[1] != r)))) {
      return false;
    }
  }
  return true;
}

} // namespace

BruteForceResult brute_force(const Space &space, const PreferenceMatrix &prefs, int grid, long max_evaluations) {
  const int r = prefs.players();
  if (r > 4 || grid < 2 || grid > 64) {
    throw InvalidConfiguration("brute force is limited to r <= 4 and grid <= 64");
  }
  const bool old_style = prefs.kind() == PreferenceKind::old_style;
  if (old_style && prefs.tile_count() != r) {
    throw InvalidConfiguration("old-style brute force needs as many tiles as players");
  }
  if (!old_style && (!prefs.space() || !(*prefs.space() == space))) {
    throw DomainMismatch("preferences are not defined on " + space.name());
  }
  const int tiles = old_style ? r : space.tile_count();
  BruteForceResult result;
  result.grid = grid;
  result.max_min = -1.0;
  long evaluations = 0;

  auto consider = [&](const DomainPoint &p) {
    evaluations += r;
    if (evaluations > max_evaluations) {
      throw ResourceExhausted("brute force exceeded " + std::to_string(max_evaluations) + " oracle calls");
    }
    ++result.points;
    std::vector<std::vector<double>> rows;
    for (int j = 1; j <= r; ++j) {
      rows.push_back(scores(prefs, j, p));
    }
    StochasticMatrix m(std::move(rows));
    const double v = bottleneck_value(m);
    if (v > result.max_min) {
      result.max_min = v;
      const auto sigma = *least_matching(support(m.rows(), v, true));
      std::vector<bool> cert;
      for (int j = 1; j <= r; ++j) {
        cert.push_back(m(j, sigma(j)) > kPreferenceThreshold);
      }
      result.best = EnvyFreeDivision{p, m, sigma, old_style ? 0.0 : m.residual(), cert};
    }
  };

  grid_cuts(grid, tiles - 1, [&](const std::vector<double> &pts) {
    const Cut cut(pts);
    if (old_style) {
      consider(cut);
      return;
    }
    const auto deg = degenerate_and_essential(cut).degenerate;
    if (space.kind == SpaceKind::c2 && static_cast<int>(deg.size()) < r - 1) {
      return;
    }
    std::vector<int> live;
    for (int t = 1; t <= tiles; ++t) {
      if (!cut.is_degenerate(t)) {
        live.push_back(t);
      }
    }
    std::vector<int> boxes(live.size(), 1);
    while (true) {
      if (admissible(space.kind, r, live, boxes)) {
        Allocation alloc;
        for (size_t k = 0; k < live.size(); ++k) {
          alloc[live[k]] = boxes[k];
        }
        consider(ConfigPoint::make(space, cut, alloc));
      }
      size_t k = 0;
      while (k < boxes.size() && boxes[k] == r) {
        boxes[k++] = 1;
      }
      if (k == boxes.size()) {
        break;
      }
      ++boxes[k];
    }
  });
  result.feasible = result.max_min > kPreferenceThreshold;
  return result;
}

bool verify_division(const EnvyFreeDivision &division, const PreferenceMatrix &prefs) {
  const int r = prefs.players();
  if (division.assignment.size() != r) {
    return false;
  }
  try {
    for (int j = 1; j <= r; ++j) {
      const auto s = scores(prefs, j, division.point);
      if (!(s[static_cast<size_t>(division.assignment(j) - 1)] > kPreferenceThreshold)) {
        return false;
      }
    }
    if (const auto *p = std::get_if<ConfigPoint>(&division.point)) {
      const auto relabeled = act(division.assignment.inverse(), *p);
      for (int j = 1; j <= r; ++j) {
        if (!(prefs.box_scores(j, relabeled)[static_cast<size_t>(j - 1)] > kPreferenceThreshold)) {
          return false;
        }
      }
    }
  } catch (const DomainMismatch &) {
    return false;
  } catch (const InvalidConfiguration &) {
    return false;
  }
  return true;
}

} // namespace envydiv
