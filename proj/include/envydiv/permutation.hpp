#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace envydiv {

/// Permutation of the labels {1, ..., n}. Labels are 1-based at the API.
class Permutation {
public:
  Permutation() = default;
  /// Takes 1-based images; throws InvalidConfiguration unless a bijection.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);
  static Permutation random(int n, std::mt19937_64 &rng);
  /// Transposition (a b) on n labels.
  static Permutation transposition(int n, int a, int b);

  [[nodiscard]] int size() const { return static_cast<int>(images_.size()); }
  [[nodiscard]] int operator()(int label) const;
  [[nodiscard]] std::span<const int> images() const { return images_; }

  /// (this ∘ other)(i) = this(other(i)).
  [[nodiscard]] Permutation compose(const Permutation &other) const;
  [[nodiscard]] Permutation inverse() const;
  [[nodiscard]] bool is_identity() const;

  friend bool operator==(const Permutation &, const Permutation &) = default;
  friend auto operator<=>(const Permutation &, const Permutation &) = default;

  [[nodiscard]] std::string to_string() const;

private:
  std::vector<int> images_;
};

/// All permutations of n labels in lexicographic order.
std::vector<Permutation> all_permutations(int n);

} // namespace envydiv
