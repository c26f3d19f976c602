#include <envydiv/permutation.hpp>

#include <algorithm>
#include <numeric>

#include <envydiv/errors.hpp>

namespace envydiv {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int v : images_) {
    if (v < 1 || v > size() || seen[static_cast<size_t>(v - 1)]) {
      throw InvalidConfiguration("permutation images must be a bijection on 1..n");
    }
    seen[static_cast<size_t>(v - 1)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(static_cast<size_t>(n));
  std::iota(img.begin(), img.end(), 1);
  return Permutation(std::move(img));
}

Permutation Permutation::random(int n, std::mt19937_64 &rng) {
  std::vector<int> img(static_cast<size_t>(n));
  std::iota(img.begin(), img.end(), 1);
  // Fisher-Yates with explicit draws so results do not depend on the
  // standard library's shuffle implementation.
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(img[static_cast<size_t>(i)], img[static_cast<size_t>(pick(rng))]);
  }
  return Permutation(std::move(img));
}

Permutation Permutation::transposition(int n, int a, int b) {
  auto p = identity(n);
  std::swap(p.images_.at(static_cast<size_t>(a - 1)), p.images_.at(static_cast<size_t>(b - 1)));
  return p;
}

int Permutation::operator()(int label) const {
  if (label < 1 || label > size()) {
    throw InvalidConfiguration("label outside permutation domain");
  }
  return images_[static_cast<size_t>(label - 1)];
}

Permutation Permutation::compose(const Permutation &other) const {
  if (other.size() != size()) {
    throw InvalidConfiguration("composing permutations of different sizes");
  }
  std::vector<int> img(images_.size());
  for (int i = 1; i <= size(); ++i) {
    img[static_cast<size_t>(i - 1)] = (*this)(other(i));
  }
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<int> img(images_.size());
  for (int i = 1; i <= size(); ++i) {
    img[static_cast<size_t>((*this)(i)-1)] = i;
  }
  return Permutation(std::move(img));
}

bool Permutation::is_identity() const {
  for (int i = 1; i <= size(); ++i) {
    if ((*this)(i) != i) {
      return false;
    }
  }
  return true;
}

std::string Permutation::to_string() const {
  std::string out = "[";
  for (size_t i = 0; i < images_.size(); ++i) {
    out += (i ? "," : "") + std::to_string(images_[i]);
  }
  return out + "]";
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<int> img(static_cast<size_t>(n));
  std::iota(img.begin(), img.end(), 1);
  std::vector<Permutation> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

} // namespace envydiv
