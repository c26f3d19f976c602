#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <envydiv/configspace.hpp>
#include <envydiv/errors.hpp>

using namespace envydiv;

namespace {

void check_close(std::span<const double> got, std::vector<double> want, double tol = 1e-15) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol));
  }
}

} // namespace

TEST_CASE("cut_to_z") {
  check_close(cut_to_z(Cut({1.0 / 4, 1.0 / 3, 2.0 / 3, 3.0 / 4})).lengths,
              {1.0 / 4, 1.0 / 12, 1.0 / 3, 1.0 / 12, 1.0 / 4}, 1e-14);
  check_close(cut_to_z(Cut({0, 0})).lengths, {0, 0, 1});
  check_close(cut_to_z(Cut({1.0 / 3, 2.0 / 3})).lengths, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-14);
}

TEST_CASE("z_to_cut") {
  check_close(z_to_cut(ZPoint{{1, 0, 0}}).points(), {1, 1});
  check_close(z_to_cut(ZPoint{{1.0 / 4, 1.0 / 12, 1.0 / 3, 1.0 / 12, 1.0 / 4}}).points(),
              {1.0 / 4, 1.0 / 3, 2.0 / 3, 3.0 / 4}, 1e-14);
  check_close(z_to_cut(ZPoint{{0, 1, 0}}).points(), {0, 1});
  CHECK_THROWS_AS(z_to_cut(ZPoint{{-0.1, 1.1}}), InvalidConfiguration);
  CHECK_THROWS_AS(z_to_cut(ZPoint{{0.5, 0.4}}), InvalidConfiguration);
}

TEST_CASE("cuts must be ordered inside the unit interval") {
  CHECK_THROWS_AS(Cut({0.5, 0.25}), InvalidConfiguration);
  CHECK_THROWS_AS(Cut({-0.1}), InvalidConfiguration);
  CHECK_THROWS_AS(Cut({1.5}), InvalidConfiguration);
}

TEST_CASE("degenerate and essential tiles") {
  const auto six = degenerate_and_essential(Cut({1.0 / 4, 1.0 / 3, 1.0 / 3, 2.0 / 3, 2.0 / 3}));
  CHECK(six.degenerate == std::vector<int>{3, 5});
  CHECK(six.essential.size() == 4);

  CHECK(degenerate_and_essential(Cut({1.0 / 3, 2.0 / 3})).degenerate.empty());

  const auto zeros = degenerate_and_essential(Cut({0, 0}));
  CHECK(zeros.degenerate == std::vector<int>{1, 2});
  REQUIRE(zeros.essential.size() == 1);
  CHECK(zeros.essential[0].label == 3);
  CHECK(zeros.essential[0].interval.left == 0.0);
  CHECK(zeros.essential[0].interval.right == 1.0);
}

TEST_CASE("partition equivalence") {
  CHECK(partition_equivalent(Cut({0.25, 1.0 / 3, 2.0 / 3, 2.0 / 3}), Cut({0.25, 1.0 / 3, 2.0 / 3, 1})));
  CHECK(partition_equivalent(Cut({1.0 / 3, 2.0 / 3}), Cut({1.0 / 3, 2.0 / 3})));
  CHECK_FALSE(partition_equivalent(Cut({1.0 / 3, 2.0 / 3}), Cut({0.25, 2.0 / 3})));
  // Different tile counts, same pieces.
  CHECK(partition_equivalent(Cut({0.5}), Cut({0, 0.5, 0.5, 1})));
}

TEST_CASE("partition equivalence is an equivalence relation on a sampled set") {
  std::vector<Cut> cuts{Cut({0.5, 0.5}), Cut({0, 0.5}), Cut({0.5, 1}),      Cut({0.25, 0.5}),
                        Cut({0.25, 0.25}), Cut({0, 0.25}), Cut({0.25, 0.75}), Cut({0, 1})};
  for (const auto &a : cuts) {
    CHECK(partition_equivalent(a, a));
    for (const auto &b : cuts) {
      CHECK(partition_equivalent(a, b) == partition_equivalent(b, a));
      for (const auto &c : cuts) {
        if (partition_equivalent(a, b) && partition_equivalent(b, c)) {
          CHECK(partition_equivalent(a, c));
        }
      }
    }
  }
}

TEST_CASE("canonicalize strips degenerate tiles") {
  const auto space = Space::make(SpaceKind::c3, 6);
  const Cut cut({1.0 / 4, 1.0 / 3, 1.0 / 3, 2.0 / 3, 2.0 / 3});
  // Three equivalent allocations differing only in where tiles 3 and 5 go.
  const Allocation a1{{1, 1}, {2, 1}, {3, 1}, {4, 4}, {5, 5}, {6, 6}};
  const Allocation a2{{1, 1}, {2, 1}, {3, 5}, {4, 4}, {5, 5}, {6, 6}};
  const Allocation a3{{1, 1}, {2, 1}, {3, 2}, {4, 4}, {5, 5}, {6, 6}};
  const auto p1 = canonicalize(cut, a1, space);
  CHECK(p1.allocation() == Allocation{{1, 1}, {2, 1}, {4, 4}, {6, 6}});
  CHECK(canonicalize(cut, a2, space) == p1);
  CHECK(canonicalize(cut, a3, space) == p1);
  CHECK(canonicalize(p1.cut(), p1.allocation(), space) == p1);

  const Allocation full{{1, 2}, {2, 3}, {3, 1}};
  CHECK(canonicalize(Cut({0.2, 0.7}), full, Space::make(SpaceKind::c1, 3)).allocation() == full);

  const Allocation all_one{{1, 1}, {2, 1}, {3, 1}};
  CHECK(canonicalize(Cut({0, 0}), all_one, Space::make(SpaceKind::c3, 3)).allocation() == Allocation{{3, 1}});
}

TEST_CASE("canonicalize enforces the space's allocation rule") {
  const Allocation two_non_last{{1, 1}, {2, 1}, {3, 2}};
  CHECK_THROWS_AS(canonicalize(Cut({0.2, 0.7}), two_non_last, Space::make(SpaceKind::c1, 3)),
                  VariantConstraintViolation);
  const Allocation with_last{{1, 1}, {2, 2}, {3, 1}};
  CHECK_NOTHROW(canonicalize(Cut({0.2, 0.7}), with_last, Space::make(SpaceKind::c1, 3)));
  // Tile 2 is degenerate, so sharing box 1 with tile 1 is fine after stripping.
  CHECK_NOTHROW(canonicalize(Cut({0.2, 0.2}), two_non_last, Space::make(SpaceKind::c1, 3)));

  const Allocation c2_shared{{1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 3}};
  CHECK_THROWS_AS(canonicalize(Cut({0.2, 0.4, 0.6, 0.8}), c2_shared, Space::make(SpaceKind::c2, 3)),
                  VariantConstraintViolation);
}

TEST_CASE("group action") {
  const auto space = Space::make(SpaceKind::c1, 2);
  const auto p = ConfigPoint::make(space, Cut({0.4}), {{1, 1}, {2, 2}});
  CHECK(act(Permutation::identity(2), p) == p);
  CHECK(act(Permutation::transposition(2, 1, 2), p).allocation() == Allocation{{1, 2}, {2, 1}});
}

TEST_CASE("property: action laws and face preservation") {
  std::mt19937_64 rng(11);
  for (auto kind : {SpaceKind::c1, SpaceKind::c2, SpaceKind::c3}) {
    for (int r = 2; r <= 5; ++r) {
      const auto space = Space::make(kind, r);
      for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_point(space, rng);
        const auto s = Permutation::random(r, rng);
        const auto t = Permutation::random(r, rng);
        CHECK(act(s.compose(t), p) == act(s, act(t, p)));
        CHECK(act(Permutation::identity(r), p) == p);
        const auto moved = act(s, p);
        CHECK(moved.cut() == p.cut());
        CHECK(is_face(space.complex_variant(), moved.support()));
      }
    }
  }
}

TEST_CASE("point_from_barycentric") {
  SUBCASE("gorbushka_join(2) diagonal") {
    const std::vector<Cell> cells{{1, 1}, {2, 2}};
    const std::vector<double> w{0.5, 0.5};
    const auto p = point_from_barycentric(Space::make(SpaceKind::c1, 2), cells, w);
    check_close(p.cut().points(), {0.5});
    CHECK(p.allocation() == Allocation{{1, 1}, {2, 2}});
  }
  SUBCASE("gorbushka_join(3) shared row with column 3") {
    const std::vector<Cell> cells{{1, 1}, {1, 3}};
    const std::vector<double> w{0.5, 0.5};
    const auto p = point_from_barycentric(Space::make(SpaceKind::c1, 3), cells, w);
    check_close(p.cut().points(), {0.5, 0.5});
    CHECK(degenerate_and_essential(p.cut()).degenerate == std::vector<int>{2});
    CHECK(p.allocation() == Allocation{{1, 1}, {3, 1}});
  }
  SUBCASE("chessboard(3,5) leaves unoccupied columns degenerate") {
    const std::vector<Cell> cells{{1, 2}, {2, 4}, {3, 5}};
    const std::vector<double> w{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto p = point_from_barycentric(Space::make(SpaceKind::c2, 3), cells, w);
    CHECK(p.cut().tile_count() == 5);
    CHECK(degenerate_and_essential(p.cut()).degenerate == std::vector<int>{1, 3});
    CHECK(p.allocation() == Allocation{{2, 1}, {4, 2}, {5, 3}});
  }
  SUBCASE("non-faces and bad weights are rejected") {
    const std::vector<Cell> cells{{1, 1}, {1, 2}};
    const std::vector<double> w{0.5, 0.5};
    CHECK_THROWS_AS(point_from_barycentric(Space::make(SpaceKind::c1, 3), cells, w), InvalidConfiguration);
    const std::vector<Cell> ok{{1, 1}, {2, 2}};
    const std::vector<double> bad{0.7, 0.7};
    CHECK_THROWS_AS(point_from_barycentric(Space::make(SpaceKind::c1, 3), ok, bad), InvalidConfiguration);
  }
}

TEST_CASE("property: barycentric round trip, canonical idempotence, label partition") {
  std::mt19937_64 rng(5);
  for (auto kind : {SpaceKind::c1, SpaceKind::c2, SpaceKind::c3}) {
    for (int r = 2; r <= 5; ++r) {
      const auto space = Space::make(kind, r);
      for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_point(space, rng);
        std::vector<Cell> cells;
        std::vector<double> weights;
        for (const auto &[cell, w] : p.barycentric()) {
          cells.push_back(cell);
          weights.push_back(w);
        }
        CHECK(is_face(space.complex_variant(), p.support()));
        const auto q = point_from_barycentric(space, cells, weights);
        REQUIRE(q.allocation() == p.allocation());
        for (size_t i = 0; i < p.cut().points().size(); ++i) {
          CHECK(std::abs(q.cut().points()[i] - p.cut().points()[i]) <= 1e-12);
        }
        CHECK(canonicalize(p.cut(), p.allocation(), space) == p);

        const auto cls = degenerate_and_essential(p.cut());
        std::vector<int> labels = cls.degenerate;
        for (const auto &e : cls.essential) {
          labels.push_back(e.label);
        }
        std::sort(labels.begin(), labels.end());
        CHECK(labels.size() == static_cast<size_t>(space.tile_count()));
        for (size_t i = 0; i < labels.size(); ++i) {
          CHECK(labels[i] == static_cast<int>(i) + 1);
        }
      }
    }
  }
}
