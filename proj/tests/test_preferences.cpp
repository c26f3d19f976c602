#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include <envydiv/errors.hpp>
#include <envydiv/preferences.hpp>

using namespace envydiv;

namespace {

// Mutation fixture: a lifted oracle whose box scores come back in a fixed
// shuffled order, which breaks the relabeling identity.
class RowShuffled final : public PreferenceMatrix {
public:
  explicit RowShuffled(PreferencePtr inner) : inner_(std::move(inner)) {}
  PreferenceKind kind() const override { return PreferenceKind::new_style; }
  int players() const override { return inner_->players(); }
  int tile_count() const override { return inner_->tile_count(); }
  std::optional<Space> space() const override { return inner_->space(); }
  std::string description() const override { return "shuffled " + inner_->description(); }
  std::vector<double> box_scores(int player, const ConfigPoint &p) const override {
    auto v = inner_->box_scores(player, p);
    std::rotate(v.begin(), v.begin() + 1, v.end());
    return v;
  }

private:
  PreferencePtr inner_;
};

double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

TEST_CASE("builtin examples") {
  const auto hungry = make_builtin("hungry", 3);
  for (int j = 1; j <= 3; ++j) {
    for (double s : hungry->tile_scores(j, Cut({1.0 / 3, 2.0 / 3}))) {
      CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-14));
    }
  }
  const auto one = hungry->tile_scores(2, z_to_cut(ZPoint{{1, 0, 0}}));
  CHECK(one == std::vector<double>{1, 0, 0});

  const auto gorb = make_builtin("gorbushka", 3)->tile_scores(1, Cut({0.25, 0.5}));
  CHECK(gorb[0] > kPreferenceThreshold);
  CHECK(gorb[1] == 0.0);
  CHECK(gorb[2] > kPreferenceThreshold);

  const auto burnt = make_builtin("burnt", 3)->tile_scores(1, Cut({0, 0}));
  CHECK(burnt[0] == burnt[1]);
  CHECK(burnt[0] > burnt[2]);
  CHECK(burnt[0] == *std::max_element(burnt.begin(), burnt.end()));
}

TEST_CASE("gorbushka without the degenerate-tile rule keeps only the ends") {
  const auto g = make_builtin("gorbushka", 3, {{"pdte", false}});
  const auto s = g->tile_scores(1, Cut({0, 0}));
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == 0.0);
  CHECK(s[2] == doctest::Approx(0.5));
}

TEST_CASE("lifted gorbushka spreads mass over empty boxes") {
  const auto space = Space::make(SpaceKind::c1, 3);
  const auto lifted = content_lift(make_builtin("gorbushka", 3), space);
  const auto p = canonicalize(Cut({0, 0}), {{3, 3}}, space);
  for (int j = 1; j <= 3; ++j) {
    const auto s = lifted->box_scores(j, p);
    CHECK(s[0] == doctest::Approx(s[1]));
    CHECK(s[0] > kPreferenceThreshold);
    CHECK(sum(s) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("domain mismatch") {
  const auto space = Space::make(SpaceKind::c3, 3);
  const auto hungry = make_builtin("hungry", 3);
  const auto lifted = content_lift(hungry, space);
  const auto p = canonicalize(Cut({1.0 / 3, 2.0 / 3}), {{1, 1}, {2, 2}, {3, 3}}, space);
  CHECK_THROWS_AS((void)scores(*hungry, 1, p), DomainMismatch);
  CHECK_THROWS_AS((void)scores(*lifted, 1, Cut({0.5, 0.5})), DomainMismatch);
  CHECK_THROWS_AS((void)hungry->tile_scores(1, Cut({0.5})), DomainMismatch);
  CHECK_THROWS_AS((void)content_lift(hungry, Space::make(SpaceKind::c2, 3)), InvalidConfiguration);
}

TEST_CASE("bad model requests") {
  CHECK_THROWS_AS((void)make_builtin("pizza", 3), InputError);
  CHECK_THROWS_AS((void)make_builtin("hungry", 1), InputError);
  CHECK_THROWS_AS((void)make_builtin("hungry", 3, {{"min_length", "x"}}), InputError);
  CHECK_THROWS_AS((void)make_builtin("piecewise_random", 3, {{"breakpoints", 0}}), InputError);
  CHECK_THROWS_AS((void)make_builtin("piecewise", 2, {{"tables", {{{{0, 1}}}}}}), InputError);
  CHECK_THROWS_AS((void)parse_property("smooth"), InputError);
}

TEST_CASE("piecewise tables are interpolated") {
  const nlohmann::json params = {
      {"tables",
       {{{{0, 0}, {1, 1}}, {{0, 1}, {1, 1}}}, {{{0, 0}, {0.5, 2}, {1, 2}}, {{0, 0}, {1, 1}}}}}};
  const auto pw = make_builtin("piecewise", 2, params);
  const auto a = pw->tile_scores(1, Cut({0.25}));
  CHECK(a[0] == doctest::Approx(0.25 / 1.25));
  const auto b = pw->tile_scores(2, Cut({0.25}));
  CHECK(b[0] == doctest::Approx(1.0 / 1.75));
  CHECK(interpolate({{0, 0}, {0.5, 2}}, 0.9) == 2.0);
}

TEST_CASE("piecewise_random is reproducible per seed") {
  const auto a = make_builtin("piecewise_random", 4, {}, 7);
  const auto b = make_builtin("piecewise_random", 4, {}, 7);
  const auto c = make_builtin("piecewise_random", 4, {}, 8);
  const Cut x({0.1, 0.35, 0.8});
  CHECK(a->tile_scores(3, x) == b->tile_scores(3, x));
  CHECK(a->tile_scores(3, x) != c->tile_scores(3, x));
}

TEST_CASE("validation examples") {
  CHECK(validate(*make_builtin("hungry", 3), Property::covering, 1000, 1).ok());

  const auto space = Space::make(SpaceKind::c1, 4);
  const auto lifted = content_lift(make_builtin("piecewise_random", 4, {}, 11), space);
  CHECK(validate(*lifted, Property::equivariance, 1000, 2).ok());

  const RowShuffled shuffled(lifted);
  const auto report = validate(shuffled, Property::equivariance, 200, 3);
  CHECK_FALSE(report.ok());
  CHECK_FALSE(report.violations.empty());
  CHECK(report.violations.size() <= 16);
  CHECK(std::holds_alternative<ConfigPoint>(report.violations.front().point));

  CHECK_THROWS_AS((void)validate(*make_builtin("hungry", 3), Property::equivariance, 10, 1), InvalidConfiguration);
  CHECK_THROWS_AS((void)validate(*lifted, Property::p_pe, 10, 1), InvalidConfiguration);
}

TEST_CASE("model axioms on samples") {
  for (int r : {2, 3, 5}) {
    CAPTURE(r);
    const auto gorb = make_builtin("gorbushka", r);
    const auto burnt = make_builtin("burnt", r);
    const auto hungry = make_builtin("hungry", r);
    const auto random = make_builtin("piecewise_random", r, {}, 5);
    CHECK(validate(*gorb, Property::p_dte, 500, 4).ok());
    CHECK(validate(*burnt, Property::p_dte, 500, 4).ok());
    CHECK(validate(*hungry, Property::p_pe, 500, 4).ok());
    for (const auto &m : {gorb, burnt, hungry, random}) {
      CHECK(validate(*m, Property::covering, 500, 5).ok());
      CHECK(validate(*m, Property::continuity, 300, 6).ok());
    }
  }
  // Not closed: continuity catches the jump at a tie.
  const auto greedy = make_builtin("greedy", 2);
  CHECK(greedy->tile_scores(1, Cut({0.5})) == std::vector<double>{1, 0});
  CHECK(greedy->tile_scores(1, Cut({0.5 + 1e-9})) == std::vector<double>{1, 0});
  CHECK(greedy->tile_scores(1, Cut({0.5 - 1e-9})) == std::vector<double>{0, 1});
}

TEST_CASE("score vectors are probability vectors and hungry ignores degenerate tiles") {
  std::mt19937_64 rng(9);
  for (int r = 2; r <= 5; ++r) {
    const auto hungry = make_builtin("hungry", r);
    const std::vector<PreferencePtr> models{hungry, make_builtin("gorbushka", r), make_builtin("burnt", r),
                                            make_builtin("piecewise_random", r, {}, 3)};
    for (int s = 0; s < 200; ++s) {
      const auto x = random_cut(r, rng, 0.4);
      for (const auto &m : models) {
        for (int j = 1; j <= r; ++j) {
          const auto v = m->tile_scores(j, x);
          CHECK(sum(v) == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
        }
      }
      const auto v = hungry->tile_scores(1, x);
      for (int t : degenerate_and_essential(x).degenerate) {
        CHECK(v[static_cast<size_t>(t - 1)] == 0.0);
      }
    }
    for (auto kind : {SpaceKind::c1, SpaceKind::c3}) {
      const auto space = Space::make(kind, r);
      const auto lifted = content_lift(make_builtin("burnt", r), space);
      for (int s = 0; s < 100; ++s) {
        const auto p = random_point(space, rng, 0.4);
        const auto v = lifted->box_scores(1 + s % r, p);
        CHECK(sum(v) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}
