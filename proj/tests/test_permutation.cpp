#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "oracle.hpp"
#include "treedim/errors.hpp"
#include "treedim/permutation.hpp"

using namespace treedim;

TEST(Permutation, IdentityComposesToIdentity) {
  auto id = Permutation::identity(4);
  EXPECT_EQ(compose(id, id), id);
  EXPECT_TRUE(id.is_identity());
}

TEST(Permutation, RightActionConvention) {
  auto p = Permutation::from_cycles(3, {{0, 1}});
  auto q = Permutation::from_cycles(3, {{1, 2}});
  auto r = compose(p, q);
  std::vector<Point> expected{2, 0, 1};
  EXPECT_EQ(std::vector<Point>(r.images().begin(), r.images().end()), expected);
  EXPECT_EQ(r, Permutation::from_cycles(3, {{0, 2, 1}}));
  EXPECT_EQ(p * q, r);
}

TEST(Permutation, InverseLawOnRandomDegree64) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto p = oracle::random_permutation(64, rng);
    EXPECT_TRUE(compose(p, p.inverse()).is_identity());
    EXPECT_TRUE(compose(p.inverse(), p).is_identity());
  }
}

TEST(Permutation, IdentityIsNeutral) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto p = oracle::random_permutation(1 + rng() % 20, rng);
    auto id = Permutation::identity(p.degree());
    EXPECT_EQ(compose(p, id), p);
    EXPECT_EQ(compose(id, p), p);
  }
}

TEST(Permutation, ComposeMatchesImageTable) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::size_t d = 1 + rng() % 30;
    auto p = oracle::random_permutation(d, rng);
    auto q = oracle::random_permutation(d, rng);
    auto r = compose(p, q);
    for (Point x = 0; x < d; ++x) EXPECT_EQ(r(x), q(p(x)));
    Permutation out;
    compose_into(out, p, q);
    EXPECT_EQ(out, r);
  }
}

TEST(Permutation, DegreeMismatchThrows) {
  EXPECT_THROW(compose(Permutation::identity(3), Permutation::identity(4)), DegreeMismatch);
}

TEST(Permutation, FromImagesRejectsNonBijection) {
  EXPECT_THROW(Permutation::from_images({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Permutation::from_images({0, 3}), std::invalid_argument);
}

TEST(Permutation, CyclesApplyLeftToRight) {
  auto p = Permutation::from_cycles(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(p, compose(Permutation::from_cycles(3, {{0, 1}}), Permutation::from_cycles(3, {{1, 2}})));
}

TEST(Permutation, CycleString) {
  EXPECT_EQ(Permutation::identity(3).to_cycle_string(), "()");
  EXPECT_EQ(Permutation::from_cycles(4, {{0, 2, 1}}).to_cycle_string(), "(0 2 1)");
  EXPECT_EQ(Permutation::from_cycles(4, {{0, 1}, {2, 3}}).to_cycle_string(1), "(1 2)(3 4)");
}

TEST(Permutation, SupportBounds) {
  EXPECT_EQ(Permutation::identity(5).support_bounds(), (std::pair<Point, Point>{0, 0}));
  EXPECT_EQ(Permutation::from_cycles(8, {{2, 5}}).support_bounds(),
            (std::pair<Point, Point>{2, 6}));
}

TEST(Permutation, ConjugateAndCommutator) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    auto x = oracle::random_permutation(7, rng);
    auto g = oracle::random_permutation(7, rng);
    EXPECT_EQ(conjugate(x, g), g.inverse() * x * g);
    EXPECT_EQ(commutator(x, g), x.inverse() * g.inverse() * x * g);
    EXPECT_EQ(commute(x, g), x * g == g * x);
  }
}

TEST(Permutation, HashSeparatesDistinct) {
  std::unordered_set<Permutation, PermutationHash> seen;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) seen.insert(oracle::random_permutation(10, rng));
  seen.insert(Permutation::identity(10));
  EXPECT_GE(seen.size(), 40u);
}
