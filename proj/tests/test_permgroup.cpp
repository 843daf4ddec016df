#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "treedim/analysis.hpp"
#include "treedim/errors.hpp"
#include "treedim/permgroup.hpp"

using namespace treedim;

namespace {

StabilizerChain sym3() {
  return StabilizerChain::build(3, std::vector{Permutation::from_cycles(3, {{0, 1}}),
                                               Permutation::from_cycles(3, {{1, 2}})});
}

StabilizerChain cyclic4() {
  return StabilizerChain::build(4, std::vector{Permutation::from_cycles(4, {{0, 1, 2, 3}})});
}

std::set<oracle::Images> elements_of(const StabilizerChain& c) {
  return oracle::closure(c.generators(), c.degree());
}

}  // namespace

TEST(Orbits, TrivialGroupSingletons) {
  auto o = orbits(std::vector<Permutation>{}, 8);
  ASSERT_EQ(o.size(), 8u);
  for (Point i = 0; i < 8; ++i) EXPECT_EQ(o[i], Orbit{i});
}

TEST(Orbits, TwoTranspositions) {
  std::vector<Permutation> g{Permutation::from_cycles(4, {{0, 1}}),
                             Permutation::from_cycles(4, {{2, 3}})};
  auto o = orbits(g, 4);
  EXPECT_EQ(o, (std::vector<Orbit>{{0, 1}, {2, 3}}));
}

TEST(Orbits, RangeAndErrors) {
  std::vector<Permutation> g{Permutation::from_cycles(4, {{0, 1}})};
  auto o = orbits(g, 4, 2, 4);
  EXPECT_EQ(o, (std::vector<Orbit>{{2}, {3}}));
  EXPECT_THROW(orbits(g, 5), DegreeMismatch);
  EXPECT_THROW(orbits(g, 4, 3, 5), std::out_of_range);
}

TEST(Orbits, PartitionRandom) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    std::size_t d = 1 + rng() % 12;
    auto gens = oracle::random_generators(d, rng);
    auto o = orbits(gens, d);
    std::vector<int> hit(d, 0);
    Point prev_min = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      EXPECT_TRUE(std::is_sorted(o[i].begin(), o[i].end()));
      if (i > 0) EXPECT_GT(o[i].front(), prev_min);
      prev_min = o[i].front();
      for (Point x : o[i]) {
        ++hit[x];
        for (const auto& g : gens) {
          EXPECT_TRUE(std::binary_search(o[i].begin(), o[i].end(), g(x)));
        }
      }
    }
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

TEST(Derived, Sym3IsAlt3) {
  auto d = derived_subgroup(sym3());
  EXPECT_EQ(d.order(), 3);
  EXPECT_TRUE(d.contains(Permutation::from_cycles(3, {{0, 1, 2}})));
}

TEST(Derived, AbelianIsTrivial) { EXPECT_EQ(derived_subgroup(cyclic4()).order(), 1); }

TEST(Derived, Wreath3Index8) {
  auto spec = fixture("w2");
  auto g = quotient(*spec, 3);
  EXPECT_EQ(g.order() / derived_subgroup(g).order(), 8);
}

TEST(Derived, RandomAgreesWithOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 60; ++t) {
    std::size_t d = 1 + rng() % 6;
    auto gens = oracle::random_generators(d, rng);
    auto g = StabilizerChain::build(d, gens);
    auto dg = derived_subgroup(g);
    auto els = elements_of(g);
    auto oracle_d = oracle::derived(els, d);
    EXPECT_EQ(dg.order(), oracle_d.size());
    for (const auto& x : oracle_d) EXPECT_TRUE(dg.contains(Permutation::from_images(x)));
  }
}

TEST(Derived, OrbitsRefine) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    std::size_t d = 2 + rng() % 7;
    auto gens = oracle::random_generators(d, rng);
    auto g = StabilizerChain::build(d, gens);
    auto dg = derived_subgroup(g);
    auto big = orbits(g.generators(), d);
    std::vector<std::size_t> owner(d);
    for (std::size_t i = 0; i < big.size(); ++i) {
      for (Point x : big[i]) owner[x] = i;
    }
    for (const auto& o : orbits(dg.generators(), d)) {
      for (Point x : o) EXPECT_EQ(owner[x], owner[o.front()]);
    }
  }
}

TEST(NormalClosure, OfTranspositionInSym4) {
  auto s4 = StabilizerChain::build(4, std::vector{Permutation::from_cycles(4, {{0, 1, 2, 3}}),
                                                  Permutation::from_cycles(4, {{0, 1}})});
  auto n = normal_closure(s4, std::vector{Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  EXPECT_EQ(n.order(), 4);  // Klein four-group
  EXPECT_TRUE(is_normal(s4, n));
}

TEST(Center, Sym3Trivial) { EXPECT_EQ(center(sym3()).order(), 1); }

TEST(Center, CyclicIsItself) { EXPECT_EQ(center(cyclic4()).order(), 4); }

TEST(Center, GKLevel2ContainsRootedSwap) {
  auto g = quotient(*fixture("gk-w2"), 2);
  auto z = center(g);
  EXPECT_GE(z.order(), 2);
  EXPECT_TRUE(z.contains(Permutation::from_images({2, 3, 0, 1})));
}

TEST(Center, RandomAgreesWithOracle) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 60; ++t) {
    std::size_t d = 1 + rng() % 7;
    auto gens = oracle::random_generators(d, rng);
    auto g = StabilizerChain::build(d, gens);
    auto z = center(g);
    auto oz = oracle::center(elements_of(g));
    EXPECT_EQ(z.order(), oz.size());
    for (const auto& x : oz) EXPECT_TRUE(z.contains(Permutation::from_images(x)));
  }
}

TEST(Center, BudgetThrows) {
  auto g = quotient(*fixture("w2"), 4);
  SearchBudget tiny{3};
  EXPECT_THROW(center(g, tiny), ResourceLimit);
}

TEST(PointwiseStabilizer, Examples) {
  std::vector<Point> all{0, 1, 2};
  EXPECT_EQ(pointwise_stabilizer(sym3(), all).order(), 1);
  std::vector<Point> zero{0};
  EXPECT_EQ(pointwise_stabilizer(sym3(), zero).order(), 2);
  auto w = quotient(*fixture("w2"), 2);
  std::vector<Point> right{2, 3};
  auto s = pointwise_stabilizer(w, right);
  EXPECT_EQ(s.order(), 2);
  EXPECT_TRUE(s.contains(Permutation::from_cycles(4, {{0, 1}})));
  std::vector<Point> bad{7};
  EXPECT_THROW(pointwise_stabilizer(sym3(), bad), std::out_of_range);
}

TEST(PointwiseStabilizer, RandomAgreesWithOracle) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 50; ++t) {
    std::size_t d = 2 + rng() % 6;
    auto gens = oracle::random_generators(d, rng);
    auto g = StabilizerChain::build(d, gens);
    std::vector<Point> pts;
    for (Point x = 0; x < d; ++x) {
      if (rng() % 3 == 0) pts.push_back(x);
    }
    std::size_t count = 0;
    for (const auto& e : elements_of(g)) {
      bool fixes = std::all_of(pts.begin(), pts.end(), [&](Point x) { return e[x] == x; });
      count += fixes;
    }
    EXPECT_EQ(pointwise_stabilizer(g, pts).order(), count);
  }
}

TEST(IsNormal, Examples) {
  auto s3 = sym3();
  EXPECT_TRUE(is_normal(s3, StabilizerChain::build(3, {})));
  auto a3 = StabilizerChain::build(3, std::vector{Permutation::from_cycles(3, {{0, 1, 2}})});
  EXPECT_TRUE(is_normal(s3, a3));
  auto t = StabilizerChain::build(3, std::vector{Permutation::from_cycles(3, {{0, 1}})});
  EXPECT_FALSE(is_normal(s3, t));
  EXPECT_THROW(is_normal(a3, t), NotSubgroup);
}

TEST(IsNormal, RootedHInGK) {
  auto spec = fixture("gk-w2");
  for (std::size_t n = 1; n <= 6; ++n) {
    auto g = quotient(*spec, n);
    auto h = StabilizerChain::build(g.hierarchy(),
                                    std::vector{evaluate(rooted_generators(2, spec->h)[0], n)});
    EXPECT_TRUE(is_normal(g, h)) << "n=" << n;
  }
}

TEST(RestrictTo, RelabelsAndRejects) {
  std::vector<Permutation> g{Permutation::from_cycles(4, {{2, 3}})};
  std::vector<Point> sub{3, 2};
  auto r = restrict_to(g, sub);
  EXPECT_EQ(r[0], Permutation::from_cycles(2, {{0, 1}}));
  std::vector<Point> bad{1, 2};
  EXPECT_THROW(restrict_to(g, bad), std::invalid_argument);
}

TEST(EasyBound, RandomSets) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 100; ++t) {
    std::size_t d = 1 + rng() % 8;
    auto gens = oracle::random_generators(d, rng);
    auto r = abelianization_of(gens, d);
    EXPECT_TRUE(r.easy_bound_holds);
    EXPECT_GE(r.easy_bound_slack, 0.0);
  }
}
