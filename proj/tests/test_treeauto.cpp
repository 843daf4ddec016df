#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracle.hpp"
#include "treedim/constructions.hpp"
#include "treedim/errors.hpp"
#include "treedim/treeauto.hpp"

using namespace treedim;

namespace {

const GroupSpec& odometer() { return *fixture("odometer"); }
const GroupSpec& grigorchuk() { return *fixture("grigorchuk"); }

std::vector<Point> images(const Permutation& p) { return {p.images().begin(), p.images().end()}; }

// Generators of every fixture at a small level, with their level.
std::vector<std::pair<Element, std::size_t>> corpus_elements() {
  std::vector<std::pair<Element, std::size_t>> out;
  for (const auto& [name, spec] : fixtures()) {
    std::size_t n = spec->m == 2 ? 6 : 4;
    for (const auto& g : generators_at(*spec, n)) out.emplace_back(g, n);
  }
  return out;
}

std::set<Machine::StateId> reachable(const Machine& mc, Machine::StateId s) {
  std::set<Machine::StateId> seen{s};
  std::vector<Machine::StateId> stack{s};
  while (!stack.empty()) {
    auto t = stack.back();
    stack.pop_back();
    for (auto u : mc.state(t).sections) {
      if (seen.insert(u).second) stack.push_back(u);
    }
  }
  return seen;
}

}  // namespace

TEST(Machine, IdentityStateIsImplicit) {
  auto mc = odometer().machine;
  EXPECT_EQ(mc->state(Machine::kIdentity).name, "1");
  EXPECT_TRUE(mc->state(Machine::kIdentity).root.is_identity());
  for (auto s : mc->state(Machine::kIdentity).sections) EXPECT_EQ(s, Machine::kIdentity);
  EXPECT_TRUE(mc->find("a").has_value());
  EXPECT_FALSE(mc->find("zz").has_value());
}

TEST(Machine, Validation) {
  Permutation sw = Permutation::from_cycles(2, {{0, 1}});
  EXPECT_THROW(Machine::create(2, {sw}, {{"a", sw, {"1", "q"}}}), ValidationError);
  EXPECT_THROW(Machine::create(2, {sw}, {{"a", sw, {"1"}}}), ValidationError);
  EXPECT_THROW(Machine::create(2, {sw}, {{"a", sw, {"1", "a"}}, {"a", sw, {"1", "1"}}}),
               ValidationError);
  // Root outside the declared top group.
  EXPECT_THROW(Machine::create(2, {}, {{"a", sw, {"1", "a"}}}), ValidationError);
  Permutation c3 = Permutation::from_cycles(3, {{0, 1, 2}});
  EXPECT_THROW(Machine::create(3, {c3}, {{"t", Permutation::from_cycles(3, {{0, 1}}), {"1", "1", "1"}}}),
               ValidationError);
}

TEST(Element, ParseWords) {
  auto mc = grigorchuk().machine;
  auto e = Element::parse(mc, "a*b^-1*a");
  EXPECT_EQ(e.word().size(), 3u);
  EXPECT_TRUE(e.word()[1].inverse);
  EXPECT_TRUE(Element::parse(mc, "1").is_trivial_word());
  EXPECT_TRUE(Element::parse(mc, "").is_trivial_word());
  EXPECT_TRUE(Element::parse(mc, "a*a^-1").is_trivial_word());
  EXPECT_EQ(evaluate(Element::parse(mc, "b^2"), 4), evaluate(Element::parse(mc, "b*b"), 4));
  EXPECT_THROW(Element::parse(mc, "a*x"), ValidationError);
  EXPECT_THROW(Element::parse(mc, "a**b"), ParseError);
  EXPECT_THROW(Element::parse(mc, "a^z"), ParseError);
}

TEST(Section, Examples) {
  auto a = odometer().generators[0];
  EXPECT_TRUE(section(a, Vertex::parse(2, "1")).is_trivial_word());
  EXPECT_EQ(section(a, Vertex::parse(2, "2")).word(), a.word());
  auto id = Element::identity(a.machine());
  EXPECT_TRUE(section(id, Vertex::parse(2, "2121")).is_trivial_word());
  auto h = rooted_generators(2, {Permutation::from_cycles(2, {{0, 1}})})[0];
  for (std::size_t l = 1; l <= 3; ++l) {
    for (const auto& v : level_vertices(2, l)) EXPECT_TRUE(section(h, v).is_trivial_word());
  }
}

TEST(Evaluate, Examples) {
  auto a = odometer().generators[0];
  EXPECT_EQ(evaluate(a, 2), Permutation::from_cycles(4, {{0, 2, 1, 3}}));
  EXPECT_TRUE(evaluate(Element::identity(a.machine()), 5).is_identity());
  EXPECT_EQ(evaluate(a, 0).degree(), 1u);
  auto h = rooted_generators(2, {Permutation::from_cycles(2, {{0, 1}})})[0];
  EXPECT_EQ(images(evaluate(h, 2)), (std::vector<Point>{2, 3, 0, 1}));
  EXPECT_THROW(evaluate(a, 15), ResourceLimit);
  EXPECT_NO_THROW(evaluate(a, 15, 1 << 15));
}

TEST(Evaluate, OdometerIsSingleCycle) {
  auto a = odometer().generators[0];
  for (std::size_t n = 1; n <= 10; ++n) {
    auto p = evaluate(a, n);
    Point x = 0;
    std::size_t len = 0;
    do {
      x = p(x);
      ++len;
    } while (x != 0);
    EXPECT_EQ(len, std::size_t{1} << n);
  }
}

TEST(Evaluate, AgreesWithRecursionOracle) {
  for (const auto& [e, n] : corpus_elements()) {
    std::size_t k = std::min<std::size_t>(n, e.m() == 2 ? 5 : 3);
    EXPECT_EQ(images(evaluate(e, k)), oracle::evaluate(e, k)) << e.to_string();
    auto inv = inverse(e);
    EXPECT_EQ(images(evaluate(inv, k)), oracle::evaluate(inv, k));
  }
}

TEST(Evaluate, TruncationConsistency) {
  auto g = grigorchuk().generators;
  for (const auto& e : g) {
    auto p6 = evaluate(e, 6);
    for (std::size_t k = 0; k <= 6; ++k) {
      auto pk = evaluate(e, k);
      std::size_t block = std::size_t{1} << (6 - k);
      for (Point x = 0; x < 64; ++x) EXPECT_EQ(p6(x) / block, pk(x / block));
    }
  }
}

TEST(Multiply, Homomorphism) {
  auto elems = corpus_elements();
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto& [e, ne] = elems[rng() % elems.size()];
    const auto& [f, nf] = elems[rng() % elems.size()];
    if (e.m() != f.m()) continue;
    std::size_t n = std::min({ne, nf, std::size_t{5}});
    EXPECT_EQ(evaluate(multiply(e, f), n), compose(evaluate(e, n), evaluate(f, n)));
  }
}

TEST(Multiply, InverseAndIdentity) {
  for (const auto& [e, n] : corpus_elements()) {
    std::size_t top = e.m() == 2 ? 8 : 5;
    auto id = Element::identity(e.machine());
    for (std::size_t k = 0; k <= top; ++k) {
      EXPECT_TRUE(evaluate(multiply(e, inverse(e)), k).is_identity());
      EXPECT_EQ(evaluate(multiply(id, e), k), evaluate(e, k));
    }
  }
}

TEST(Multiply, OdometerSquare) {
  auto a = odometer().generators[0];
  for (std::size_t n = 1; n <= 8; ++n) {
    auto p = evaluate(a, n);
    EXPECT_EQ(evaluate(multiply(a, a), n), p * p);
  }
}

TEST(Multiply, AcrossMachines) {
  auto a = odometer().generators[0];
  auto b = grigorchuk().generators[1];
  auto ab = multiply(a, b);
  for (std::size_t n = 0; n <= 5; ++n) {
    EXPECT_EQ(evaluate(ab, n), compose(evaluate(a, n), evaluate(b, n)));
  }
  auto u = unify_machines({a, b});
  EXPECT_EQ(u[0].machine(), u[1].machine());
  EXPECT_EQ(evaluate(u[1], 4), evaluate(b, 4));
}

TEST(Section, CocycleAgainstBlockAction) {
  for (const auto& [e, n0] : corpus_elements()) {
    std::size_t n = std::min<std::size_t>(n0, e.m() == 2 ? 5 : 3);
    auto p = evaluate(e, n);
    for (std::size_t k = 0; k <= n; ++k) {
      for (const auto& v : level_vertices(e.m(), k)) {
        auto r = leaf_index(v, n);
        auto target = leaf_index(act(e, v), n);
        auto local = evaluate(section(e, v), n - k);
        for (std::size_t j = 0; j < r.size(); ++j) {
          EXPECT_EQ(p(static_cast<Point>(r.lo + j)), target.lo + local(static_cast<Point>(j)));
        }
      }
    }
  }
}

TEST(Normalize, IdentityWord) {
  auto id = Element::identity(odometer().machine);
  auto nid = normalize(id);
  EXPECT_TRUE(nid.is_trivial_word());
}

TEST(Normalize, OdometerSquare) {
  auto a = odometer().generators[0];
  auto aa = normalize(multiply(a, a));
  ASSERT_EQ(aa.word().size(), 1u);
  const auto& mc = *aa.machine();
  auto states = reachable(mc, aa.word()[0].state);
  EXPECT_EQ(states.size(), 3u);
  auto a_id = *mc.find("a");
  EXPECT_EQ(mc.state(aa.word()[0].state).sections,
            (std::vector<Machine::StateId>{a_id, a_id}));
}

TEST(Normalize, PreservesEvaluation) {
  std::mt19937_64 rng(22);
  auto elems = corpus_elements();
  for (int t = 0; t < 60; ++t) {
    const auto& [e, ne] = elems[rng() % elems.size()];
    const auto& [f, nf] = elems[rng() % elems.size()];
    if (e.m() != f.m()) continue;
    auto w = multiply(multiply(e, inverse(f)), e);
    auto nw = normalize(w);
    std::size_t top = e.m() == 2 ? 8 : 5;
    for (std::size_t n = 0; n <= top; ++n) EXPECT_EQ(evaluate(nw, n), evaluate(w, n));
  }
}

TEST(Normalize, DiagonalProduct) {
  auto g = grigorchuk().generators;
  auto lhs = normalize(multiply(diagonal(g[1]), diagonal(g[2])));
  auto rhs = diagonal(multiply(g[1], g[2]));
  for (std::size_t n = 0; n <= 7; ++n) EXPECT_EQ(evaluate(lhs, n), evaluate(rhs, n));
}

TEST(Normalize, BudgetThrowsStateExplosion) {
  auto g = grigorchuk().generators;
  auto w = multiply(multiply(g[0], g[1]), multiply(g[0], g[2]));
  EXPECT_THROW(normalize(w, NormalizeBudget{1}), StateExplosion);
  EXPECT_THROW(normalize(w, NormalizeBudget{1}), ResourceLimit);
}

TEST(SelfSimilarity, OdometerAndGrigorchukPass) {
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_TRUE(self_similarity_check(odometer().generators, n).passed);
  }
  auto r = self_similarity_check(grigorchuk().generators, 6);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.note.empty());
}

TEST(SelfSimilarity, GKFailsBelowLevelOne) {
  auto spec = fixture("gk-odometer");
  auto r = self_similarity_check(generators_at(*spec, 4), 4);
  EXPECT_FALSE(r.passed);
  ASSERT_FALSE(r.failures.empty());
}

TEST(Element, ToStringRoundTrip) {
  auto mc = grigorchuk().machine;
  auto e = Element::parse(mc, "a*b^-1*c*d");
  auto back = Element::parse(mc, e.to_string());
  EXPECT_EQ(back.word(), e.word());
}
