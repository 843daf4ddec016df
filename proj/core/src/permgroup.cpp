#include "treedim/permgroup.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "treedim/errors.hpp"

namespace treedim {

std::vector<Orbit> orbits(std::span<const Permutation> generators, std::size_t degree) {
  return orbits(generators, degree, 0, static_cast<Point>(degree));
}

std::vector<Orbit> orbits(std::span<const Permutation> generators, std::size_t degree,
                          Point lo, Point hi) {
  for (const auto& g : generators) {
    if (g.degree() != degree) throw DegreeMismatch("orbits: generator degree mismatch");
  }
  if (hi > degree || lo > hi) throw std::out_of_range("orbits: bad point range");
  std::vector<std::int64_t> owner(degree, -1);
  std::vector<Orbit> out;
  for (Point start = lo; start < hi; ++start) {
    if (owner[start] >= 0) continue;
    Orbit orb{start};
    owner[start] = static_cast<std::int64_t>(out.size());
    for (std::size_t k = 0; k < orb.size(); ++k) {
      for (const auto& g : generators) {
        Point y = g(orb[k]);
        if (owner[y] < 0) {
          owner[y] = static_cast<std::int64_t>(out.size());
          orb.push_back(y);
        }
      }
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

std::vector<Permutation> restrict_to(std::span<const Permutation> generators,
                                     std::span<const Point> subset) {
  std::vector<Permutation> out;
  if (generators.empty()) return out;
  std::size_t degree = generators.front().degree();
  std::vector<std::int64_t> pos(degree, -1);
  for (std::size_t i = 0; i < subset.size(); ++i) pos[subset[i]] = static_cast<std::int64_t>(i);
  for (const auto& g : generators) {
    std::vector<Point> images(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
      std::int64_t j = pos[g(subset[i])];
      if (j < 0) throw std::invalid_argument("restrict_to: subset is not invariant");
      images[i] = static_cast<Point>(j);
    }
    out.push_back(Permutation::from_images(std::move(images)));
  }
  return out;
}

namespace {

bool disjoint(std::pair<Point, Point> a, std::pair<Point, Point> b) {
  return a.first == a.second || b.first == b.second || a.second <= b.first ||
         b.second <= a.first;
}

// Adds the conjugates of everything pending until `closure` is normal.
void close_under_conjugation(const StabilizerChain& group, StabilizerChain& closure,
                             std::deque<Permutation>& pending) {
  const auto& gens = group.generators();
  std::vector<std::pair<Point, Point>> supports;
  for (const auto& g : gens) supports.push_back(g.support_bounds());
  while (!pending.empty()) {
    Permutation x = std::move(pending.front());
    pending.pop_front();
    auto sx = x.support_bounds();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (disjoint(sx, supports[i])) continue;  // the conjugate is x itself
      Permutation c = conjugate(x, gens[i]);
      if (closure.add_generator(c)) pending.push_back(std::move(c));
    }
  }
}

}  // namespace

StabilizerChain normal_closure(const StabilizerChain& group,
                               std::span<const Permutation> elements, ChainBudget budget) {
  StabilizerChain closure = StabilizerChain::build(group.hierarchy(), {}, {}, budget);
  std::deque<Permutation> pending;
  for (const auto& x : elements) {
    if (closure.add_generator(x)) pending.push_back(x);
  }
  close_under_conjugation(group, closure, pending);
  return closure;
}

StabilizerChain derived_subgroup(const StabilizerChain& group, ChainBudget budget) {
  const auto& gens = group.generators();
  std::vector<std::pair<Point, Point>> supports;
  for (const auto& g : gens) supports.push_back(g.support_bounds());
  StabilizerChain closure = StabilizerChain::build(group.hierarchy(), {}, {}, budget);
  std::deque<Permutation> pending;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (disjoint(supports[i], supports[j])) continue;
      Permutation c = commutator(gens[i], gens[j]);
      if (!c.is_identity() && closure.add_generator(c)) pending.push_back(std::move(c));
    }
  }
  close_under_conjugation(group, closure, pending);
  return closure;
}

namespace {

// All maps z on `orb` commuting with the generators, as image tables indexed
// like `orb`. Such a map is fixed by the image of orb[0].
std::vector<std::vector<Point>> orbit_centralizer(std::span<const Permutation> gens,
                                                  const Orbit& orb, std::uint64_t& nodes,
                                                  const SearchBudget& budget) {
  std::size_t degree = gens.front().degree();
  std::vector<std::int64_t> pos(degree, -1);
  for (std::size_t i = 0; i < orb.size(); ++i) pos[orb[i]] = static_cast<std::int64_t>(i);

  struct Edge {
    std::size_t from;
    std::size_t gen;
  };
  // BFS tree from orb[0]: tree[i] tells how orb-position i was first reached.
  std::vector<std::int64_t> reached(orb.size(), -1);
  std::vector<Edge> tree(orb.size());
  std::vector<std::size_t> order{static_cast<std::size_t>(pos[orb[0]])};
  reached[order[0]] = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      auto t = static_cast<std::size_t>(pos[gens[s](orb[order[k]])]);
      if (reached[t] < 0) {
        reached[t] = 1;
        tree[t] = {order[k], s};
        order.push_back(t);
      }
    }
  }

  std::vector<std::vector<Point>> out;
  std::vector<Point> z(orb.size());
  for (Point y : orb) {
    nodes += orb.size();
    if (nodes > budget.max_nodes) {
      throw ResourceLimit("center: search exceeded " + std::to_string(budget.max_nodes) +
                          " nodes");
    }
    z[order[0]] = y;
    for (std::size_t k = 1; k < order.size(); ++k) {
      const Edge& e = tree[order[k]];
      z[order[k]] = gens[e.gen](z[e.from]);
    }
    bool ok = true;
    for (std::size_t i = 0; i < orb.size() && ok; ++i) {
      for (const auto& g : gens) {
        if (z[static_cast<std::size_t>(pos[g(orb[i])])] != g(z[i])) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(z);
  }
  return out;
}

}  // namespace

StabilizerChain center(const StabilizerChain& group, SearchBudget budget) {
  StabilizerChain result = StabilizerChain::build(group.hierarchy(), {});
  const auto& gens = group.generators();
  if (gens.empty()) return result;
  std::size_t degree = group.degree();
  auto orbs = orbits(gens, degree);

  std::uint64_t nodes = 0;
  std::vector<std::vector<std::vector<Point>>> candidates;
  for (const auto& orb : orbs) candidates.push_back(orbit_centralizer(gens, orb, nodes, budget));

  // Restrictions of G to the union of the first k+1 orbits, for pruning.
  std::vector<std::optional<StabilizerChain>> prefix_groups(orbs.size());
  std::vector<std::vector<Point>> prefix_points(orbs.size());
  for (std::size_t k = 0; k < orbs.size(); ++k) {
    if (k > 0) prefix_points[k] = prefix_points[k - 1];
    prefix_points[k].insert(prefix_points[k].end(), orbs[k].begin(), orbs[k].end());
  }

  std::vector<Point> z(degree);
  std::iota(z.begin(), z.end(), Point{0});

  std::function<void(std::size_t)> search = [&](std::size_t k) {
    if (++nodes > budget.max_nodes) {
      throw ResourceLimit("center: search exceeded " + std::to_string(budget.max_nodes) +
                          " nodes");
    }
    if (k == orbs.size()) {
      Permutation p = Permutation::from_images(z);
      if (!p.is_identity() && group.contains(p)) result.add_generator(p);
      return;
    }
    const auto& orb = orbs[k];
    bool prune = candidates[k].size() > 1 && k + 1 < orbs.size();
    for (const auto& cand : candidates[k]) {
      for (std::size_t i = 0; i < orb.size(); ++i) z[orb[i]] = cand[i];
      if (prune) {
        if (!prefix_groups[k]) {
          auto restricted = restrict_to(gens, prefix_points[k]);
          prefix_groups[k] = StabilizerChain::build(prefix_points[k].size(), restricted);
        }
        std::vector<Point> images(prefix_points[k].size());
        std::vector<std::int64_t> pos(degree, -1);
        for (std::size_t i = 0; i < prefix_points[k].size(); ++i) {
          pos[prefix_points[k][i]] = static_cast<std::int64_t>(i);
        }
        for (std::size_t i = 0; i < prefix_points[k].size(); ++i) {
          images[i] = static_cast<Point>(pos[z[prefix_points[k][i]]]);
        }
        if (!prefix_groups[k]->contains(Permutation::from_images(std::move(images)))) continue;
      }
      search(k + 1);
    }
    for (Point x : orb) z[x] = x;
  };
  search(0);
  return result;
}

StabilizerChain pointwise_stabilizer(const StabilizerChain& group,
                                     std::span<const Point> points, ChainBudget budget) {
  for (Point x : points) {
    if (x >= group.degree()) throw std::out_of_range("pointwise_stabilizer: point out of range");
  }
  StabilizerChain rebased =
      StabilizerChain::build(group.hierarchy(), group.generators(), points, budget);
  auto gens = rebased.stabilizer_generators(rebased.prefix_length());
  return StabilizerChain::build(group.hierarchy(), gens, {}, budget);
}

bool is_normal(const StabilizerChain& group, const StabilizerChain& sub) {
  for (const auto& n : sub.generators()) {
    if (!group.contains(n)) {
      throw NotSubgroup("is_normal: generator " + n.to_cycle_string() +
                        " is not in the ambient group");
    }
  }
  for (const auto& n : sub.generators()) {
    for (const auto& g : group.generators()) {
      if (!sub.contains(conjugate(n, g))) return false;
    }
  }
  return true;
}

}  // namespace treedim
