#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treedim/chain.hpp"
#include "treedim/permutation.hpp"

namespace treedim {

using Orbit = std::vector<Point>;

/// Orbits of <generators> on {0, ..., degree-1}; each orbit sorted, orbits
/// ordered by their minimum.
std::vector<Orbit> orbits(std::span<const Permutation> generators, std::size_t degree);

/// Orbits meeting the range [lo, hi). The range is expected to be invariant;
/// orbits are reported whole either way.
std::vector<Orbit> orbits(std::span<const Permutation> generators, std::size_t degree,
                          Point lo, Point hi);

/// Chain of the smallest normal subgroup of `group` containing `elements`.
StabilizerChain normal_closure(const StabilizerChain& group,
                               std::span<const Permutation> elements,
                               ChainBudget budget = {});

StabilizerChain derived_subgroup(const StabilizerChain& group, ChainBudget budget = {});

struct SearchBudget {
  std::uint64_t max_nodes = 10'000'000;
};

/// Z(G) by backtracking over the per-orbit centralizers of G in Sym(X).
/// Throws ResourceLimit when the search exceeds `budget`.
StabilizerChain center(const StabilizerChain& group, SearchBudget budget = {});

/// Elements of `group` fixing every point of `points`.
StabilizerChain pointwise_stabilizer(const StabilizerChain& group,
                                     std::span<const Point> points,
                                     ChainBudget budget = {});

/// Throws NotSubgroup if some generator of `sub` is outside `group`.
bool is_normal(const StabilizerChain& group, const StabilizerChain& sub);

/// Restriction of each generator to an invariant subset, relabelled 0..k-1 in
/// the order of `subset`. Throws std::invalid_argument if not invariant.
std::vector<Permutation> restrict_to(std::span<const Permutation> generators,
                                     std::span<const Point> subset);

}  // namespace treedim
