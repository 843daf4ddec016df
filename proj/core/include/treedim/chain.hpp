#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "treedim/bigint.hpp"
#include "treedim/permutation.hpp"

namespace treedim {

/// A chain of nested block systems on `degree()` points.
///
/// Level l (1-based) splits the points into a_1 * ... * a_l consecutive blocks
/// of equal size. A flat hierarchy has one level whose blocks are the points.
/// Groups preserving every level (tree automorphisms truncated at a level) get
/// a base of block "vertices", so every basic orbit has at most a_l points.
class BlockHierarchy {
 public:
  BlockHierarchy() = default;
  explicit BlockHierarchy(std::vector<std::size_t> arities);

  static BlockHierarchy flat(std::size_t degree);
  static BlockHierarchy regular_tree(std::size_t m, std::size_t n);

  std::size_t degree() const { return degree_; }
  std::size_t depth() const { return arities_.size(); }
  std::size_t arity(std::size_t level) const { return arities_[level - 1]; }
  /// Number of blocks at `level` (level 0 is the single root block).
  std::size_t blocks(std::size_t level) const { return blocks_[level]; }
  std::size_t block_size(std::size_t level) const { return degree_ / blocks_[level]; }
  bool is_flat() const { return arities_.size() <= 1; }

  /// True iff `p` maps blocks to blocks on every level.
  bool preserved_by(const Permutation& p) const;

  friend bool operator==(const BlockHierarchy&, const BlockHierarchy&) = default;

 private:
  std::vector<std::size_t> arities_;
  std::vector<std::size_t> blocks_{1};
  std::size_t degree_ = 0;
};

/// A block of the hierarchy: `index` counts blocks at `level` from the left.
struct BasePoint {
  std::uint32_t level = 1;
  Point index = 0;
  friend bool operator==(const BasePoint&, const BasePoint&) = default;
};

struct ChainBudget {
  /// Cap on Schreier generators formed and sifted during construction.
  std::uint64_t max_schreier_generators = 400'000'000;
};

/// Logarithm of a group order in a fixed base.
struct LogOrder {
  bool exact = false;          ///< order is an exact power of the base
  std::uint64_t exponent = 0;  ///< valid when `exact`
  double value = 0.0;
};

/// Base and strong generating set built by deterministic Schreier-Sims.
///
/// Immutable after construction apart from `add_generator`, which extends the
/// group in place. Transversals are kept as Schreier trees over the strong
/// generators; the chain has no randomness, so equal inputs give equal chains.
class StabilizerChain {
 public:
  StabilizerChain() = default;

  /// Flat chain (the base is the list of points).
  static StabilizerChain build(std::size_t degree,
                               std::span<const Permutation> generators,
                               ChainBudget budget = {});

  /// Chain whose base consists of blocks of `hierarchy`. When `fix_first` is
  /// non-empty, the blocks containing those points come first in the base.
  static StabilizerChain build(const BlockHierarchy& hierarchy,
                               std::span<const Permutation> generators,
                               std::span<const Point> fix_first = {},
                               ChainBudget budget = {});

  std::size_t degree() const { return hierarchy_.degree(); }
  const BlockHierarchy& hierarchy() const { return hierarchy_; }

  BigInt order() const;
  LogOrder log_order(std::uint64_t base) const;
  bool is_trivial() const { return strong_.empty(); }

  /// Throws DegreeMismatch.
  bool contains(const Permutation& p) const;

  /// Adds `p` to the generators; returns false if it was already a member.
  bool add_generator(const Permutation& p);

  /// The non-redundant input generators, in the order they were accepted.
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& strong_generators() const { return strong_; }

  std::size_t base_length() const { return levels_.size(); }
  /// Number of leading base points coming from `fix_first`.
  std::size_t prefix_length() const { return prefix_length_; }
  /// Schreier generators formed and sifted so far.
  std::uint64_t schreier_generators_formed() const { return schreier_count_; }
  std::vector<BasePoint> base() const;
  std::vector<std::size_t> transversal_sizes() const;

  /// Strong generators fixing the first `k` base points; they generate the
  /// pointwise stabilizer of those base points.
  std::vector<Permutation> stabilizer_generators(std::size_t k) const;

  /// Coset representative of base level `level` mapping its base point to
  /// `block`, or nullopt when `block` is outside the basic orbit.
  std::optional<Permutation> transversal_element(std::size_t level, Point block) const;

 private:
  struct Level {
    BasePoint base;
    Point block_size = 1;
    std::vector<Point> orbit;
    std::vector<std::int32_t> parent;
    std::vector<std::uint32_t> label;
    std::vector<std::uint32_t> gens;
    std::vector<std::uint32_t> done;
    // Interval containing the support of each representative.
    std::vector<std::pair<Point, Point>> support;
    std::unordered_map<Point, std::uint32_t> index;

    std::int64_t find(Point block) const;
    void push(Point block, std::int32_t par, std::uint32_t lab,
              std::pair<Point, Point> supp = {0, 0});
  };

  Point image_of(const Level& lvl, const Permutation& g) const {
    return g(lvl.base.index * lvl.block_size) / lvl.block_size;
  }
  Point image_of(const Level& lvl, Point block, const Permutation& g) const {
    return g(block * lvl.block_size) / lvl.block_size;
  }

  // A permutation being sifted, kept together with its inverse so that a
  // strip costs the width of the stripped generator's support only.
  struct Work {
    std::vector<Point> img;
    std::vector<Point> inv;
    std::vector<Point> buf;
    void load(const Permutation& p);
    void load_product(const Permutation& u, const Permutation& s);
    Permutation take();
  };

  void init_levels(std::span<const Point> fix_first);
  /// Multiplies `w` on the right by the inverse of the representative of `pos`.
  void strip(const Level& lvl, std::size_t pos, Work& w) const;
  Permutation representative(const Level& lvl, std::size_t pos) const;
  /// True iff u commutes with strong generator s; `moved` covers supp(u).
  bool commute_on(const Permutation& u, std::span<const Point> moved,
                  std::uint32_t s) const;
  /// Returns the level where sifting stopped (base_length() when it passed).
  std::size_t sift_from(std::size_t start, Work& w) const;
  std::uint32_t add_strong(Permutation p, std::size_t depth);
  void complete(std::size_t from);
  bool process_level(std::size_t i, std::size_t& jump);

  BlockHierarchy hierarchy_;
  ChainBudget budget_;
  std::uint64_t schreier_count_ = 0;
  std::size_t prefix_length_ = 0;
  std::vector<Level> levels_;
  std::vector<Permutation> generators_;
  std::vector<Permutation> strong_;
  std::vector<Permutation> strong_inv_;
  std::vector<std::pair<Point, Point>> strong_support_;
  std::vector<std::vector<Point>> strong_moved_;
  std::vector<std::size_t> depth_;
  Work work_;
};

}  // namespace treedim
