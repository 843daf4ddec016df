#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treedim {

/// Default cap on the number of leaves handled at a single level.
inline constexpr std::size_t kDefaultPointCap = std::size_t{1} << 14;

/// m^n, throwing ResourceLimit when the result exceeds `cap`.
std::size_t checked_pow(std::size_t m, std::size_t n, std::size_t cap);

/// A vertex of the m-adic tree: a word over the letters 1..m (empty = root).
class Vertex {
 public:
  using Letter = std::uint8_t;

  explicit Vertex(std::size_t m, std::vector<Letter> word = {});

  static Vertex root(std::size_t m) { return Vertex(m); }
  /// Parses "x1x2...xk" with single-digit letters; "" is the root.
  static Vertex parse(std::size_t m, std::string_view text);
  /// The vertex at `level` whose leaf index (first letter most significant) is `index`.
  static Vertex at(std::size_t m, std::size_t level, std::size_t index);

  std::size_t m() const { return m_; }
  std::size_t level() const { return word_.size(); }
  const std::vector<Letter>& word() const { return word_; }
  bool is_root() const { return word_.empty(); }

  /// Position of the vertex within its level, 0-based.
  std::size_t index() const;

  Vertex child(Letter x) const;
  Vertex parent() const;
  Vertex concat(const Vertex& suffix) const;
  std::string to_string() const;

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;

 private:
  std::size_t m_;
  std::vector<Letter> word_;
};

/// Half-open range of leaf indices.
struct LeafRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t size() const { return hi - lo; }
  bool contains(std::size_t x) const { return lo <= x && x < hi; }
  friend bool operator==(const LeafRange&, const LeafRange&) = default;
};

/// Leaves of level n below `v`. Throws LevelMismatch if level(v) > n.
LeafRange leaf_index(const Vertex& v, std::size_t n);

/// The m^n level-n vertices in index order.
std::vector<Vertex> level_vertices(std::size_t m, std::size_t n,
                                   std::size_t cap = std::size_t{1} << 20);

}  // namespace treedim
