#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace treedim {

using Point = std::uint32_t;

/// A bijection of {0, ..., degree-1}, stored as its image table.
///
/// Products follow the right-action convention: `p * q` applies `p` first,
/// then `q`, so `(p * q)(x) == q(p(x))`.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::size_t degree);

  /// Throws std::invalid_argument unless `images` is a bijection.
  static Permutation from_images(std::vector<Point> images);

  /// Builds from disjoint or overlapping cycles (applied left to right).
  static Permutation from_cycles(std::size_t degree,
                                 const std::vector<std::vector<Point>>& cycles);

  static Permutation identity(std::size_t degree) { return Permutation(degree); }

  std::size_t degree() const { return images_.size(); }
  Point operator()(Point x) const { return images_[x]; }
  Point image(Point x) const { return images_[x]; }
  std::span<const Point> images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;

  /// Smallest and one-past-largest moved point; {0, 0} for the identity.
  std::pair<Point, Point> support_bounds() const;

  /// Cycle notation with the given index offset, e.g. "(0 2 1)" or "()".
  std::string to_cycle_string(Point offset = 0) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  explicit Permutation(std::vector<Point> images, int /*unchecked*/)
      : images_(std::move(images)) {}

  std::vector<Point> images_;

  friend Permutation compose(const Permutation& p, const Permutation& q);
  friend void compose_into(Permutation& out, const Permutation& p,
                           const Permutation& q);
};

/// Apply `p` first, then `q`. Throws DegreeMismatch on differing degrees.
Permutation compose(const Permutation& p, const Permutation& q);

/// `out = compose(p, q)` reusing the storage of `out`; `out` may alias neither.
void compose_into(Permutation& out, const Permutation& p, const Permutation& q);

inline Permutation operator*(const Permutation& p, const Permutation& q) {
  return compose(p, q);
}

/// x^g = g^-1 x g.
Permutation conjugate(const Permutation& x, const Permutation& g);

/// [a, b] = a^-1 b^-1 a b.
Permutation commutator(const Permutation& a, const Permutation& b);

bool commute(const Permutation& a, const Permutation& b);

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept;
};

}  // namespace treedim
