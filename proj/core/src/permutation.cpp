#include "treedim/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "treedim/errors.hpp"

namespace treedim {

Permutation::Permutation(std::size_t degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), Point{0});
}

Permutation Permutation::from_images(std::vector<Point> images) {
  std::vector<bool> seen(images.size(), false);
  for (Point y : images) {
    if (y >= images.size() || seen[y]) {
      throw std::invalid_argument("image table is not a bijection");
    }
    seen[y] = true;
  }
  return Permutation(std::move(images), 0);
}

Permutation Permutation::from_cycles(
    std::size_t degree, const std::vector<std::vector<Point>>& cycles) {
  Permutation result(degree);
  for (const auto& cycle : cycles) {
    if (cycle.empty()) continue;
    std::vector<bool> seen(degree, false);
    std::vector<Point> step(degree);
    std::iota(step.begin(), step.end(), Point{0});
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      Point a = cycle[i];
      if (a >= degree) throw std::invalid_argument("cycle point out of range");
      if (seen[a]) throw std::invalid_argument("repeated point in cycle");
      seen[a] = true;
      step[a] = cycle[(i + 1) % cycle.size()];
    }
    result = compose(result, Permutation(std::move(step), 0));
  }
  return result;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<Point> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    inv[images_[i]] = static_cast<Point>(i);
  }
  return Permutation(std::move(inv), 0);
}

std::pair<Point, Point> Permutation::support_bounds() const {
  std::size_t n = images_.size();
  std::size_t lo = 0;
  while (lo < n && images_[lo] == lo) ++lo;
  if (lo == n) return {0, 0};
  std::size_t hi = n;
  while (images_[hi - 1] == hi - 1) --hi;
  return {static_cast<Point>(lo), static_cast<Point>(hi)};
}

std::string Permutation::to_cycle_string(Point offset) const {
  std::string out;
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (seen[start] || images_[start] == start) continue;
    out += '(';
    Point x = static_cast<Point>(start);
    bool first = true;
    while (!seen[x]) {
      seen[x] = true;
      if (!first) out += ' ';
      out += std::to_string(x + offset);
      first = false;
      x = images_[x];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) {
    throw DegreeMismatch("compose: degrees " + std::to_string(p.degree()) +
                         " and " + std::to_string(q.degree()));
  }
  std::vector<Point> out(p.degree());
  const Point* pi = p.images_.data();
  const Point* qi = q.images_.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = qi[pi[i]];
  return Permutation(std::move(out), 0);
}

void compose_into(Permutation& out, const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) throw DegreeMismatch("compose_into");
  out.images_.resize(p.degree());
  const Point* pi = p.images_.data();
  const Point* qi = q.images_.data();
  Point* o = out.images_.data();
  for (std::size_t i = 0, n = p.degree(); i < n; ++i) o[i] = qi[pi[i]];
}

Permutation conjugate(const Permutation& x, const Permutation& g) {
  return g.inverse() * x * g;
}

Permutation commutator(const Permutation& a, const Permutation& b) {
  return a.inverse() * b.inverse() * a * b;
}

bool commute(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw DegreeMismatch("commute");
  for (std::size_t i = 0; i < a.degree(); ++i) {
    if (b(a(static_cast<Point>(i))) != a(b(static_cast<Point>(i)))) return false;
  }
  return true;
}

std::size_t PermutationHash::operator()(const Permutation& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Point x : p.images()) {
    h ^= x;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace treedim
