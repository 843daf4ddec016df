#include "treedim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "treedim/errors.hpp"

namespace treedim {

double log_of(const BigInt& x) {
  if (x <= 0) return -INFINITY;
  std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 60) return std::log(static_cast<double>(x.convert_to<std::uint64_t>()));
  std::size_t shift = bits - 60;
  BigInt top = x >> shift;
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(shift) * std::log(2.0);
}

// ---------------------------------------------------------------------------
// BlockHierarchy

BlockHierarchy::BlockHierarchy(std::vector<std::size_t> arities)
    : arities_(std::move(arities)) {
  std::size_t total = 1;
  for (std::size_t a : arities_) {
    if (a == 0) throw std::invalid_argument("block hierarchy arity must be positive");
    total *= a;
    blocks_.push_back(total);
  }
  degree_ = arities_.empty() ? 0 : total;
}

BlockHierarchy BlockHierarchy::flat(std::size_t degree) {
  if (degree == 0) return BlockHierarchy{};
  return BlockHierarchy({degree});
}

BlockHierarchy BlockHierarchy::regular_tree(std::size_t m, std::size_t n) {
  if (n == 0) return BlockHierarchy({1});
  return BlockHierarchy(std::vector<std::size_t>(n, m));
}

bool BlockHierarchy::preserved_by(const Permutation& p) const {
  if (p.degree() != degree_) return false;
  for (std::size_t level = 1; level + 1 <= depth(); ++level) {
    std::size_t bs = block_size(level);
    if (bs <= 1) continue;
    for (std::size_t start = 0; start < degree_; start += bs) {
      Point target = p(static_cast<Point>(start)) / bs;
      for (std::size_t x = start + 1; x < start + bs; ++x) {
        if (p(static_cast<Point>(x)) / bs != target) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Level bookkeeping

std::int64_t StabilizerChain::Level::find(Point block) const {
  if (!index.empty()) {
    auto it = index.find(block);
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    if (orbit[i] == block) return static_cast<std::int64_t>(i);
  }
  return -1;
}

void StabilizerChain::Level::push(Point block, std::int32_t par, std::uint32_t lab,
                                  std::pair<Point, Point> supp) {
  orbit.push_back(block);
  support.push_back(supp);
  parent.push_back(par);
  label.push_back(lab);
  done.push_back(0);
  if (orbit.size() > 16) {
    if (index.empty()) {
      for (std::size_t i = 0; i < orbit.size(); ++i) {
        index.emplace(orbit[i], static_cast<std::uint32_t>(i));
      }
    } else {
      index.emplace(block, static_cast<std::uint32_t>(orbit.size() - 1));
    }
  }
}

// ---------------------------------------------------------------------------
// Construction

StabilizerChain StabilizerChain::build(std::size_t degree,
                                       std::span<const Permutation> generators,
                                       ChainBudget budget) {
  return build(BlockHierarchy::flat(degree), generators, {}, budget);
}

StabilizerChain StabilizerChain::build(const BlockHierarchy& hierarchy,
                                       std::span<const Permutation> generators,
                                       std::span<const Point> fix_first,
                                       ChainBudget budget) {
  StabilizerChain chain;
  chain.hierarchy_ = hierarchy;
  chain.budget_ = budget;
  for (const auto& g : generators) {
    if (g.degree() != hierarchy.degree()) {
      throw DegreeMismatch("build_chain: generator of degree " +
                           std::to_string(g.degree()) + ", expected " +
                           std::to_string(hierarchy.degree()));
    }
    if (!hierarchy.is_flat() && !hierarchy.preserved_by(g)) {
      throw ValidationError("build_chain: generator does not preserve the block hierarchy");
    }
  }
  for (Point x : fix_first) {
    if (x >= hierarchy.degree()) throw std::out_of_range("build_chain: point out of range");
  }
  chain.init_levels(fix_first);
  for (const auto& g : generators) {
    if (!g.is_identity()) chain.add_generator(g);
  }
  return chain;
}

void StabilizerChain::init_levels(std::span<const Point> fix_first) {
  levels_.clear();
  const auto& h = hierarchy_;
  if (h.degree() <= 1) return;

  auto key = [](const BasePoint& b) {
    return (static_cast<std::uint64_t>(b.level) << 32) | b.index;
  };
  std::set<std::uint64_t> prefix_keys;
  std::vector<BasePoint> prefix;
  for (Point x : fix_first) {
    for (std::size_t l = 1; l <= h.depth(); ++l) {
      BasePoint b{static_cast<std::uint32_t>(l),
                  static_cast<Point>(x / h.block_size(l))};
      if (prefix_keys.insert(key(b)).second) prefix.push_back(b);
    }
  }
  std::sort(prefix.begin(), prefix.end(), [&](const BasePoint& a, const BasePoint& b) {
    return key(a) < key(b);
  });

  prefix_length_ = prefix.size();
  std::vector<BasePoint> order = prefix;
  for (std::size_t l = 1; l <= h.depth(); ++l) {
    std::size_t a = h.arity(l);
    for (std::size_t p = 0; p < h.blocks(l - 1); ++p) {
      for (std::size_t c = 0; c + 1 < a; ++c) {
        BasePoint b{static_cast<std::uint32_t>(l), static_cast<Point>(p * a + c)};
        if (!prefix_keys.contains(key(b))) order.push_back(b);
      }
    }
  }
  levels_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Level& lvl = levels_[i];
    lvl.base = order[i];
    lvl.block_size = static_cast<Point>(h.block_size(order[i].level));
    lvl.push(order[i].index, -1, 0);
  }
}

bool StabilizerChain::add_generator(const Permutation& p) {
  if (p.degree() != degree()) throw DegreeMismatch("add_generator: degree mismatch");
  Work w;
  w.load(p);
  std::size_t j = sift_from(0, w);
  if (j == levels_.size()) return false;
  generators_.push_back(p);
  add_strong(w.take(), j);
  for (std::size_t l = 0; l <= j; ++l) {
    levels_[l].gens.push_back(static_cast<std::uint32_t>(strong_.size() - 1));
  }
  complete(j);
  return true;
}

std::uint32_t StabilizerChain::add_strong(Permutation p, std::size_t depth) {
  strong_support_.push_back(p.support_bounds());
  std::vector<Point> moved;
  for (Point x = strong_support_.back().first; x < strong_support_.back().second; ++x) {
    if (p(x) != x) moved.push_back(x);
  }
  strong_moved_.push_back(std::move(moved));
  strong_inv_.push_back(p.inverse());
  strong_.push_back(std::move(p));
  depth_.push_back(depth);
  return static_cast<std::uint32_t>(strong_.size() - 1);
}

void StabilizerChain::complete(std::size_t from) {
  std::size_t i = from;
  for (;;) {
    std::size_t jump = 0;
    if (process_level(i, jump)) {
      i = jump;
      continue;
    }
    if (i == 0) break;
    --i;
  }
}

bool StabilizerChain::process_level(std::size_t i, std::size_t& jump) {
  std::vector<std::optional<Permutation>> reps;
  // Callers never ask for the root (identity) representative.
  auto rep = [&](std::size_t p) -> const Permutation& {
    const Level& lvl = levels_[i];
    if (lvl.parent[lvl.parent[p]] < 0) return strong_[lvl.label[p]];
    if (reps.size() <= p) reps.resize(p + 1);
    if (!reps[p]) reps[p] = representative(lvl, p);
    return *reps[p];
  };

  std::vector<Point> scratch;
  auto commutes = [&](std::size_t p, std::uint32_t s) {
    const Level& lvl = levels_[i];
    if (lvl.parent[lvl.parent[p]] < 0) {
      return commute_on(strong_[lvl.label[p]], strong_moved_[lvl.label[p]], s);
    }
    scratch.clear();
    for (Point x = lvl.support[p].first; x < lvl.support[p].second; ++x) scratch.push_back(x);
    return commute_on(rep(p), scratch, s);
  };
  Work& w = work_;
  for (std::size_t p = 0; p < levels_[i].orbit.size(); ++p) {
    while (levels_[i].done[p] < levels_[i].gens.size()) {
      Level& lvl = levels_[i];
      std::uint32_t s = lvl.gens[lvl.done[p]++];
      Point x = lvl.orbit[p];
      Point y = image_of(lvl, x, strong_[s]);
      std::int64_t q = lvl.find(y);
      if (q < 0) {
        auto a = lvl.support[p];
        auto b = strong_support_[s];
        std::pair<Point, Point> u = a.first == a.second ? b
                                    : std::pair<Point, Point>{std::min(a.first, b.first),
                                                              std::max(a.second, b.second)};
        lvl.push(y, static_cast<std::int32_t>(p), s, u);
        continue;
      }
      if (p == 0 && q == 0) continue;
      if (lvl.parent[q] == static_cast<std::int32_t>(p) && lvl.label[q] == s) continue;
      if (static_cast<std::size_t>(q) == p && depth_[s] > i) {
        // u s u^-1 with disjoint supports is s itself, already a strong generator
        auto [ulo, uhi] = lvl.support[p];
        auto [slo, shi] = strong_support_[s];
        if (uhi <= slo || shi <= ulo) continue;
      }
      if (++schreier_count_ > budget_.max_schreier_generators) {
        throw ResourceLimit("Schreier-Sims exceeded " +
                            std::to_string(budget_.max_schreier_generators) +
                            " Schreier generators");
      }
      if (static_cast<std::size_t>(q) == p && depth_[s] > i && commutes(p, s)) {
        // u s u^-1 = s, which already generates the next stabilizer
        continue;
      }
      if (p == 0) {
        w.load(strong_[s]);
      } else {
        w.load_product(rep(p), strong_[s]);
      }
      strip(levels_[i], static_cast<std::size_t>(q), w);
      std::size_t j = sift_from(i + 1, w);
      if (j == levels_.size()) continue;
      std::uint32_t id = add_strong(w.take(), j);
      for (std::size_t l = i + 1; l <= j; ++l) levels_[l].gens.push_back(id);
      jump = j;
      return true;
    }
  }
  return false;
}

bool StabilizerChain::commute_on(const Permutation& u, std::span<const Point> moved,
                                  std::uint32_t s) const {
  // Off supp(u) and s^-1(supp(u)) both products agree with s.
  const Permutation& g = strong_[s];
  const Permutation& ginv = strong_inv_[s];
  for (Point x : moved) {
    if (g(u(x)) != u(g(x))) return false;
    Point y = ginv(x);
    if (g(u(y)) != u(g(y))) return false;
  }
  return true;
}

void StabilizerChain::Work::load(const Permutation& p) {
  auto im = p.images();
  img.assign(im.begin(), im.end());
  inv.resize(img.size());
  for (std::size_t x = 0; x < img.size(); ++x) inv[img[x]] = static_cast<Point>(x);
}

void StabilizerChain::Work::load_product(const Permutation& u, const Permutation& s) {
  std::size_t d = u.degree();
  img.resize(d);
  inv.resize(d);
  for (std::size_t x = 0; x < d; ++x) {
    Point y = s(u(static_cast<Point>(x)));
    img[x] = y;
    inv[y] = static_cast<Point>(x);
  }
}

Permutation StabilizerChain::Work::take() { return Permutation::from_images(std::move(img)); }

void StabilizerChain::strip(const Level& lvl, std::size_t pos, Work& w) const {
  while (lvl.parent[pos] >= 0) {
    std::uint32_t s = lvl.label[pos];
    auto [lo, hi] = strong_support_[s];
    auto sinv = strong_inv_[s].images();
    w.buf.assign(w.inv.begin() + lo, w.inv.begin() + hi);
    for (Point y = lo; y < hi; ++y) {
      Point x = w.buf[y - lo];
      Point z = sinv[y];
      w.img[x] = z;
      w.inv[z] = x;
    }
    pos = static_cast<std::size_t>(lvl.parent[pos]);
  }
}

Permutation StabilizerChain::representative(const Level& lvl, std::size_t pos) const {
  std::vector<std::uint32_t> path;
  while (lvl.parent[pos] >= 0) {
    path.push_back(lvl.label[pos]);
    pos = static_cast<std::size_t>(lvl.parent[pos]);
  }
  Permutation u(degree());
  Permutation tmp;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    compose_into(tmp, u, strong_[*it]);
    std::swap(u, tmp);
  }
  return u;
}

std::size_t StabilizerChain::sift_from(std::size_t start, Work& w) const {
  for (std::size_t i = start; i < levels_.size(); ++i) {
    const Level& lvl = levels_[i];
    Point x = w.img[lvl.base.index * lvl.block_size] / lvl.block_size;
    if (x == lvl.base.index) continue;
    std::int64_t q = lvl.find(x);
    if (q < 0) return i;
    strip(lvl, static_cast<std::size_t>(q), w);
  }
  return levels_.size();
}

// ---------------------------------------------------------------------------
// Queries

BigInt StabilizerChain::order() const {
  BigInt result = 1;
  for (const auto& lvl : levels_) {
    if (lvl.orbit.size() > 1) result *= lvl.orbit.size();
  }
  return result;
}

LogOrder StabilizerChain::log_order(std::uint64_t base) const {
  BigInt ord = order();
  LogOrder out;
  out.exact = exact_log(ord, base, out.exponent);
  out.value = log_of(ord) / std::log(static_cast<double>(base));
  if (out.exact) out.value = static_cast<double>(out.exponent);
  return out;
}

bool StabilizerChain::contains(const Permutation& p) const {
  if (p.degree() != degree()) {
    throw DegreeMismatch("membership: permutation of degree " + std::to_string(p.degree()) +
                         ", chain of degree " + std::to_string(degree()));
  }
  Work w;
  w.load(p);
  if (sift_from(0, w) != levels_.size()) return false;
  for (std::size_t x = 0; x < w.img.size(); ++x) {
    if (w.img[x] != x) return false;
  }
  return true;
}

std::vector<BasePoint> StabilizerChain::base() const {
  std::vector<BasePoint> out;
  out.reserve(levels_.size());
  for (const auto& lvl : levels_) out.push_back(lvl.base);
  return out;
}

std::vector<std::size_t> StabilizerChain::transversal_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(levels_.size());
  for (const auto& lvl : levels_) out.push_back(lvl.orbit.size());
  return out;
}

std::vector<Permutation> StabilizerChain::stabilizer_generators(std::size_t k) const {
  std::vector<Permutation> out;
  for (std::size_t s = 0; s < strong_.size(); ++s) {
    if (depth_[s] >= k) out.push_back(strong_[s]);
  }
  return out;
}

std::optional<Permutation> StabilizerChain::transversal_element(std::size_t level,
                                                                Point block) const {
  const Level& lvl = levels_.at(level);
  std::int64_t q = lvl.find(block);
  if (q < 0) return std::nullopt;
  return representative(lvl, static_cast<std::size_t>(q));
}

}  // namespace treedim
