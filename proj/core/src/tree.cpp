#include "treedim/tree.hpp"

#include <stdexcept>

#include "treedim/errors.hpp"

namespace treedim {

std::size_t checked_pow(std::size_t m, std::size_t n, std::size_t cap) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (result > cap / m) {
      throw ResourceLimit(std::to_string(m) + "^" + std::to_string(n) + " exceeds the cap of " +
                          std::to_string(cap) + " points");
    }
    result *= m;
  }
  if (result > cap) {
    throw ResourceLimit(std::to_string(m) + "^" + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(cap) + " points");
  }
  return result;
}

Vertex::Vertex(std::size_t m, std::vector<Letter> word) : m_(m), word_(std::move(word)) {
  if (m < 2) throw std::invalid_argument("tree degree must be at least 2");
  for (Letter x : word_) {
    if (x < 1 || x > m) {
      throw std::invalid_argument("letter " + std::to_string(x) + " outside 1.." +
                                  std::to_string(m));
    }
  }
}

Vertex Vertex::parse(std::size_t m, std::string_view text) {
  if (m > 9) throw ParseError("vertex syntax supports m <= 9 only");
  std::vector<Letter> word;
  for (char c : text) {
    if (c < '1' || c > '9' || static_cast<std::size_t>(c - '0') > m) {
      throw ParseError("invalid letter '" + std::string(1, c) + "' in vertex \"" +
                       std::string(text) + "\" for m = " + std::to_string(m));
    }
    word.push_back(static_cast<Letter>(c - '0'));
  }
  return Vertex(m, std::move(word));
}

Vertex Vertex::at(std::size_t m, std::size_t level, std::size_t index) {
  std::vector<Letter> word(level);
  for (std::size_t i = level; i-- > 0;) {
    word[i] = static_cast<Letter>(index % m + 1);
    index /= m;
  }
  if (index != 0) throw std::out_of_range("vertex index exceeds the level size");
  return Vertex(m, std::move(word));
}

std::size_t Vertex::index() const {
  std::size_t idx = 0;
  for (Letter x : word_) idx = idx * m_ + (x - 1);
  return idx;
}

Vertex Vertex::child(Letter x) const {
  auto w = word_;
  w.push_back(x);
  return Vertex(m_, std::move(w));
}

Vertex Vertex::parent() const {
  if (word_.empty()) throw std::logic_error("the root has no parent");
  return Vertex(m_, {word_.begin(), word_.end() - 1});
}

Vertex Vertex::concat(const Vertex& suffix) const {
  if (suffix.m_ != m_) throw std::invalid_argument("concat: different tree degrees");
  auto w = word_;
  w.insert(w.end(), suffix.word_.begin(), suffix.word_.end());
  return Vertex(m_, std::move(w));
}

std::string Vertex::to_string() const {
  std::string s;
  for (Letter x : word_) {
    if (m_ <= 9) {
      s += static_cast<char>('0' + x);
    } else {
      if (!s.empty()) s += '.';
      s += std::to_string(x);
    }
  }
  return s;
}

LeafRange leaf_index(const Vertex& v, std::size_t n) {
  if (v.level() > n) {
    throw LevelMismatch("vertex \"" + v.to_string() + "\" lies below level " +
                        std::to_string(n));
  }
  std::size_t span = 1;
  for (std::size_t i = v.level(); i < n; ++i) span *= v.m();
  std::size_t lo = v.index() * span;
  return {lo, lo + span};
}

std::vector<Vertex> level_vertices(std::size_t m, std::size_t n, std::size_t cap) {
  std::size_t count = checked_pow(m, n, cap);
  std::vector<Vertex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(Vertex::at(m, n, i));
  return out;
}

}  // namespace treedim
