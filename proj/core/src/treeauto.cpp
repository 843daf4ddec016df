#include "treedim/treeauto.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "treedim/errors.hpp"

namespace treedim {

// ---------------------------------------------------------------------------
// Machine

MachinePtr Machine::create(std::size_t m, std::vector<Permutation> top_generators,
                           const std::vector<StateDecl>& states) {
  if (m < 2) throw ValidationError("machine degree m must be at least 2");
  for (const auto& h : top_generators) {
    if (h.degree() != m) {
      throw ValidationError("top group generator " + h.to_cycle_string(1) +
                            " is not a permutation of 1.." + std::to_string(m));
    }
  }
  std::shared_ptr<Machine> machine(new Machine());
  machine->m_ = m;
  machine->top_generators_ = std::move(top_generators);
  machine->top_ = StabilizerChain::build(m, machine->top_generators_);
  machine->states_.push_back({kIdentityName, Permutation(m), std::vector<StateId>(m, kIdentity)});
  machine->root_inv_.push_back(Permutation(m));
  machine->by_name_.emplace(kIdentityName, kIdentity);
  machine->append(states);
  return machine;
}

void Machine::append(const std::vector<StateDecl>& decls) {
  StateId next = static_cast<StateId>(states_.size());
  for (const auto& d : decls) {
    if (d.name.empty()) throw ValidationError("state with empty name");
    if (!by_name_.emplace(d.name, next++).second) {
      throw ValidationError("duplicate state name \"" + d.name + "\"");
    }
  }
  for (const auto& d : decls) {
    if (d.root.degree() != m_) {
      throw ValidationError("state \"" + d.name + "\": root is not a permutation of 1.." +
                            std::to_string(m_));
    }
    if (!top_.contains(d.root)) {
      throw ValidationError("state \"" + d.name + "\": root " + d.root.to_cycle_string(1) +
                            " is outside the declared top group");
    }
    if (d.sections.size() != m_) {
      throw ValidationError("state \"" + d.name + "\": expected " + std::to_string(m_) +
                            " sections, got " + std::to_string(d.sections.size()));
    }
    State st{d.name, d.root, {}};
    for (const auto& sec : d.sections) {
      auto it = by_name_.find(sec);
      if (it == by_name_.end()) {
        throw ValidationError("state \"" + d.name + "\": unresolved section state \"" + sec +
                              "\"");
      }
      st.sections.push_back(it->second);
    }
    root_inv_.push_back(d.root.inverse());
    states_.push_back(std::move(st));
  }
}

std::optional<Machine::StateId> Machine::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

MachinePtr Machine::extended(const std::vector<StateDecl>& states) const {
  std::shared_ptr<Machine> copy(new Machine(*this));
  copy->append(states);
  return copy;
}

std::pair<MachinePtr, Machine::StateId> Machine::merged_with(const Machine& other) const {
  if (other.m_ != m_) throw ValidationError("cannot merge machines of different degree");
  std::shared_ptr<Machine> merged(new Machine(*this));
  for (const auto& h : other.top_generators_) {
    if (!merged->top_.contains(h)) {
      merged->top_generators_.push_back(h);
      merged->top_.add_generator(h);
    }
  }
  auto offset = static_cast<StateId>(states_.size() - 1);
  for (StateId id = 1; id < other.states_.size(); ++id) {
    const State& src = other.states_[id];
    std::string name = src.name;
    while (merged->by_name_.contains(name)) name += "'";
    State st{name, src.root, {}};
    for (StateId s : src.sections) st.sections.push_back(s == kIdentity ? kIdentity : s + offset);
    merged->by_name_.emplace(name, static_cast<StateId>(merged->states_.size()));
    merged->root_inv_.push_back(src.root.inverse());
    merged->states_.push_back(std::move(st));
  }
  return {merged, offset};
}

// ---------------------------------------------------------------------------
// Element

namespace {

void reduce(std::vector<Element::Letter>& word) {
  std::vector<Element::Letter> out;
  out.reserve(word.size());
  for (const auto& l : word) {
    if (l.state == Machine::kIdentity) continue;
    if (!out.empty() && out.back().state == l.state && out.back().inverse != l.inverse) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  word = std::move(out);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Element::Element(MachinePtr machine, std::vector<Letter> word)
    : machine_(std::move(machine)), word_(std::move(word)) {
  if (!machine_) throw std::invalid_argument("element without a machine");
  for (const auto& l : word_) {
    if (l.state >= machine_->state_count()) throw std::out_of_range("element: unknown state id");
  }
  reduce(word_);
}

Element Element::state(MachinePtr machine, Machine::StateId id, bool inverse) {
  return Element(std::move(machine), {{id, inverse}});
}

Element Element::parse(MachinePtr machine, const std::string& text) {
  std::vector<Letter> word;
  std::string body = trim(text);
  if (body.empty() || body == Machine::kIdentityName) return Element(std::move(machine), {});
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t star = body.find('*', start);
    std::string token = trim(body.substr(start, star == std::string::npos ? std::string::npos
                                                                          : star - start));
    if (token.empty()) throw ParseError("empty factor in word \"" + text + "\"");
    long exponent = 1;
    std::string name = token;
    if (auto caret = token.find('^'); caret != std::string::npos) {
      name = trim(token.substr(0, caret));
      std::string exp = trim(token.substr(caret + 1));
      try {
        std::size_t used = 0;
        exponent = std::stol(exp, &used);
        if (used != exp.size()) throw std::invalid_argument(exp);
      } catch (const std::exception&) {
        throw ParseError("bad exponent \"" + exp + "\" in word \"" + text + "\"");
      }
    }
    auto id = machine->find(name);
    if (!id) throw ValidationError("word \"" + text + "\" uses unknown state \"" + name + "\"");
    for (long k = 0; k < std::labs(exponent); ++k) word.push_back({*id, exponent < 0});
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return Element(std::move(machine), std::move(word));
}

Permutation Element::root_permutation() const {
  Permutation p(machine_->m());
  for (const auto& l : word_) {
    p = p * (l.inverse ? machine_->root_inverse(l.state) : machine_->state(l.state).root);
  }
  return p;
}

std::string Element::to_string() const {
  if (word_.empty()) return Machine::kIdentityName;
  std::string out;
  for (const auto& l : word_) {
    if (!out.empty()) out += '*';
    out += machine_->state(l.state).name;
    if (l.inverse) out += "^-1";
  }
  return out;
}

Element Element::rebased(MachinePtr machine, Machine::StateId offset) const {
  std::vector<Letter> w;
  w.reserve(word_.size());
  for (const auto& l : word_) {
    w.push_back({l.state == Machine::kIdentity ? Machine::kIdentity : l.state + offset, l.inverse});
  }
  return Element(std::move(machine), std::move(w));
}

// ---------------------------------------------------------------------------
// Operations

Element section(const Element& e, std::size_t child) {
  const Machine& mc = *e.machine();
  if (child >= mc.m()) throw std::out_of_range("section: child letter out of range");
  std::vector<Element::Letter> out;
  out.reserve(e.word().size());
  Point cur = static_cast<Point>(child);
  for (const auto& l : e.word()) {
    const auto& st = mc.state(l.state);
    if (!l.inverse) {
      out.push_back({st.sections[cur], false});
      cur = st.root(cur);
    } else {
      Point prev = mc.root_inverse(l.state)(cur);
      out.push_back({st.sections[prev], true});
      cur = prev;
    }
  }
  return Element(e.machine(), std::move(out));
}

Element section(const Element& e, const Vertex& v) {
  if (v.m() != e.m()) throw std::invalid_argument("section: vertex of a different tree");
  Element cur = e;
  for (auto x : v.word()) {
    if (cur.is_trivial_word()) break;
    cur = section(cur, x - 1);
  }
  return cur;
}

Vertex act(const Element& e, const Vertex& v) {
  if (v.m() != e.m()) throw std::invalid_argument("act: vertex of a different tree");
  std::vector<Vertex::Letter> out;
  Element cur = e;
  for (auto x : v.word()) {
    out.push_back(static_cast<Vertex::Letter>(cur.root_permutation()(x - 1) + 1));
    cur = section(cur, x - 1);
  }
  return Vertex(v.m(), std::move(out));
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(const Machine& mc) : mc_(mc) {}

  const Permutation& state_perm(Machine::StateId s, std::size_t level) {
    std::uint64_t key = (static_cast<std::uint64_t>(s) << 8) | level;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::size_t m = mc_.m();
    std::size_t size = 1;
    for (std::size_t i = 0; i < level; ++i) size *= m;
    std::vector<Point> images(size);
    if (s == Machine::kIdentity || level == 0) {
      for (std::size_t i = 0; i < size; ++i) images[i] = static_cast<Point>(i);
    } else {
      const auto& st = mc_.state(s);
      std::size_t bs = size / m;
      for (std::size_t c = 0; c < m; ++c) {
        std::size_t dst = st.root(static_cast<Point>(c)) * bs;
        Machine::StateId sec = st.sections[c];
        if (sec == Machine::kIdentity) {
          for (std::size_t i = 0; i < bs; ++i) images[c * bs + i] = static_cast<Point>(dst + i);
        } else {
          const Permutation& sub = state_perm(sec, level - 1);
          for (std::size_t i = 0; i < bs; ++i) {
            images[c * bs + i] = static_cast<Point>(dst + sub(static_cast<Point>(i)));
          }
        }
      }
    }
    return memo_.emplace(key, Permutation::from_images(std::move(images))).first->second;
  }

 private:
  const Machine& mc_;
  std::unordered_map<std::uint64_t, Permutation> memo_;
};

}  // namespace

Permutation evaluate(const Element& e, std::size_t n, std::size_t cap) {
  std::size_t degree = checked_pow(e.m(), n, cap);
  if (n > 200) throw ResourceLimit("evaluate: level too deep");
  Permutation result(degree);
  Permutation tmp;
  Evaluator ev(*e.machine());
  for (const auto& l : e.word()) {
    const Permutation& p = ev.state_perm(l.state, n);
    if (l.inverse) {
      compose_into(tmp, result, p.inverse());
    } else {
      compose_into(tmp, result, p);
    }
    std::swap(result, tmp);
  }
  return result;
}

std::vector<Element> unify_machines(const std::vector<Element>& elements) {
  if (elements.empty()) return {};
  MachinePtr merged = elements.front().machine();
  std::vector<std::pair<const Machine*, Machine::StateId>> offsets{{merged.get(), 0}};
  for (const auto& e : elements) {
    const Machine* mc = e.machine().get();
    bool known = std::any_of(offsets.begin(), offsets.end(),
                             [&](const auto& p) { return p.first == mc; });
    if (known) continue;
    auto [next, off] = merged->merged_with(*mc);
    merged = next;
    offsets.emplace_back(mc, off);
  }
  if (offsets.size() == 1) return elements;
  std::vector<Element> out;
  for (const auto& e : elements) {
    auto it = std::find_if(offsets.begin(), offsets.end(),
                           [&](const auto& p) { return p.first == e.machine().get(); });
    out.push_back(e.rebased(merged, it->second));
  }
  return out;
}

Element multiply(const Element& e, const Element& f) {
  if (e.machine() == f.machine()) {
    auto w = e.word();
    w.insert(w.end(), f.word().begin(), f.word().end());
    return Element(e.machine(), std::move(w));
  }
  auto both = unify_machines({e, f});
  auto w = both[0].word();
  w.insert(w.end(), both[1].word().begin(), both[1].word().end());
  return Element(both[0].machine(), std::move(w));
}

Element inverse(const Element& e) {
  std::vector<Element::Letter> w(e.word().rbegin(), e.word().rend());
  for (auto& l : w) l.inverse = !l.inverse;
  return Element(e.machine(), std::move(w));
}

Element normalize(const Element& e, NormalizeBudget budget) {
  using Word = std::vector<Element::Letter>;
  const MachinePtr& mc = e.machine();
  auto is_state = [](const Word& w) { return w.empty() || (w.size() == 1 && !w[0].inverse); };

  std::map<Word, std::string> names;
  std::deque<Word> queue;
  std::vector<Machine::StateDecl> decls;
  std::set<std::string> taken;

  auto name_of = [&](const Word& w) -> std::string {
    if (w.empty()) return Machine::kIdentityName;
    if (w.size() == 1 && !w[0].inverse) return mc->state(w[0].state).name;
    if (auto it = names.find(w); it != names.end()) return it->second;
    if (names.size() >= budget.max_states) {
      throw StateExplosion("normalize: more than " + std::to_string(budget.max_states) +
                           " section words");
    }
    std::string name = "[" + Element(mc, w).to_string() + "]";
    while (mc->find(name) || taken.contains(name)) name += "'";
    taken.insert(name);
    names.emplace(w, name);
    queue.push_back(w);
    return name;
  };

  std::string top = name_of(e.word());
  while (!queue.empty()) {
    Word w = std::move(queue.front());
    queue.pop_front();
    Element cur(mc, w);
    Machine::StateDecl d{names.at(w), cur.root_permutation(), {}};
    for (std::size_t x = 0; x < mc->m(); ++x) d.sections.push_back(name_of(section(cur, x).word()));
    decls.push_back(std::move(d));
  }
  if (is_state(e.word()) && decls.empty()) return e;
  MachinePtr ext = mc->extended(decls);
  return Element::state(ext, *ext->find(top));
}

SelfSimilarityReport self_similarity_check(const std::vector<Element>& generators,
                                           std::size_t n, std::size_t cap) {
  SelfSimilarityReport report;
  report.depth = n;
  report.note =
      "passing at a finite depth is necessary but not sufficient for self-similarity";
  if (generators.empty()) return report;
  auto gens = unify_machines(generators);
  std::size_t m = gens.front().m();
  checked_pow(m, n, cap);

  std::vector<StabilizerChain> chains;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Permutation> perms;
    for (const auto& g : gens) perms.push_back(evaluate(g, k, cap));
    chains.push_back(StabilizerChain::build(BlockHierarchy::regular_tree(m, k), perms));
  }
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    for (std::size_t l = 1; l <= n; ++l) {
      std::size_t k = n - l;
      for (const auto& v : level_vertices(m, l, cap)) {
        Element s = section(gens[gi], v);
        if (k == 0) continue;
        if (!chains[k].contains(evaluate(s, k, cap))) {
          report.passed = false;
          report.failures.push_back({gi, v});
        }
      }
    }
  }
  return report;
}

}  // namespace treedim
