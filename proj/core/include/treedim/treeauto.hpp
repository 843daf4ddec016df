#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "treedim/chain.hpp"
#include "treedim/permutation.hpp"
#include "treedim/tree.hpp"

namespace treedim {

/// Finite-state wreath recursion: every state carries a root permutation in
/// the top group H <= Sym(m) and m section states.
///
/// State 0 is the identity state, named "1". Machines are immutable once
/// built; elements share them through `std::shared_ptr`.
class Machine {
 public:
  using StateId = std::uint32_t;
  static constexpr StateId kIdentity = 0;
  static constexpr const char* kIdentityName = "1";

  struct State {
    std::string name;
    Permutation root;             ///< permutation of {0..m-1}
    std::vector<StateId> sections;
  };

  /// Declares a machine; sections refer to state names. Throws
  /// ValidationError for unknown names, bad roots or roots outside H.
  struct StateDecl {
    std::string name;
    Permutation root;
    std::vector<std::string> sections;
  };
  static std::shared_ptr<const Machine> create(std::size_t m,
                                               std::vector<Permutation> top_generators,
                                               const std::vector<StateDecl>& states);

  std::size_t m() const { return m_; }
  const std::vector<Permutation>& top_generators() const { return top_generators_; }
  const StabilizerChain& top_group() const { return top_; }
  std::size_t state_count() const { return states_.size(); }
  const State& state(StateId id) const { return states_.at(id); }
  const Permutation& root_inverse(StateId id) const { return root_inv_.at(id); }
  std::optional<StateId> find(const std::string& name) const;

  /// Copy of this machine with extra states appended. New states may refer to
  /// each other by name and to existing states.
  std::shared_ptr<const Machine> extended(const std::vector<StateDecl>& states) const;

  /// Disjoint union: states of `other` are appended, renamed on collision.
  /// Returns the merged machine and the id offset applied to `other`'s states.
  std::pair<std::shared_ptr<const Machine>, StateId> merged_with(const Machine& other) const;

 private:
  Machine() = default;
  void append(const std::vector<StateDecl>& states);

  std::size_t m_ = 0;
  std::vector<Permutation> top_generators_;
  StabilizerChain top_;
  std::vector<State> states_;
  std::vector<Permutation> root_inv_;
  std::map<std::string, StateId> by_name_;
};

using MachinePtr = std::shared_ptr<const Machine>;

/// A group element given lazily as a word over machine states and inverses.
class Element {
 public:
  struct Letter {
    Machine::StateId state;
    bool inverse = false;
    friend bool operator==(const Letter&, const Letter&) = default;
    friend auto operator<=>(const Letter&, const Letter&) = default;
  };

  Element() = default;
  Element(MachinePtr machine, std::vector<Letter> word);

  static Element identity(MachinePtr machine) { return Element(std::move(machine), {}); }
  static Element state(MachinePtr machine, Machine::StateId id, bool inverse = false);
  /// Parses words such as "a*b^-1*a"; "1" and "" denote the identity.
  static Element parse(MachinePtr machine, const std::string& text);

  const MachinePtr& machine() const { return machine_; }
  const std::vector<Letter>& word() const { return word_; }
  std::size_t m() const { return machine_->m(); }
  bool is_trivial_word() const { return word_.empty(); }

  /// Permutation of {0..m-1} induced at the root.
  Permutation root_permutation() const;
  std::string to_string() const;

  /// Re-express over a machine that contains this element's machine as a prefix
  /// of states at the given id offset.
  Element rebased(MachinePtr machine, Machine::StateId offset) const;

 private:
  MachinePtr machine_;
  std::vector<Letter> word_;
};

/// The section g|_x at a child letter x (0-based).
Element section(const Element& e, std::size_t child);
/// The section g|_v.
Element section(const Element& e, const Vertex& v);

/// The image of vertex v (same level) under e.
Vertex act(const Element& e, const Vertex& v);

/// Action on the m^n leaves of level n. Throws ResourceLimit beyond `cap`.
Permutation evaluate(const Element& e, std::size_t n, std::size_t cap = kDefaultPointCap);

/// Word concatenation (machines are merged if they differ).
Element multiply(const Element& e, const Element& f);
Element inverse(const Element& e);

struct NormalizeBudget {
  std::size_t max_states = 100'000;
};

/// Builds the product machine whose new states are the words reachable as
/// sections of `e`, and returns `e` as a single state of that machine.
/// Throws StateExplosion when more than `budget.max_states` words appear.
Element normalize(const Element& e, NormalizeBudget budget = {});

struct SelfSimilarityFailure {
  std::size_t generator;
  Vertex vertex;
};

struct SelfSimilarityReport {
  std::size_t depth = 0;
  bool passed = true;
  std::vector<SelfSimilarityFailure> failures;
  /// A pass is a necessary condition only.
  std::string note;
};

/// For every generator g and vertex v with 1 <= l(v) <= n, tests whether
/// g|_v acts on level n - l(v) like an element of <generators>.
SelfSimilarityReport self_similarity_check(const std::vector<Element>& generators,
                                           std::size_t n,
                                           std::size_t cap = kDefaultPointCap);

/// Brings elements over possibly different machines onto one merged machine.
std::vector<Element> unify_machines(const std::vector<Element>& elements);

}  // namespace treedim
