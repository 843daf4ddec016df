#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "treedim/bigint.hpp"
#include "treedim/chain.hpp"
#include "treedim/constructions.hpp"
#include "treedim/permgroup.hpp"
#include "treedim/tree.hpp"

namespace treedim {

struct AnalysisOptions {
  std::size_t cap = kDefaultPointCap;
  ChainBudget chain;
  SearchBudget search;
  /// Worker threads for per-level maps; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

/// log_m of a positive integer. When x = p^a for a prime p the exponent is
/// exact: log_m x = a / log_p m (den_note "log_p(m)", or "1" when p = m).
struct LogRecord {
  bool exact = false;
  std::uint64_t prime = 0;
  std::uint64_t exponent = 0;
  double value = 0.0;  ///< log_m x
};
LogRecord log_record(const BigInt& x, std::uint64_t m);

/// Generators of pi_n(G) as permutations of the m^n leaves.
std::vector<Permutation> quotient_generators(const GroupSpec& spec, std::size_t n,
                                             std::size_t cap = kDefaultPointCap);
/// pi_n(G) as a chain over the level-n tree hierarchy.
StabilizerChain quotient(const GroupSpec& spec, std::size_t n, const AnalysisOptions& opts = {});

/// Thread-safe cache of quotient chains keyed by (spec hash, n), with an
/// optional on-disk store of orders (decimal strings) for the same keys.
class QuotientStore {
 public:
  explicit QuotientStore(AnalysisOptions opts = {}, std::filesystem::path cache_dir = {});

  const AnalysisOptions& options() const { return opts_; }
  std::shared_ptr<const StabilizerChain> chain(const GroupSpec& spec, std::size_t n);
  /// Order of pi_n(G), read from the disk store when present.
  BigInt order(const GroupSpec& spec, std::size_t n);
  /// Derived subgroup of pi_n(G), memoized alongside the chain.
  std::shared_ptr<const StabilizerChain> derived(const GroupSpec& spec, std::size_t n);
  std::size_t disk_hits() const { return disk_hits_; }

 private:
  std::optional<BigInt> read_order(const std::string& key) const;
  void write_order(const std::string& key, const std::string& hash, std::size_t n,
                   const BigInt& order) const;

  AnalysisOptions opts_;
  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const StabilizerChain>>> chains_;
  std::map<std::string, std::shared_ptr<const StabilizerChain>> derived_;
  std::size_t disk_hits_ = 0;
};

/// Runs f(n) for n in [lo, hi] on up to `jobs` threads; results in level order.
template <typename T>
std::vector<T> map_levels(std::size_t lo, std::size_t hi, unsigned jobs,
                          const std::function<T(std::size_t)>& f);

// ---------------------------------------------------------------------------
// Dimension sequences

struct DimensionLevel {
  std::size_t level = 0;
  BigInt order;                 ///< |pi_n(G)|
  LogRecord logm_index;         ///< log_m |G : St_G(n)|
  double logm_wreath = 0.0;     ///< (m^n - 1)/(m - 1) * log_m |H|
  double ratio = 0.0;
  /// ratio as an exact fraction when |pi_n(G)| and |H| are powers of one prime.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> ratio_exact;
};

struct DimensionSequence {
  std::string group;
  std::size_t m = 2;
  BigInt top_order;  ///< |H| for the ambient W_H
  std::vector<DimensionLevel> levels;
  std::size_t window = 3;
  double tolerance = 0.02;
  double max_oscillation = 0.0;  ///< over the last `window` consecutive differences
  bool strong_looking = false;   ///< heuristic only
  /// Set when a ResourceLimit stopped the sequence early (with allow_truncation).
  bool truncated = false;
  std::string truncation_reason;
};

/// Ratios for n = 1..max_level. With `allow_truncation` a ResourceLimit ends
/// the sequence at the last completed level instead of propagating.
DimensionSequence dimension_sequence(QuotientStore& store, const GroupSpec& spec,
                                     std::size_t max_level, std::size_t window = 3,
                                     double tolerance = 0.02, bool allow_truncation = false);

// ---------------------------------------------------------------------------
// Abelianization and orbits

struct AbelianizationReport {
  std::size_t level = 0;
  BigInt order;
  BigInt index;              ///< |G_n : G_n'|
  LogRecord logm_index;
  double log2_index = 0.0;
  /// #X - 1 - log2 |G_n:G_n'| for X the m^n leaves; never negative.
  double easy_bound_slack = 0.0;
  bool easy_bound_holds = true;  ///< exact: index <= 2^(#X-1)
};

AbelianizationReport abelianization_index(QuotientStore& store, const GroupSpec& spec,
                                          std::size_t n);

/// log2 |G:G'| <= #X - 1 checked exactly for the group generated by `gens`.
AbelianizationReport abelianization_of(std::span<const Permutation> gens, std::size_t degree,
                                       std::uint64_t m = 2);

struct OrbitStats {
  std::size_t level = 0;   ///< n
  std::size_t window = 1;  ///< k
  std::size_t m = 2;
  std::size_t orbits = 0;               ///< #O_n
  std::size_t a_orbits = 0;             ///< #A_n
  std::size_t b_orbits = 0;             ///< #B_n
  std::size_t predecessor_orbits = 0;   ///< #O_{n-k}
  std::size_t a_predecessors = 0;       ///< #P_{n-k}
  /// branching[b] = number of level-(n-k) orbits splitting into b orbits.
  std::map<std::size_t, std::size_t> branching;
  /// Some predecessor branches into a count strictly between m^k/2 and m^k.
  bool classification_gap = false;
  /// #A_n + 2 #B_n <= m^k #O_{n-k}
  bool counting_inequality = true;
  AbelianizationReport abelianization;
  /// log_m|G_n:G_n'| / m^n and the bound m^-k + #B_n/m^n.
  double value = 0.0;
  double bound = 0.0;
  bool bound_exact = false;  ///< compared as integers: a <= m^(n-k) + #B_n
  bool bound_holds = true;
  std::vector<Orbit> level_orbits;     ///< O_n
  std::vector<std::size_t> ancestor;   ///< O_n index -> O_{n-k} index
  std::vector<bool> in_a;              ///< O_n index -> member of A_n
};

OrbitStats orbit_stats(QuotientStore& store, const GroupSpec& spec, std::size_t n,
                       std::size_t k);

struct PerfectnessRow {
  std::size_t level = 0;
  double value = 0.0;
  double bound = 0.0;
  bool exact = false;
  std::uint64_t value_num = 0;  ///< value = value_num / m^n when exact
  std::uint64_t bound_num = 0;  ///< bound = bound_num / m^n when exact
  bool holds = true;
};

struct PerfectnessScan {
  std::string group;
  std::size_t m = 2;
  std::size_t window = 1;
  std::vector<PerfectnessRow> rows;
  bool bound_holds = true;
  /// First level from which the values strictly decrease (0 if never).
  std::size_t decreasing_from = 0;
};

PerfectnessScan perfectness_scan(QuotientStore& store, const GroupSpec& spec,
                                 std::size_t max_level, std::size_t k);

/// log|G_n:G_n'| <= sum over the orbits O of log|G_n^O : (G_n^O)'|, compared
/// exactly as |G_n:G_n'| <= product of the orbit indices.
struct DecompositionCheck {
  std::size_t level = 0;
  std::size_t parts = 0;
  BigInt index;
  BigInt product;
  bool holds = true;
};
DecompositionCheck invariant_decomposition(QuotientStore& store, const GroupSpec& spec,
                                           std::size_t n);

/// The action on the A_n orbits has the same abelianization as the action of
/// G_{n-k} on their predecessors P_{n-k}.
struct AIdentification {
  std::size_t level = 0;
  std::size_t window = 1;
  std::size_t a_points = 0;
  std::size_t p_points = 0;
  BigInt a_index;
  BigInt p_index;
  bool holds = true;
};
AIdentification a_identification(QuotientStore& store, const GroupSpec& spec, std::size_t n,
                                 std::size_t k);

/// Entry l is true iff pi_l(G) is transitive on level l, for l = 0..n.
std::vector<bool> level_transitivity(QuotientStore& store, const GroupSpec& spec,
                                     std::size_t n);

// ---------------------------------------------------------------------------
// Rigid stabilizers

struct LocalRigid {
  Vertex vertex;
  BigInt order;
  LogRecord logm_order;
  double ratio = 0.0;  ///< log |rist quotient| / log |pi_n(G)|
  std::vector<Permutation> generators;
};

/// Elements of pi_n(G) fixing every leaf outside the subtree at v.
LocalRigid local_rigid(QuotientStore& store, const GroupSpec& spec, const Vertex& v,
                       std::size_t n);

struct RigidReport {
  std::size_t outer_level = 0;  ///< k
  std::size_t inner_level = 0;  ///< n
  std::vector<LocalRigid> vertices;
  BigInt order;             ///< order of the group generated by all local rigid groups
  BigInt product;           ///< product of the local orders
  bool product_holds = true;
  bool equal_orders = true;  ///< all local orders agree
  double ratio = 0.0;        ///< log |Rist quotient| / log |pi_n(G)|
};

RigidReport rigid_level(QuotientStore& store, const GroupSpec& spec, std::size_t k,
                        std::size_t n);

/// Kernel of the action of `group` (a chain over the regular tree hierarchy)
/// on level k: the quotient St(k)/St(n).
StabilizerChain level_stabilizer(const StabilizerChain& group, std::size_t k);

// ---------------------------------------------------------------------------
// The G_K verifier

struct GKCheck {
  std::string id;     ///< "a" .. "f"
  std::string title;
  bool passed = true;
  std::string witness;  ///< first failing level and evidence
};

struct GKLevel {
  std::size_t level = 0;
  BigInt order;
  BigInt expected_order;  ///< |H| * |pi_{n-1}(K)|
  BigInt center_order;
  BigInt expected_center_order;
  double ratio = 0.0;  ///< dimension ratio in W_H
};

struct GKReport {
  std::string group;
  std::vector<GKLevel> levels;
  std::vector<GKCheck> checks;
  bool passed() const;
};

GKReport verify_GK(QuotientStore& store, const GroupSpec& gk, std::size_t max_level);

// ---------------------------------------------------------------------------

template <typename T>
std::vector<T> map_levels(std::size_t lo, std::size_t hi, unsigned jobs,
                          const std::function<T(std::size_t)>& f) {
  std::vector<T> out;
  if (hi < lo) return out;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs == 1) {
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(f(n));
    return out;
  }
  std::vector<std::future<T>> pending;
  for (std::size_t n = lo; n <= hi; ++n) {
    pending.push_back(std::async(std::launch::async, f, n));
    if (pending.size() >= jobs) {
      out.push_back(pending.front().get());
      pending.erase(pending.begin());
    }
  }
  for (auto& p : pending) out.push_back(p.get());
  return out;
}

}  // namespace treedim
