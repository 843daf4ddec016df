#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "treedim/permutation.hpp"
#include "treedim/tree.hpp"
#include "treedim/treeauto.hpp"

namespace treedim {

enum class Construction { plain, rooted, diagonal, gk, wreath_full };

const char* construction_tag(Construction c);
/// Inverse of construction_tag ("plain", "rooted", "diagonal", "GK", "wreath_full").
Construction parse_construction_tag(const std::string& tag);

struct GroupSpec;
using GroupSpecPtr = std::shared_ptr<const GroupSpec>;

/// Declarative description of a group acting on the m-adic tree.
///
/// `plain` groups are generated by `generators` over `machine`. The other
/// constructions derive their generators from `h` and/or `k`:
///   rooted       rooted copies of `h`
///   diagonal     d(g) for each generator g of `k`
///   GK           rooted `h` together with diagonal(`k`)
///   wreath_full  level-dependent generators of the iterated wreath product of `h`
/// Generators of derived constructions may depend on the level (wreath_full
/// has no finite generating set), so use generators_at() rather than
/// `generators` directly.
struct GroupSpec {
  std::string name;
  std::size_t m = 2;
  Construction construction = Construction::plain;
  MachinePtr machine;                ///< plain only
  std::vector<Element> generators;   ///< plain only
  std::vector<Permutation> h;        ///< rooted, GK, wreath_full
  GroupSpecPtr k;                    ///< diagonal, GK

  /// Top group: the machine's for plain specs, <h> (and K's top) otherwise.
  std::vector<Permutation> top_generators() const;
};

/// Generators whose images on level n generate pi_n of the group.
std::vector<Element> generators_at(const GroupSpec& spec, std::size_t n,
                                   std::size_t cap = kDefaultPointCap);

/// One rooted element per non-identity generator of H.
std::vector<Element> rooted_generators(std::size_t m, const std::vector<Permutation>& h);

/// The element with trivial root and every first-level section equal to k.
Element diagonal(const Element& k);
/// diagonal() of each element, sharing one machine.
std::vector<Element> diagonal(const std::vector<Element>& ks);

/// Rooted-at-vertex generators: h acting at v, trivially elsewhere, for every
/// vertex v with l(v) < n and every generator h.
std::vector<Element> wreath_full_generators(std::size_t m, const std::vector<Permutation>& h,
                                            std::size_t n, std::size_t cap = kDefaultPointCap);

/// G_K = <H, D_m(K)>. Throws NotTransitive when H is intransitive on {1..m}.
GroupSpec build_GK(std::size_t m, const std::vector<Permutation>& h, GroupSpecPtr k,
                   std::string name = {});

GroupSpec make_plain(std::string name, MachinePtr machine, std::vector<Element> generators);
GroupSpec make_rooted(std::string name, std::size_t m, std::vector<Permutation> h);
GroupSpec make_wreath_full(std::string name, std::size_t m, std::vector<Permutation> h);
GroupSpec make_diagonal(std::string name, GroupSpecPtr k);

/// Bundled corpus, keyed by name.
const std::map<std::string, GroupSpecPtr>& fixtures();
/// Throws std::out_of_range naming the missing fixture.
GroupSpecPtr fixture(const std::string& name);

}  // namespace treedim
