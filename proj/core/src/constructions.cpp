#include "treedim/constructions.hpp"

#include <algorithm>
#include <stdexcept>

#include "treedim/errors.hpp"
#include "treedim/permgroup.hpp"

namespace treedim {

namespace {

void add_unique(std::vector<Permutation>& out, const Permutation& p) {
  if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
}

std::string fresh_name(const Machine& mc, std::string name) {
  while (mc.find(name)) name += "'";
  return name;
}

}  // namespace

const char* construction_tag(Construction c) {
  switch (c) {
    case Construction::plain: return "plain";
    case Construction::rooted: return "rooted";
    case Construction::diagonal: return "diagonal";
    case Construction::gk: return "GK";
    case Construction::wreath_full: return "wreath_full";
  }
  return "plain";
}

Construction parse_construction_tag(const std::string& tag) {
  if (tag == "plain") return Construction::plain;
  if (tag == "rooted") return Construction::rooted;
  if (tag == "diagonal") return Construction::diagonal;
  if (tag == "GK") return Construction::gk;
  if (tag == "wreath_full") return Construction::wreath_full;
  throw ValidationError("unknown construction \"" + tag + "\"");
}

std::vector<Permutation> GroupSpec::top_generators() const {
  switch (construction) {
    case Construction::plain:
      return machine ? machine->top_generators() : std::vector<Permutation>{};
    case Construction::rooted:
    case Construction::wreath_full:
      return h;
    case Construction::diagonal:
      return k->top_generators();
    case Construction::gk: {
      std::vector<Permutation> out = h;
      for (const auto& p : k->top_generators()) add_unique(out, p);
      return out;
    }
  }
  return {};
}

std::vector<Element> rooted_generators(std::size_t m, const std::vector<Permutation>& h) {
  std::vector<Machine::StateDecl> decls;
  for (const auto& p : h) {
    if (p.is_identity()) continue;
    decls.push_back({"h" + std::to_string(decls.size() + 1), p,
                     std::vector<std::string>(m, Machine::kIdentityName)});
  }
  if (decls.empty()) return {};
  MachinePtr mc = Machine::create(m, h, decls);
  std::vector<Element> out;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    out.push_back(Element::state(mc, static_cast<Machine::StateId>(i + 1)));
  }
  return out;
}

std::vector<Element> diagonal(const std::vector<Element>& ks) {
  if (ks.empty()) return {};
  auto unified = unify_machines(ks);
  MachinePtr mc = unified.front().machine();
  std::vector<std::string> targets;
  for (const auto& k : unified) {
    if (k.is_trivial_word()) {
      targets.emplace_back();
      continue;
    }
    if (k.word().size() == 1 && !k.word()[0].inverse) {
      targets.push_back(mc->state(k.word()[0].state).name);
      continue;
    }
    // Earlier normalizations only append states, so ids stay valid.
    Element s = normalize(Element(mc, k.word()));
    mc = s.machine();
    targets.push_back(mc->state(s.word()[0].state).name);
  }
  std::vector<Machine::StateDecl> decls;
  std::vector<std::string> names;
  for (const auto& t : targets) {
    if (t.empty()) {
      names.emplace_back();
      continue;
    }
    std::string name = fresh_name(*mc, "d(" + t + ")");
    while (std::any_of(decls.begin(), decls.end(),
                       [&](const auto& d) { return d.name == name; })) {
      name += "'";
    }
    decls.push_back({name, Permutation(mc->m()), std::vector<std::string>(mc->m(), t)});
    names.push_back(name);
  }
  MachinePtr ext = decls.empty() ? mc : mc->extended(decls);
  std::vector<Element> out;
  for (const auto& name : names) {
    out.push_back(name.empty() ? Element::identity(ext) : Element::state(ext, *ext->find(name)));
  }
  return out;
}

Element diagonal(const Element& k) { return diagonal(std::vector<Element>{k}).front(); }

std::vector<Element> wreath_full_generators(std::size_t m, const std::vector<Permutation>& h,
                                            std::size_t n, std::size_t cap) {
  checked_pow(m, n, cap);
  std::vector<Permutation> hs;
  for (const auto& p : h) {
    if (p.degree() != m) throw DegreeMismatch("wreath_full: top generator of wrong degree");
    if (!p.is_identity()) hs.push_back(p);
  }
  if (hs.empty() || n == 0) return {};

  // State "hi@w" acts as h_i at the vertex w and trivially elsewhere; its only
  // non-trivial section is "hi@w'" at the first letter of w = x w'.
  auto name = [](std::size_t i, const Vertex& w) {
    return "h" + std::to_string(i + 1) + "@" + w.to_string();
  };
  std::vector<Machine::StateDecl> decls;
  std::vector<std::string> order;
  for (std::size_t l = 0; l < n; ++l) {
    for (const auto& w : level_vertices(m, l, cap)) {
      for (std::size_t i = 0; i < hs.size(); ++i) {
        Machine::StateDecl d{name(i, w), Permutation(m),
                             std::vector<std::string>(m, Machine::kIdentityName)};
        if (w.is_root()) {
          d.root = hs[i];
        } else {
          std::vector<Vertex::Letter> rest(w.word().begin() + 1, w.word().end());
          d.sections[w.word()[0] - 1] = name(i, Vertex(m, std::move(rest)));
        }
        order.push_back(d.name);
        decls.push_back(std::move(d));
      }
    }
  }
  MachinePtr mc = Machine::create(m, hs, decls);
  std::vector<Element> out;
  out.reserve(order.size());
  for (const auto& s : order) out.push_back(Element::state(mc, *mc->find(s)));
  return out;
}

std::vector<Element> generators_at(const GroupSpec& spec, std::size_t n, std::size_t cap) {
  switch (spec.construction) {
    case Construction::plain:
      return spec.generators;
    case Construction::rooted:
      return rooted_generators(spec.m, spec.h);
    case Construction::wreath_full:
      return wreath_full_generators(spec.m, spec.h, n, cap);
    case Construction::diagonal:
      return diagonal(generators_at(*spec.k, n > 0 ? n - 1 : 0, cap));
    case Construction::gk: {
      auto gens = rooted_generators(spec.m, spec.h);
      auto ds = diagonal(generators_at(*spec.k, n > 0 ? n - 1 : 0, cap));
      gens.insert(gens.end(), ds.begin(), ds.end());
      return unify_machines(gens);
    }
  }
  return {};
}

GroupSpec make_plain(std::string name, MachinePtr machine, std::vector<Element> generators) {
  if (!machine) throw ValidationError("plain spec without a machine");
  GroupSpec s;
  s.name = std::move(name);
  s.m = machine->m();
  s.construction = Construction::plain;
  for (const auto& g : generators) {
    if (g.machine() != machine) throw ValidationError("generator over a different machine");
  }
  s.machine = std::move(machine);
  s.generators = std::move(generators);
  return s;
}

namespace {

void check_top(std::size_t m, const std::vector<Permutation>& h) {
  if (m < 2) throw ValidationError("m must be at least 2");
  for (const auto& p : h) {
    if (p.degree() != m) {
      throw ValidationError("top generator " + p.to_cycle_string(1) + " is not a permutation of 1.." +
                            std::to_string(m));
    }
  }
}

}  // namespace

GroupSpec make_rooted(std::string name, std::size_t m, std::vector<Permutation> h) {
  check_top(m, h);
  GroupSpec s;
  s.name = std::move(name);
  s.m = m;
  s.construction = Construction::rooted;
  s.h = std::move(h);
  return s;
}

GroupSpec make_wreath_full(std::string name, std::size_t m, std::vector<Permutation> h) {
  GroupSpec s = make_rooted(std::move(name), m, std::move(h));
  s.construction = Construction::wreath_full;
  return s;
}

GroupSpec make_diagonal(std::string name, GroupSpecPtr k) {
  if (!k) throw ValidationError("diagonal spec without K");
  GroupSpec s;
  s.name = std::move(name);
  s.m = k->m;
  s.construction = Construction::diagonal;
  s.k = std::move(k);
  return s;
}

GroupSpec build_GK(std::size_t m, const std::vector<Permutation>& h, GroupSpecPtr k,
                   std::string name) {
  check_top(m, h);
  if (!k) throw ValidationError("GK spec without K");
  if (k->m != m) {
    throw ValidationError("GK: K acts on the " + std::to_string(k->m) + "-adic tree, H on " +
                          std::to_string(m) + " letters");
  }
  auto orbs = orbits(h, m);
  if (orbs.size() != 1) {
    std::string text;
    for (const auto& o : orbs) {
      text += " {";
      for (std::size_t i = 0; i < o.size(); ++i) text += (i ? "," : "") + std::to_string(o[i] + 1);
      text += "}";
    }
    throw NotTransitive("H not transitive on {1.." + std::to_string(m) + "}: orbits" + text);
  }
  GroupSpec s;
  s.name = name.empty() ? "gk-" + k->name : std::move(name);
  s.m = m;
  s.construction = Construction::gk;
  s.h = h;
  s.k = std::move(k);
  return s;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

Permutation cyc(std::size_t m, std::vector<std::vector<Point>> cycles) {
  for (auto& c : cycles) {
    for (auto& x : c) --x;
  }
  return Permutation::from_cycles(m, cycles);
}

GroupSpecPtr plain_fixture(std::string name, std::size_t m, std::vector<Permutation> top,
                           std::vector<Machine::StateDecl> states,
                           const std::vector<std::string>& gens) {
  MachinePtr mc = Machine::create(m, std::move(top), states);
  std::vector<Element> elements;
  for (const auto& g : gens) elements.push_back(Element::parse(mc, g));
  return std::make_shared<const GroupSpec>(make_plain(std::move(name), mc, std::move(elements)));
}

std::map<std::string, GroupSpecPtr> make_fixtures() {
  std::map<std::string, GroupSpecPtr> out;
  auto add = [&](GroupSpecPtr s) { out.emplace(s->name, std::move(s)); };

  const Permutation sw = cyc(2, {{1, 2}});
  const Permutation id2(2);
  const Permutation c3 = cyc(3, {{1, 2, 3}});
  const Permutation t3 = cyc(3, {{1, 2}});

  add(plain_fixture("trivial", 2, {sw}, {}, {}));
  add(std::make_shared<const GroupSpec>(make_rooted("cyclic", 3, {c3})));
  add(plain_fixture("odometer", 2, {sw}, {{"a", sw, {"1", "a"}}}, {"a"}));
  add(plain_fixture("odometer3", 3, {c3}, {{"a", c3, {"1", "1", "a"}}}, {"a"}));
  add(plain_fixture("grigorchuk", 2, {sw},
                    {{"a", sw, {"1", "1"}},
                     {"b", id2, {"a", "c"}},
                     {"c", id2, {"a", "d"}},
                     {"d", id2, {"1", "b"}}},
                    {"a", "b", "c", "d"}));
  add(std::make_shared<const GroupSpec>(make_wreath_full("w2", 2, {sw})));
  add(std::make_shared<const GroupSpec>(make_wreath_full("w3-c3", 3, {c3})));
  add(std::make_shared<const GroupSpec>(make_wreath_full("w3-sym3", 3, {c3, t3})));

  auto gk = [&](std::string name, std::size_t m, std::vector<Permutation> h, const char* k) {
    add(std::make_shared<const GroupSpec>(build_GK(m, h, out.at(k), std::move(name))));
  };
  gk("gk-w2", 2, {sw}, "w2");
  gk("gk-odometer", 2, {sw}, "odometer");
  gk("gk-grigorchuk", 2, {sw}, "grigorchuk");
  gk("gk-trivial", 2, {sw}, "trivial");
  gk("gk-odometer3", 3, {c3}, "odometer3");
  gk("gk-w3-c3", 3, {c3}, "w3-c3");
  gk("gk-sym3-odometer3", 3, {c3, t3}, "odometer3");
  gk("gk-w3-sym3", 3, {c3, t3}, "w3-sym3");
  return out;
}

}  // namespace

const std::map<std::string, GroupSpecPtr>& fixtures() {
  static const std::map<std::string, GroupSpecPtr> catalog = make_fixtures();
  return catalog;
}

GroupSpecPtr fixture(const std::string& name) {
  const auto& all = fixtures();
  auto it = all.find(name);
  if (it == all.end()) throw std::out_of_range("no fixture named \"" + name + "\"");
  return it->second;
}

}  // namespace treedim
