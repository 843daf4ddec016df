#include "treedim/specfile.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "treedim/errors.hpp"
#include "treedim/permgroup.hpp"

namespace treedim {

using Json = nlohmann::ordered_json;

Permutation parse_cycle_string(std::size_t degree, std::string_view text) {
  std::vector<std::vector<Point>> cycles;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("cycle \"" + std::string(text) + "\": " + what);
  };
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i == text.size()) fail("empty");
  while (i < text.size()) {
    if (text[i] != '(') fail("expected '('");
    ++i;
    std::vector<Point> cycle;
    for (;;) {
      skip();
      if (i < text.size() && text[i] == ')') {
        ++i;
        break;
      }
      if (i == text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
        fail("expected a point or ')'");
      }
      std::size_t v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + static_cast<std::size_t>(text[i] - '0');
        if (v > degree) fail("point out of range 1.." + std::to_string(degree));
        ++i;
      }
      if (v == 0) fail("points are numbered from 1");
      cycle.push_back(static_cast<Point>(v - 1));
      if (i < text.size() && text[i] == ',') ++i;
    }
    if (cycle.size() > 1) cycles.push_back(std::move(cycle));
    skip();
  }
  try {
    return Permutation::from_cycles(degree, cycles);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return Permutation(degree);
}

// ---------------------------------------------------------------------------
// Emission

namespace {

Json perm_list(const std::vector<Permutation>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p.to_cycle_string(1));
  return out;
}

Json to_json(const GroupSpec& spec, bool top_level) {
  Json j;
  if (top_level) j["schema_version"] = kSpecSchemaVersion;
  j["name"] = spec.name;
  j["m"] = spec.m;
  j["top"] = perm_list(spec.top_generators());
  Json construction;
  construction["type"] = construction_tag(spec.construction);
  if (spec.construction == Construction::plain) {
    Json states = Json::object();
    for (Machine::StateId id = 1; id < spec.machine->state_count(); ++id) {
      const auto& st = spec.machine->state(id);
      Json sections = Json::array();
      for (auto s : st.sections) sections.push_back(spec.machine->state(s).name);
      states[st.name] = Json{{"root", st.root.to_cycle_string(1)}, {"sections", sections}};
    }
    j["states"] = states;
    Json gens = Json::array();
    for (const auto& g : spec.generators) gens.push_back(g.to_string());
    j["generators"] = gens;
  }
  if (spec.construction == Construction::rooted ||
      spec.construction == Construction::wreath_full ||
      spec.construction == Construction::gk) {
    construction["H"] = perm_list(spec.h);
  }
  if (spec.k) construction["K"] = to_json(*spec.k, false);
  j["construction"] = construction;
  return j;
}

}  // namespace

std::string emit_spec(const GroupSpec& spec) { return to_json(spec, true).dump(2) + "\n"; }

std::string spec_hash(const GroupSpec& spec) {
  std::string text = to_json(spec, false).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Reader {
  std::string origin;
  std::filesystem::path base_dir;

  [[noreturn]] void invalid(const std::string& field, const std::string& what) const {
    throw ValidationError(origin + ": " + field + ": " + what);
  }

  const Json& require(const Json& j, const std::string& key, const std::string& path) const {
    if (!j.contains(key)) invalid(path.empty() ? key : path + "." + key, "missing field");
    return j.at(key);
  }

  std::string string_at(const Json& j, const std::string& field) const {
    if (!j.is_string()) invalid(field, "expected a string");
    return j.get<std::string>();
  }

  Permutation perm_at(std::size_t m, const Json& j, const std::string& field) const {
    try {
      return parse_cycle_string(m, string_at(j, field));
    } catch (const ParseError& e) {
      invalid(field, e.what());
    }
  }

  std::vector<Permutation> perms_at(std::size_t m, const Json& j, const std::string& field) const {
    if (!j.is_array()) invalid(field, "expected an array of cycle strings");
    std::vector<Permutation> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(perm_at(m, j[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  GroupSpecPtr spec(const Json& j, const std::string& path) const {
    auto field = [&](const std::string& k) { return path.empty() ? k : path + "." + k; };
    if (!j.is_object()) invalid(path.empty() ? "<root>" : path, "expected an object");
    static const std::set<std::string> known{"schema_version", "name", "m", "top",
                                             "states", "generators", "construction"};
    for (const auto& [key, _] : j.items()) {
      if (!known.contains(key)) invalid(field(key), "unknown field");
    }
    if (j.contains("schema_version")) {
      const auto& v = j.at("schema_version");
      if (!v.is_number_integer() || v.get<int>() != kSpecSchemaVersion) {
        invalid(field("schema_version"), "unsupported version (expected " +
                                             std::to_string(kSpecSchemaVersion) + ")");
      }
    }
    std::string name = string_at(require(j, "name", path), field("name"));
    const Json& mj = require(j, "m", path);
    if (!mj.is_number_integer() || mj.get<long>() < 2 || mj.get<long>() > 9) {
      invalid(field("m"), "expected an integer in 2..9");
    }
    auto m = mj.get<std::size_t>();

    std::string type = "plain";
    const Json* cons = nullptr;
    if (j.contains("construction")) {
      cons = &j.at("construction");
      if (!cons->is_object()) invalid(field("construction"), "expected an object");
      type = string_at(require(*cons, "type", field("construction")),
                       field("construction.type"));
      for (const auto& [key, _] : cons->items()) {
        if (key != "type" && key != "H" && key != "K") {
          invalid(field("construction." + key), "unknown field");
        }
      }
    }
    Construction c;
    try {
      c = parse_construction_tag(type);
    } catch (const ValidationError& e) {
      invalid(field("construction.type"), e.what());
    }

    if (c == Construction::plain) {
      std::vector<Permutation> top;
      if (j.contains("top")) top = perms_at(m, j.at("top"), field("top"));
      std::vector<Machine::StateDecl> decls;
      if (j.contains("states")) {
        const Json& states = j.at("states");
        if (!states.is_object()) invalid(field("states"), "expected an object");
        for (const auto& [sname, sj] : states.items()) {
          std::string sf = field("states." + sname);
          if (!sj.is_object()) invalid(sf, "expected an object");
          for (const auto& [key, _] : sj.items()) {
            if (key != "root" && key != "sections") invalid(sf + "." + key, "unknown field");
          }
          Machine::StateDecl d{sname, Permutation(m), {}};
          if (sj.contains("root")) d.root = perm_at(m, sj.at("root"), sf + ".root");
          const Json& secs = require(sj, "sections", sf);
          if (!secs.is_array()) invalid(sf + ".sections", "expected an array of state names");
          for (std::size_t i = 0; i < secs.size(); ++i) {
            d.sections.push_back(string_at(secs[i], sf + ".sections[" + std::to_string(i) + "]"));
          }
          decls.push_back(std::move(d));
        }
        for (const auto& d : decls) {
          for (std::size_t i = 0; i < d.sections.size(); ++i) {
            const std::string& t = d.sections[i];
            bool known = t == Machine::kIdentityName || states.contains(t);
            if (!known) {
              invalid(field("states." + d.name + ".sections[" + std::to_string(i) + "]"),
                      "unresolved state name \"" + t + "\"");
            }
          }
        }
      }
      MachinePtr mc;
      try {
        mc = Machine::create(m, top, decls);
      } catch (const ValidationError& e) {
        invalid(field("states"), e.what());
      }
      std::vector<Element> gens;
      if (j.contains("generators")) {
        const Json& gj = j.at("generators");
        if (!gj.is_array()) invalid(field("generators"), "expected an array of words");
        for (std::size_t i = 0; i < gj.size(); ++i) {
          std::string gf = field("generators[" + std::to_string(i) + "]");
          try {
            gens.push_back(Element::parse(mc, string_at(gj[i], gf)));
          } catch (const Error& e) {
            invalid(gf, e.what());
          }
        }
      }
      return std::make_shared<const GroupSpec>(make_plain(name, mc, std::move(gens)));
    }

    for (const char* key : {"states", "generators"}) {
      if (j.contains(key) && !j.at(key).empty()) {
        invalid(field(key), std::string("not allowed for construction ") + type);
      }
    }
    std::vector<Permutation> h;
    if (c != Construction::diagonal) {
      h = perms_at(m, require(*cons, "H", field("construction")), field("construction.H"));
    }
    GroupSpecPtr k;
    if (c == Construction::diagonal || c == Construction::gk) {
      k = nested(require(*cons, "K", field("construction")), field("construction.K"));
      if (k->m != m) invalid(field("construction.K"), "K acts on a tree of different degree");
    }
    try {
      switch (c) {
        case Construction::rooted:
          return std::make_shared<const GroupSpec>(make_rooted(name, m, h));
        case Construction::wreath_full:
          return std::make_shared<const GroupSpec>(make_wreath_full(name, m, h));
        case Construction::diagonal:
          return std::make_shared<const GroupSpec>(make_diagonal(name, k));
        case Construction::gk:
          return std::make_shared<const GroupSpec>(build_GK(m, h, k, name));
        case Construction::plain:
          break;
      }
    } catch (const NotTransitive& e) {
      invalid(field("construction.H"), e.what());
    }
    return nullptr;
  }

  GroupSpecPtr nested(const Json& j, const std::string& path) const {
    if (j.is_string()) {
      std::string ref = j.get<std::string>();
      if (fixtures().contains(ref)) return fixture(ref);
      std::filesystem::path p = base_dir / ref;
      if (!std::filesystem::exists(p)) invalid(path, "\"" + ref + "\" is neither a fixture nor a file");
      return load_spec(p);
    }
    return spec(j, path);
  }
};

}  // namespace

GroupSpecPtr parse_spec(std::string_view text, std::string_view origin,
                        const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string(origin) + ": " + e.what());
  }
  Reader r{std::string(origin), base_dir};
  return r.spec(j, "");
}

GroupSpecPtr load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), path.string(), path.parent_path());
}

GroupSpecPtr resolve_spec(const std::string& name_or_path) {
  const auto& all = fixtures();
  if (auto it = all.find(name_or_path); it != all.end()) return it->second;
  if (!std::filesystem::exists(name_or_path)) {
    throw ParseError("\"" + name_or_path + "\" is neither a fixture nor a spec file");
  }
  return load_spec(name_or_path);
}

}  // namespace treedim
