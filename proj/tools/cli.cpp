#include "cli.hpp"

#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "treedim/analysis.hpp"
#include "treedim/errors.hpp"
#include "treedim/specfile.hpp"

namespace treedim::cli {

using Json = nlohmann::ordered_json;

namespace {

// Floats are reported with 12 significant digits.
Json num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return Json(std::stod(buf));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Numerator and denominator note of log_m x: either an exact prime exponent
// over log_p(m), or ln x over ln(m).
std::pair<std::string, std::string> log_parts(const LogRecord& r, const BigInt& x, std::size_t m) {
  if (r.exact) {
    if (r.exponent == 0 || r.prime == m) return {std::to_string(r.exponent), "1"};
    return {std::to_string(r.exponent),
            "log_" + std::to_string(r.prime) + "(" + std::to_string(m) + ")"};
  }
  return {fmt(log_of(x)), "ln(" + std::to_string(m) + ")"};
}

Json log_json(const LogRecord& r, const BigInt& x, std::size_t m) {
  auto [n, d] = log_parts(r, x, m);
  Json j;
  j["value"] = num(r.value);
  j["exact"] = r.exact;
  j["num"] = n;
  j["den_note"] = d;
  return j;
}

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  Json reports = Json::array();
  std::string csv;
  std::string text;
  bool passed = true;
  bool truncated = false;
  std::string truncation_reason;
};

void write_atomically(const std::string& path, const std::string& data) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot write " + tmp.string());
    f << data;
    if (!f) throw ParseError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

// Advisory lock held for the lifetime of a run on a cache directory.
class CacheLock {
 public:
  explicit CacheLock(const std::string& dir) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::string path = (std::filesystem::path(dir) / ".lock").string();
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw ParseError("cannot open lock file " + path);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw ResourceLimit("cache directory " + dir + " is in use by another process");
    }
  }
  ~CacheLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  int fd_ = -1;
};

std::size_t default_levels(const std::string& cmd) {
  if (cmd == "dim" || cmd == "abel") return 10;
  if (cmd == "verify-gk" || cmd == "quotient") return 8;
  if (cmd == "check") return 5;
  return 6;
}

std::size_t default_window(const std::string& cmd) { return cmd == "dim" ? 3 : 1; }

std::string default_format(const std::string& cmd) { return cmd == "dim" ? "csv" : "text"; }

void check_cap(const GroupSpec& spec, std::size_t levels, std::size_t cap) {
  std::size_t max_level = 0;
  std::size_t p = 1;
  while (p <= cap / spec.m) {
    p *= spec.m;
    ++max_level;
  }
  if (levels > max_level) {
    throw ResourceLimit("--levels " + std::to_string(levels) + " exceeds the point cap " +
                        std::to_string(cap) + " for m=" + std::to_string(spec.m) +
                        " (spec " + spec.name + "); the largest allowed level is " +
                        std::to_string(max_level));
  }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_quotient(QuotientStore& store, const GroupSpec& spec, std::size_t levels, Output& o) {
  Json rep;
  rep["group"] = spec.name;
  rep["m"] = spec.m;
  Json rows = Json::array();
  std::ostringstream text;
  text << spec.name << " (m=" << spec.m << ")\n  n  order\n";
  for (std::size_t n = 1; n <= levels; ++n) {
    BigInt order;
    try {
      order = store.order(spec, n);
    } catch (const ResourceLimit& e) {
      o.truncated = true;
      o.truncation_reason = spec.name + " level " + std::to_string(n) + ": " + e.what();
      break;
    }
    rows.push_back(Json{{"level", n}, {"order", to_decimal(order)},
                        {"logm_order", log_json(log_record(order, spec.m), order, spec.m)}});
    text << "  " << n << "  " << to_decimal(order) << "\n";
  }
  rep["levels"] = rows;
  o.reports.push_back(rep);
  o.text += text.str();
}

void cmd_dim(QuotientStore& store, const GroupSpec& spec, const RunConfig& c, Output& o) {
  auto seq = dimension_sequence(store, spec, c.levels, c.window, c.tol, true);
  if (seq.truncated) {
    o.truncated = true;
    o.truncation_reason = spec.name + " " + seq.truncation_reason;
  }
  Json rep;
  rep["group"] = spec.name;
  rep["m"] = spec.m;
  rep["top_order"] = to_decimal(seq.top_order);
  Json rows = Json::array();
  std::ostringstream csv, text;
  csv << "level,logm_index_num,logm_index_den_note,logm_wreath,ratio\n";
  text << spec.name << " (m=" << spec.m << ", |H|=" << to_decimal(seq.top_order) << ")\n"
       << "  n  log_m|G:St(n)|  log_m|W:St(n)|  ratio\n";
  for (const auto& l : seq.levels) {
    auto [n, d] = log_parts(l.logm_index, l.order, spec.m);
    Json row;
    row["level"] = l.level;
    row["order"] = to_decimal(l.order);
    row["logm_index"] = log_json(l.logm_index, l.order, spec.m);
    row["logm_wreath"] = num(l.logm_wreath);
    row["ratio"] = num(l.ratio);
    row["ratio_exact"] = l.ratio_exact ? Json(std::to_string(l.ratio_exact->first) + "/" +
                                              std::to_string(l.ratio_exact->second))
                                       : Json(nullptr);
    rows.push_back(row);
    csv << l.level << "," << csv_field(n) << "," << csv_field(d) << "," << fmt(l.logm_wreath)
        << "," << fmt(l.ratio) << "\n";
    text << "  " << l.level << "  " << fmt(l.logm_index.value) << "  " << fmt(l.logm_wreath)
         << "  " << fmt(l.ratio) << "\n";
  }
  rep["levels"] = rows;
  rep["diagnostic"] = Json{{"window", seq.window},
                           {"tolerance", num(seq.tolerance)},
                           {"max_oscillation", num(seq.max_oscillation)},
                           {"strong_looking", seq.strong_looking},
                           {"note", "heuristic over finite levels; no limit is asserted"}};
  text << "  max oscillation over last " << seq.window << " levels: " << fmt(seq.max_oscillation)
       << (seq.strong_looking ? " (strong-looking)\n" : "\n");
  o.reports.push_back(rep);
  o.csv += csv.str();
  o.text += text.str();
}

void cmd_abel(QuotientStore& store, const GroupSpec& spec, const RunConfig& c, Output& o) {
  Json rep;
  rep["group"] = spec.name;
  rep["m"] = spec.m;
  rep["window"] = c.window;
  Json rows = Json::array();
  std::ostringstream csv, text;
  csv << "level,log2_index,easy_bound_slack,value,bound,holds\n";
  text << spec.name << " (m=" << spec.m << ", k=" << c.window << ")\n"
       << "  n  log2|G:G'|  slack  log_m|G:G'|/m^n  bound  holds\n";
  std::size_t lo = std::max<std::size_t>(c.window, 1);
  bool easy = true;
  std::vector<double> values;
  for (std::size_t n = 1; n <= c.levels; ++n) {
    try {
      auto a = abelianization_index(store, spec, n);
      easy = easy && a.easy_bound_holds;
      Json row;
      row["level"] = n;
      row["index"] = to_decimal(a.index);
      row["log2_index"] = num(a.log2_index);
      row["logm_index"] = log_json(a.logm_index, a.index, spec.m);
      row["easy_bound_slack_base2"] = num(a.easy_bound_slack);
      row["easy_bound_holds"] = a.easy_bound_holds;
      std::string value = "", bound = "", holds = "";
      if (n >= lo) {
        auto s = orbit_stats(store, spec, n, c.window);
        row["value"] = num(s.value);
        row["bound"] = num(s.bound);
        row["bound_exact"] = s.bound_exact;
        row["bound_holds"] = s.bound_holds;
        o.passed = o.passed && s.bound_holds;
        value = fmt(s.value);
        bound = fmt(s.bound);
        holds = s.bound_holds ? "true" : "false";
        values.push_back(s.value);
      }
      rows.push_back(row);
      csv << n << "," << fmt(a.log2_index) << "," << fmt(a.easy_bound_slack) << "," << value << ","
          << bound << "," << holds << "\n";
      text << "  " << n << "  " << fmt(a.log2_index) << "  " << fmt(a.easy_bound_slack) << "  "
           << (value.empty() ? "-" : value) << "  " << (bound.empty() ? "-" : bound) << "  "
           << (holds.empty() ? "-" : holds) << "\n";
    } catch (const ResourceLimit& e) {
      o.truncated = true;
      o.truncation_reason = spec.name + " level " + std::to_string(n) + ": " + e.what();
      break;
    }
  }
  std::size_t from = 0;
  if (!values.empty()) {
    std::size_t i = values.size() - 1;
    while (i > 0 && values[i - 1] > values[i]) --i;
    from = lo + i;
  }
  o.passed = o.passed && easy;
  rep["levels"] = rows;
  rep["easy_bound_holds"] = easy;
  rep["decreasing_from"] = from;
  o.reports.push_back(rep);
  o.csv += csv.str();
  o.text += text.str();
}

void cmd_orbits(QuotientStore& store, const GroupSpec& spec, const RunConfig& c, Output& o) {
  Json rep;
  rep["group"] = spec.name;
  rep["m"] = spec.m;
  rep["window"] = c.window;
  Json rows = Json::array();
  std::ostringstream csv, text;
  csv << "level,orbits,a_orbits,b_orbits,predecessor_orbits,a_predecessors,density,"
         "counting_inequality,classification_gap\n";
  text << spec.name << " (m=" << spec.m << ", k=" << c.window << ")\n"
       << "  n  #O_n  #A_n  #B_n  #O_{n-k}  #O_n/m^n  counting  gap\n";
  double prev_density = 2.0;
  bool monotone = true;
  for (std::size_t n = std::max<std::size_t>(c.window, 1); n <= c.levels; ++n) {
    OrbitStats s;
    try {
      s = orbit_stats(store, spec, n, c.window);
    } catch (const ResourceLimit& e) {
      o.truncated = true;
      o.truncation_reason = spec.name + " level " + std::to_string(n) + ": " + e.what();
      break;
    }
    double density = static_cast<double>(s.orbits) / std::pow(static_cast<double>(spec.m), n);
    monotone = monotone && density <= prev_density;
    prev_density = density;
    o.passed = o.passed && s.counting_inequality;
    Json branching = Json::object();
    for (auto [b, count] : s.branching) branching[std::to_string(b)] = count;
    rows.push_back(Json{{"level", n},
                        {"orbits", s.orbits},
                        {"a_orbits", s.a_orbits},
                        {"b_orbits", s.b_orbits},
                        {"predecessor_orbits", s.predecessor_orbits},
                        {"a_predecessors", s.a_predecessors},
                        {"branching", branching},
                        {"density", num(density)},
                        {"counting_inequality", s.counting_inequality},
                        {"classification_gap", s.classification_gap}});
    csv << n << "," << s.orbits << "," << s.a_orbits << "," << s.b_orbits << ","
        << s.predecessor_orbits << "," << s.a_predecessors << "," << fmt(density) << ","
        << (s.counting_inequality ? "true" : "false") << ","
        << (s.classification_gap ? "true" : "false") << "\n";
    text << "  " << n << "  " << s.orbits << "  " << s.a_orbits << "  " << s.b_orbits << "  "
         << s.predecessor_orbits << "  " << fmt(density) << "  "
         << (s.counting_inequality ? "ok" : "FAIL") << "  "
         << (s.classification_gap ? "GAP" : "-") << "\n";
  }
  o.passed = o.passed && monotone;
  rep["levels"] = rows;
  rep["density_monotone"] = monotone;
  o.reports.push_back(rep);
  o.csv += csv.str();
  o.text += text.str();
}

Json local_json(const LocalRigid& r, std::size_t m) {
  return Json{{"vertex", r.vertex.to_string()},
              {"order", to_decimal(r.order)},
              {"logm_order", log_json(r.logm_order, r.order, m)},
              {"ratio", num(r.ratio)}};
}

void cmd_rist(QuotientStore& store, const GroupSpec& spec, const RunConfig& c, Output& o) {
  Json rep;
  rep["group"] = spec.name;
  rep["m"] = spec.m;
  rep["inner_level"] = c.levels;
  std::ostringstream csv, text;
  csv << "vertex,order,ratio\n";
  if (!c.vertex.empty()) {
    Vertex v = Vertex::parse(spec.m, c.vertex);
    auto r = local_rigid(store, spec, v, c.levels);
    rep["vertices"] = Json::array({local_json(r, spec.m)});
    csv << csv_field(v.to_string()) << "," << to_decimal(r.order) << "," << fmt(r.ratio) << "\n";
    text << spec.name << ": rist(" << v.to_string() << ") in pi_" << c.levels << " has order "
         << to_decimal(r.order) << ", ratio " << fmt(r.ratio) << "\n";
  } else {
    auto r = rigid_level(store, spec, c.window, c.levels);
    rep["outer_level"] = r.outer_level;
    Json vs = Json::array();
    text << spec.name << ": Rist(" << r.outer_level << ") in pi_" << c.levels << "\n";
    for (const auto& lr : r.vertices) {
      vs.push_back(local_json(lr, spec.m));
      csv << csv_field(lr.vertex.to_string()) << "," << to_decimal(lr.order) << ","
          << fmt(lr.ratio) << "\n";
      text << "  rist(" << lr.vertex.to_string() << ")  order " << to_decimal(lr.order)
           << "  ratio " << fmt(lr.ratio) << "\n";
    }
    rep["vertices"] = vs;
    rep["order"] = to_decimal(r.order);
    rep["product"] = to_decimal(r.product);
    rep["product_holds"] = r.product_holds;
    rep["equal_orders"] = r.equal_orders;
    rep["ratio"] = num(r.ratio);
    text << "  order " << to_decimal(r.order) << (r.product_holds ? " = " : " != ")
         << "product " << to_decimal(r.product) << ", ratio " << fmt(r.ratio) << "\n";
    o.passed = o.passed && r.product_holds;
  }
  o.reports.push_back(rep);
  o.csv += csv.str();
  o.text += text.str();
}

void emit_gk(const GKReport& r, Output& o) {
  Json rep;
  rep["group"] = r.group;
  Json levels = Json::array();
  std::ostringstream csv, text;
  csv << "level,order,expected_order,center_order,expected_center_order,ratio\n";
  text << r.group << "\n";
  for (const auto& l : r.levels) {
    levels.push_back(Json{{"level", l.level},
                          {"order", to_decimal(l.order)},
                          {"expected_order", to_decimal(l.expected_order)},
                          {"center_order", to_decimal(l.center_order)},
                          {"expected_center_order", to_decimal(l.expected_center_order)},
                          {"ratio", num(l.ratio)}});
    csv << l.level << "," << to_decimal(l.order) << "," << to_decimal(l.expected_order) << ","
        << to_decimal(l.center_order) << "," << to_decimal(l.expected_center_order) << ","
        << fmt(l.ratio) << "\n";
  }
  Json checks = Json::array();
  for (const auto& ch : r.checks) {
    checks.push_back(Json{{"id", ch.id}, {"title", ch.title}, {"passed", ch.passed},
                          {"witness", ch.witness}});
    text << "  (" << ch.id << ") " << (ch.passed ? "PASS " : "FAIL ") << ch.title
         << (ch.witness.empty() ? "" : "  [" + ch.witness + "]") << "\n";
  }
  rep["levels"] = levels;
  rep["checks"] = checks;
  rep["passed"] = r.passed();
  o.passed = o.passed && r.passed();
  o.reports.push_back(rep);
  o.csv += csv.str();
  o.text += text.str();
}

// ---------------------------------------------------------------------------
// check: the invariant suite over the fixture corpus

struct CheckResult {
  std::string group;
  std::string name;
  bool passed = true;
  std::string detail;
};

std::vector<CheckResult> invariant_suite(QuotientStore& store, const GroupSpec& spec,
                                         std::size_t levels) {
  std::vector<CheckResult> out;
  auto record = [&](std::string name, const std::function<std::string()>& body) {
    CheckResult r{spec.name, std::move(name), true, {}};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    out.push_back(std::move(r));
  };
  const std::size_t m = spec.m;

  record("dimension sequence monotone, ratios in [0,1]", [&]() -> std::string {
    auto seq = dimension_sequence(store, spec, levels);
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
      const auto& l = seq.levels[i];
      if (l.ratio < 0 || l.ratio > 1 + 1e-12) return "ratio out of range at n=" + std::to_string(l.level);
      if (i > 0 && l.order < seq.levels[i - 1].order) return "index decreased at n=" + std::to_string(l.level);
    }
    return {};
  });
  record("easy bound |G_n:G_n'| <= 2^(m^n-1)", [&]() -> std::string {
    for (std::size_t n = 1; n <= levels; ++n) {
      if (!abelianization_index(store, spec, n).easy_bound_holds) return "fails at n=" + std::to_string(n);
    }
    return {};
  });
  record("orbit density #O_n/m^n non-increasing", [&]() -> std::string {
    double prev = 1.0;
    for (std::size_t n = 1; n <= levels; ++n) {
      auto chain = store.chain(spec, n);
      double d = static_cast<double>(orbits(chain->generators(), chain->degree()).size()) /
                 std::pow(static_cast<double>(m), n);
      if (d > prev) return "increases at n=" + std::to_string(n);
      prev = d;
    }
    return {};
  });
  record("#A_n + 2#B_n <= m^k #O_{n-k} for k <= 3", [&]() -> std::string {
    for (std::size_t n = 1; n <= levels; ++n) {
      for (std::size_t k = 1; k <= std::min<std::size_t>(3, n); ++k) {
        if (!orbit_stats(store, spec, n, k).counting_inequality) {
          return "fails at n=" + std::to_string(n) + ", k=" + std::to_string(k);
        }
      }
    }
    return {};
  });
  record("index consistency |pi_n| = |pi_k| |St(k)/St(n)|", [&]() -> std::string {
    for (std::size_t n = 1; n <= levels; ++n) {
      auto g = store.chain(spec, n);
      for (std::size_t k = 0; k < n; ++k) {
        if (g->order() != store.chain(spec, k)->order() * level_stabilizer(*g, k).order()) {
          return "fails at n=" + std::to_string(n) + ", k=" + std::to_string(k);
        }
      }
    }
    return {};
  });
  record("invariant decomposition of log|G_n:G_n'|", [&]() -> std::string {
    for (std::size_t n = 1; n <= levels; ++n) {
      if (!invariant_decomposition(store, spec, n).holds) return "fails at n=" + std::to_string(n);
    }
    return {};
  });
  record("A_n abelianization equals that of P_{n-k}", [&]() -> std::string {
    for (std::size_t n = 1; n <= levels; ++n) {
      for (std::size_t k = 1; k <= std::min<std::size_t>(2, n); ++k) {
        if (!a_identification(store, spec, n, k).holds) {
          return "fails at n=" + std::to_string(n) + ", k=" + std::to_string(k);
        }
      }
    }
    return {};
  });
  record("orbits of G_n' refine orbits of G_n", [&]() -> std::string {
    auto g = store.chain(spec, levels);
    auto d = *store.derived(spec, levels);
    std::vector<std::size_t> owner(g->degree());
    auto big = orbits(g->generators(), g->degree());
    for (std::size_t i = 0; i < big.size(); ++i) {
      for (Point x : big[i]) owner[x] = i;
    }
    for (const auto& o : orbits(d.generators(), d.degree())) {
      for (Point x : o) {
        if (owner[x] != owner[o.front()]) return "a derived orbit meets two orbits";
      }
    }
    return {};
  });
  record("Rist(k) order is the product of the rist(v) orders", [&]() -> std::string {
    for (std::size_t k = 1; k <= std::min<std::size_t>(2, levels); ++k) {
      if (!rigid_level(store, spec, k, levels).product_holds) return "fails at k=" + std::to_string(k);
    }
    return {};
  });
  record("evaluate is a homomorphism on generator pairs", [&]() -> std::string {
    auto gens = generators_at(spec, levels);
    if (gens.size() > 8) gens.resize(8);
    for (const auto& a : gens) {
      for (const auto& b : gens) {
        if (evaluate(multiply(a, b), levels) != compose(evaluate(a, levels), evaluate(b, levels))) {
          return a.to_string() + " * " + b.to_string();
        }
      }
    }
    return {};
  });
  if (spec.construction == Construction::wreath_full) {
    record("|pi_n(W_H)| = |H|^((m^n-1)/(m-1))", [&]() -> std::string {
      BigInt h = StabilizerChain::build(m, spec.h).order();
      std::size_t e = 0;
      for (std::size_t n = 1; n <= levels; ++n) {
        e = e * m + 1;
        BigInt expected = boost::multiprecision::pow(h, static_cast<unsigned>(e));
        if (store.order(spec, n) != expected) return "fails at n=" + std::to_string(n);
      }
      return {};
    });
  }
  if (spec.construction == Construction::gk) {
    record("G_K checks (a)-(f)", [&]() -> std::string {
      std::size_t n = std::max<std::size_t>(levels, 2);
      auto r = verify_GK(store, spec, n);
      // G_K is level-transitive exactly when K is; a non-transitive K must fail (a).
      auto kt = level_transitivity(store, *spec.k, n - 1);
      bool k_transitive = std::all_of(kt.begin(), kt.end(), [](bool b) { return b; });
      for (const auto& c : r.checks) {
        bool expected = c.id == "a" ? k_transitive : true;
        if (c.passed != expected) return "(" + c.id + ") " + c.witness;
      }
      return {};
    });
  }
  return out;
}

void cmd_check(QuotientStore& store, const std::vector<GroupSpecPtr>& specs, std::size_t levels,
               Output& o) {
  std::ostringstream csv, text;
  csv << "group,check,passed,detail\n";
  Json rows = Json::array();
  for (const auto& spec : specs) {
    std::size_t lv = levels;
    std::size_t p = 1, max_level = 0;
    while (p <= store.options().cap / spec->m) {
      p *= spec->m;
      ++max_level;
    }
    lv = std::min(lv, max_level);
    for (const auto& r : invariant_suite(store, *spec, lv)) {
      rows.push_back(Json{{"group", r.group}, {"check", r.name}, {"passed", r.passed},
                          {"detail", r.detail}});
      csv << csv_field(r.group) << "," << csv_field(r.name) << "," << (r.passed ? "true" : "false")
          << "," << csv_field(r.detail) << "\n";
      text << (r.passed ? "PASS  " : "FAIL  ") << r.group << ": " << r.name
           << (r.detail.empty() ? "" : "  [" + r.detail + "]") << "\n";
      o.passed = o.passed && r.passed;
    }
  }
  o.reports.push_back(Json{{"levels", levels}, {"checks", rows}});
  o.csv += csv.str();
  o.text += text.str();
}

}  // namespace

// ---------------------------------------------------------------------------

bool parse_args(int argc, const char* const* argv, RunConfig& config, int& exit_code,
                std::ostream& out, std::ostream& err) {
  CLI::App app{"treedim: groups acting on rooted trees and their congruence quotients"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"dim", "dimension sequence log|G:St(n)| / log|W_H:St(n)|"},
      {"abel", "abelianization indices and the orbit bound on log|G_n:G_n'|/m^n"},
      {"orbits", "orbit counts #O_n, #A_n, #B_n and the counting inequality"},
      {"rist", "rigid vertex and level stabilizers in pi_n(G)"},
      {"verify-gk", "the checks (a)-(f) for a G_K group"},
      {"check", "invariant suite over the fixture corpus"},
      {"quotient", "orders of pi_n(G)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", config.specs, "fixture name or spec file")->envname("TREEDIM_SPEC");
    sub->add_option("--levels", config.levels, "largest level N")->envname("TREEDIM_LEVELS");
    sub->add_option("--window", config.window, "window k (dim: diagnostic window)")
        ->envname("TREEDIM_WINDOW");
    sub->add_option("--cap-points", config.cap_points, "cap on m^N")
        ->envname("TREEDIM_CAP_POINTS");
    sub->add_option("--tol", config.tol, "dim: oscillation tolerance")->envname("TREEDIM_TOL");
    sub->add_option("--cache-dir", config.cache_dir, "on-disk order cache")
        ->envname("TREEDIM_CACHE_DIR");
    sub->add_option("--format", config.format, "json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->envname("TREEDIM_FORMAT");
    sub->add_option("--out", config.out, "report file (default stdout)")->envname("TREEDIM_OUT");
    sub->add_option("--jobs", config.jobs, "worker threads (0 = all cores)")
        ->envname("TREEDIM_JOBS");
    if (name == "rist") sub->add_option("--vertex", config.vertex, "single vertex, e.g. 12");
    if (name == "verify-gk") {
      sub->add_option("--H", config.h, "generator of H, e.g. \"(1 2)\"");
      sub->add_option("--K", config.k, "K: fixture name or spec file");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    if (exit_code != 0) exit_code = kError;
    return false;
  }
  for (const auto& [name, help] : commands) {
    if (app.got_subcommand(name)) config.command = name;
  }
  return true;
}

int run(const RunConfig& given, std::ostream& out, std::ostream& err) {
  RunConfig c = given;
  if (c.levels == 0) c.levels = default_levels(c.command);
  if (c.window == 0) c.window = default_window(c.command);
  if (c.format.empty()) c.format = default_format(c.command);
  Output o;
  try {
    CacheLock lock(c.cache_dir);
    AnalysisOptions opts;
    opts.cap = c.cap_points;
    opts.jobs = c.jobs;
    QuotientStore store(opts, c.cache_dir);

    std::vector<GroupSpecPtr> specs;
    if (c.command == "verify-gk" && !c.k.empty()) {
      GroupSpecPtr k = resolve_spec(c.k);
      std::vector<Permutation> h;
      for (const auto& text : c.h) h.push_back(parse_cycle_string(k->m, text));
      try {
        specs.push_back(std::make_shared<const GroupSpec>(build_GK(k->m, h, k)));
      } catch (const NotTransitive& e) {
        throw ValidationError(e.what());
      }
    }
    for (const auto& s : c.specs) specs.push_back(resolve_spec(s));
    if (c.command == "check" && specs.empty()) {
      for (const auto& [name, s] : fixtures()) specs.push_back(s);
    }
    if (specs.empty()) throw ParseError("no group given (use --spec)");
    if (c.format == "csv" && specs.size() > 1 && c.command != "check") {
      throw ParseError("csv output takes a single --spec");
    }
    if (c.command != "check") {
      for (const auto& s : specs) check_cap(*s, c.levels, c.cap_points);
    }

    if (c.command == "check") {
      cmd_check(store, specs, c.levels, o);
    } else {
      for (const auto& s : specs) {
        if (c.command == "quotient") cmd_quotient(store, *s, c.levels, o);
        if (c.command == "dim") cmd_dim(store, *s, c, o);
        if (c.command == "abel") cmd_abel(store, *s, c, o);
        if (c.command == "orbits") cmd_orbits(store, *s, c, o);
        if (c.command == "rist") cmd_rist(store, *s, c, o);
        if (c.command == "verify-gk") emit_gk(verify_GK(store, *s, c.levels), o);
      }
    }
  } catch (const ResourceLimit& e) {
    err << "treedim: resource limit: " << e.what() << "\n";
    if (o.reports.empty()) return kError;
    o.truncated = true;
    o.truncation_reason = e.what();
  } catch (const Error& e) {
    err << "treedim: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "treedim: " << e.what() << "\n";
    return kError;
  }

  std::string data;
  if (c.format == "json") {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = c.command;
    j["config"] = Json{{"levels", c.levels}, {"window", c.window}, {"cap_points", c.cap_points},
                       {"tol", num(c.tol)}};
    j["reports"] = o.reports;
    j["passed"] = o.passed;
    j["truncated"] = o.truncated;
    if (o.truncated) j["truncation_reason"] = o.truncation_reason;
    data = j.dump(2) + "\n";
  } else if (c.format == "csv") {
    data = "# schema_version=" + std::to_string(kReportSchemaVersion) + "\n" + o.csv;
    if (o.truncated) data += "# truncated: " + o.truncation_reason + "\n";
  } else {
    data = o.text;
    if (o.truncated) data += "TRUNCATED: " + o.truncation_reason + "\n";
  }
  try {
    if (c.out.empty()) {
      out << data;
    } else {
      write_atomically(c.out, data);
    }
  } catch (const std::exception& e) {
    err << "treedim: " << e.what() << "\n";
    return kError;
  }
  if (o.truncated) return kError;
  return o.passed ? kOk : kFailed;
}

}  // namespace treedim::cli
