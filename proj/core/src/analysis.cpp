#include "treedim/analysis.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "treedim/errors.hpp"
#include "treedim/specfile.hpp"
#include "treedim/treeauto.hpp"

namespace treedim {

LogRecord log_record(const BigInt& x, std::uint64_t m) {
  if (x <= 0) throw std::invalid_argument("log_record: non-positive argument");
  LogRecord r;
  if (x == 1) {
    r.exact = true;
    return r;
  }
  r.value = log_of(x) / std::log(static_cast<double>(m));
  // Group orders in this library only have small prime factors.
  std::uint64_t p = 0;
  for (std::uint64_t q = 2; q <= 65536; ++q) {
    if (x % q == 0) {
      p = q;
      break;
    }
  }
  if (p == 0) return r;
  std::uint64_t e = 0;
  if (exact_log(x, p, e)) {
    r.exact = true;
    r.prime = p;
    r.exponent = e;
    if (p == m) r.value = static_cast<double>(e);
  }
  return r;
}

namespace {

std::uint64_t upow(std::uint64_t m, std::size_t n) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= m;
  return r;
}

// (m^n - 1) / (m - 1): vertices above level n.
std::uint64_t inner_vertices(std::uint64_t m, std::size_t n) { return (upow(m, n) - 1) / (m - 1); }

BigInt top_order(const GroupSpec& spec) {
  return StabilizerChain::build(spec.m, spec.top_generators()).order();
}

}  // namespace

// ---------------------------------------------------------------------------
// Quotients

std::vector<Permutation> quotient_generators(const GroupSpec& spec, std::size_t n,
                                             std::size_t cap) {
  checked_pow(spec.m, n, cap);
  std::vector<Permutation> out;
  for (const auto& g : generators_at(spec, n, cap)) out.push_back(evaluate(g, n, cap));
  return out;
}

StabilizerChain quotient(const GroupSpec& spec, std::size_t n, const AnalysisOptions& opts) {
  auto gens = quotient_generators(spec, n, opts.cap);
  return StabilizerChain::build(BlockHierarchy::regular_tree(spec.m, n), gens, {}, opts.chain);
}

QuotientStore::QuotientStore(AnalysisOptions opts, std::filesystem::path cache_dir)
    : opts_(opts), dir_(std::move(cache_dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::shared_ptr<const StabilizerChain> QuotientStore::chain(const GroupSpec& spec, std::size_t n) {
  std::string key = spec_hash(spec) + "-n" + std::to_string(n);
  std::shared_future<std::shared_ptr<const StabilizerChain>> fut;
  std::promise<std::shared_ptr<const StabilizerChain>> promise;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = chains_.find(key);
    if (it == chains_.end()) {
      fut = promise.get_future().share();
      chains_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      auto built = std::make_shared<const StabilizerChain>(quotient(spec, n, opts_));
      promise.set_value(built);
      if (!dir_.empty() && !read_order(key)) write_order(key, spec_hash(spec), n, built->order());
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mu_);
      chains_.erase(key);
      throw;
    }
  }
  return fut.get();
}

std::shared_ptr<const StabilizerChain> QuotientStore::derived(const GroupSpec& spec, std::size_t n) {
  std::string key = spec_hash(spec) + "-n" + std::to_string(n);
  {
    std::lock_guard lock(mu_);
    if (auto it = derived_.find(key); it != derived_.end()) return it->second;
  }
  auto d = std::make_shared<const StabilizerChain>(derived_subgroup(*chain(spec, n), opts_.chain));
  std::lock_guard lock(mu_);
  return derived_.try_emplace(key, std::move(d)).first->second;
}

BigInt QuotientStore::order(const GroupSpec& spec, std::size_t n) {
  std::string key = spec_hash(spec) + "-n" + std::to_string(n);
  {
    std::lock_guard lock(mu_);
    if (!chains_.contains(key)) {
      if (auto stored = read_order(key)) {
        ++disk_hits_;
        return *stored;
      }
    }
  }
  return chain(spec, n)->order();
}

std::optional<BigInt> QuotientStore::read_order(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  std::ifstream in(dir_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(in);
    if (j.at("schema_version").get<int>() != 1) return std::nullopt;
    return BigInt(j.at("order").get<std::string>());
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void QuotientStore::write_order(const std::string& key, const std::string& hash, std::size_t n,
                                const BigInt& order) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["spec_hash"] = hash;
  j["level"] = n;
  j["order"] = to_decimal(order);
  auto final_path = dir_ / (key + ".json");
  auto tmp = dir_ / (key + ".json.tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump() << "\n";
    if (!out) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

// ---------------------------------------------------------------------------
// Dimension sequences

DimensionSequence dimension_sequence(QuotientStore& store, const GroupSpec& spec,
                                     std::size_t max_level, std::size_t window,
                                     double tolerance, bool allow_truncation) {
  if (!allow_truncation) checked_pow(spec.m, max_level, store.options().cap);
  DimensionSequence seq;
  seq.group = spec.name;
  seq.m = spec.m;
  seq.window = window;
  seq.tolerance = tolerance;
  seq.top_order = top_order(spec);
  const std::uint64_t m = spec.m;
  const LogRecord h = log_record(seq.top_order, m);

  auto level = [&](std::size_t n) {
    DimensionLevel d;
    d.level = n;
    d.order = store.order(spec, n);
    d.logm_index = log_record(d.order, m);
    d.logm_wreath = static_cast<double>(inner_vertices(m, n)) * h.value;
    d.ratio = d.logm_wreath > 0 ? d.logm_index.value / d.logm_wreath : 0.0;
    bool same_prime = d.logm_index.exponent == 0 || d.logm_index.prime == h.prime;
    if (d.logm_index.exact && h.exact && h.exponent > 0 && same_prime) {
      std::uint64_t num = d.logm_index.exponent;
      std::uint64_t den = h.exponent * inner_vertices(m, n);
      std::uint64_t g = std::gcd(num, den);
      if (g == 0) g = 1;
      d.ratio_exact = std::make_pair(num / g, den / g);
      d.ratio = static_cast<double>(num) / static_cast<double>(den);
    }
    return d;
  };
  if (!allow_truncation) {
    seq.levels = map_levels<DimensionLevel>(1, max_level, store.options().jobs, level);
  } else {
    for (std::size_t n = 1; n <= max_level; ++n) {
      try {
        seq.levels.push_back(level(n));
      } catch (const ResourceLimit& e) {
        seq.truncated = true;
        seq.truncation_reason = "level " + std::to_string(n) + ": " + e.what();
        break;
      }
    }
  }

  std::size_t count = 0;
  for (std::size_t i = seq.levels.size(); i-- > 1 && count < window; ++count) {
    seq.max_oscillation =
        std::max(seq.max_oscillation, std::abs(seq.levels[i].ratio - seq.levels[i - 1].ratio));
  }
  seq.strong_looking = count == window && seq.max_oscillation < tolerance;
  return seq;
}

// ---------------------------------------------------------------------------
// Abelianization and orbits

namespace {

AbelianizationReport abelianization_from(const StabilizerChain& group,
                                         const StabilizerChain& derived, std::uint64_t m) {
  AbelianizationReport r;
  r.order = group.order();
  r.index = r.order / derived.order();
  r.logm_index = log_record(r.index, m);
  r.log2_index = log_of(r.index) / std::log(2.0);
  std::size_t points = group.degree();
  if (points == 0) points = 1;
  std::uint64_t e = 0;
  if (exact_log(r.index, 2, e)) r.log2_index = static_cast<double>(e);
  r.easy_bound_slack = static_cast<double>(points - 1) - r.log2_index;
  r.easy_bound_holds = r.index <= (BigInt(1) << (points - 1));
  return r;
}

}  // namespace

AbelianizationReport abelianization_index(QuotientStore& store, const GroupSpec& spec,
                                          std::size_t n) {
  AbelianizationReport r = abelianization_from(*store.chain(spec, n), *store.derived(spec, n), spec.m);
  r.level = n;
  return r;
}

AbelianizationReport abelianization_of(std::span<const Permutation> gens, std::size_t degree,
                                       std::uint64_t m) {
  auto group = StabilizerChain::build(degree, gens);
  return abelianization_from(group, derived_subgroup(group), m);
}

OrbitStats orbit_stats(QuotientStore& store, const GroupSpec& spec, std::size_t n,
                       std::size_t k) {
  if (k < 1 || k > n) throw std::invalid_argument("orbit_stats: need 1 <= k <= n");
  const std::uint64_t m = spec.m;
  auto chain = store.chain(spec, n);
  OrbitStats s;
  s.level = n;
  s.window = k;
  s.m = spec.m;
  s.level_orbits = orbits(chain->generators(), chain->degree());
  s.orbits = s.level_orbits.size();

  // The image of a level-n orbit under truncation is a whole level-(n-k) orbit.
  const std::uint64_t branch = upow(m, k);
  std::vector<std::int64_t> label(upow(m, n - k), -1);
  std::vector<std::size_t> split;
  s.ancestor.resize(s.orbits);
  for (std::size_t i = 0; i < s.orbits; ++i) {
    const Orbit& o = s.level_orbits[i];
    std::int64_t& l0 = label[o.front() / branch];
    if (l0 < 0) {
      auto id = static_cast<std::int64_t>(split.size());
      for (Point x : o) label[x / branch] = id;
      split.push_back(0);
    }
    s.ancestor[i] = static_cast<std::size_t>(label[o.front() / branch]);
    ++split[s.ancestor[i]];
  }
  s.predecessor_orbits = split.size();
  s.in_a.resize(s.orbits);
  for (std::size_t i = 0; i < s.orbits; ++i) {
    s.in_a[i] = split[s.ancestor[i]] == branch;
    (s.in_a[i] ? s.a_orbits : s.b_orbits)++;
  }
  for (std::size_t c : split) {
    ++s.branching[c];
    if (c == branch) ++s.a_predecessors;
    if (2 * c > branch && c < branch) s.classification_gap = true;
  }
  s.counting_inequality = s.a_orbits + 2 * s.b_orbits <= branch * s.predecessor_orbits;

  s.abelianization = abelianization_index(store, spec, n);
  const double mn = static_cast<double>(upow(m, n));
  s.value = s.abelianization.logm_index.value / mn;
  s.bound = 1.0 / static_cast<double>(branch) + static_cast<double>(s.b_orbits) / mn;
  const LogRecord& a = s.abelianization.logm_index;
  if (a.exact && (a.exponent == 0 || a.prime == m)) {
    s.bound_exact = true;
    s.bound_holds = a.exponent <= upow(m, n - k) + s.b_orbits;
  } else {
    s.bound_holds = s.value <= s.bound * (1 + 1e-12);
  }
  return s;
}

PerfectnessScan perfectness_scan(QuotientStore& store, const GroupSpec& spec,
                                 std::size_t max_level, std::size_t k) {
  PerfectnessScan scan;
  scan.group = spec.name;
  scan.m = spec.m;
  scan.window = k;
  const std::uint64_t m = spec.m;
  auto stats = map_levels<OrbitStats>(std::max<std::size_t>(k, 1), max_level,
                                      store.options().jobs,
                                      [&](std::size_t n) { return orbit_stats(store, spec, n, k); });
  for (const auto& s : stats) {
    PerfectnessRow row;
    row.level = s.level;
    row.value = s.value;
    row.bound = s.bound;
    row.exact = s.bound_exact;
    if (row.exact) {
      row.value_num = s.abelianization.logm_index.exponent;
      row.bound_num = upow(m, s.level - k) + s.b_orbits;
    }
    row.holds = s.bound_holds;
    scan.bound_holds = scan.bound_holds && row.holds;
    scan.rows.push_back(row);
  }
  if (!scan.rows.empty()) {
    std::size_t i = scan.rows.size() - 1;
    while (i > 0 && scan.rows[i - 1].value > scan.rows[i].value) --i;
    scan.decreasing_from = scan.rows[i].level;
  }
  return scan;
}

namespace {

BigInt restricted_index(std::span<const Permutation> gens, std::vector<Point> points) {
  std::sort(points.begin(), points.end());
  auto local = restrict_to(gens, points);
  return abelianization_of(local, points.size()).index;
}

}  // namespace

DecompositionCheck invariant_decomposition(QuotientStore& store, const GroupSpec& spec,
                                           std::size_t n) {
  auto chain = store.chain(spec, n);
  DecompositionCheck c;
  c.level = n;
  c.index = abelianization_index(store, spec, n).index;
  c.product = 1;
  for (const auto& o : orbits(chain->generators(), chain->degree())) {
    c.product *= restricted_index(chain->generators(), o);
    ++c.parts;
  }
  c.holds = c.index <= c.product;
  return c;
}

AIdentification a_identification(QuotientStore& store, const GroupSpec& spec, std::size_t n,
                                 std::size_t k) {
  OrbitStats s = orbit_stats(store, spec, n, k);
  AIdentification a;
  a.level = n;
  a.window = k;
  const std::size_t branch = checked_pow(spec.m, k, std::size_t{1} << 62);
  std::vector<Point> a_pts;
  std::set<Point> p_pts;
  for (std::size_t i = 0; i < s.orbits; ++i) {
    if (!s.in_a[i]) continue;
    for (Point x : s.level_orbits[i]) {
      a_pts.push_back(x);
      p_pts.insert(static_cast<Point>(x / branch));
    }
  }
  a.a_points = a_pts.size();
  a.p_points = p_pts.size();
  if (a_pts.empty()) {
    a.a_index = a.p_index = 1;
    return a;
  }
  a.a_index = restricted_index(store.chain(spec, n)->generators(), a_pts);
  a.p_index = restricted_index(store.chain(spec, n - k)->generators(),
                               std::vector<Point>(p_pts.begin(), p_pts.end()));
  a.holds = a.a_index == a.p_index;
  return a;
}

std::vector<bool> level_transitivity(QuotientStore& store, const GroupSpec& spec,
                                     std::size_t n) {
  std::vector<bool> out{true};
  for (std::size_t l = 1; l <= n; ++l) {
    auto chain = store.chain(spec, l);
    out.push_back(orbits(chain->generators(), chain->degree()).size() == 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rigid stabilizers

LocalRigid local_rigid(QuotientStore& store, const GroupSpec& spec, const Vertex& v,
                       std::size_t n) {
  if (v.m() != spec.m) throw std::invalid_argument("local_rigid: vertex of a different tree");
  LeafRange block = leaf_index(v, n);
  auto chain = store.chain(spec, n);
  std::vector<Point> outside;
  for (std::size_t x = 0; x < chain->degree(); ++x) {
    if (!block.contains(x)) outside.push_back(static_cast<Point>(x));
  }
  StabilizerChain rist = pointwise_stabilizer(*chain, outside, store.options().chain);
  LocalRigid r{v, rist.order(), {}, 0.0, rist.generators()};
  r.logm_order = log_record(r.order, spec.m);
  double total = log_of(chain->order());
  r.ratio = total > 0 ? log_of(r.order) / total : 0.0;
  return r;
}

RigidReport rigid_level(QuotientStore& store, const GroupSpec& spec, std::size_t k,
                        std::size_t n) {
  if (k > n) throw LevelMismatch("rigid_level: k > n");
  RigidReport rep;
  rep.outer_level = k;
  rep.inner_level = n;
  rep.product = 1;
  std::vector<Permutation> gens;
  for (const auto& v : level_vertices(spec.m, k, store.options().cap)) {
    rep.vertices.push_back(local_rigid(store, spec, v, n));
    const LocalRigid& lr = rep.vertices.back();
    rep.product *= lr.order;
    gens.insert(gens.end(), lr.generators.begin(), lr.generators.end());
    if (lr.order != rep.vertices.front().order) rep.equal_orders = false;
  }
  StabilizerChain all = StabilizerChain::build(BlockHierarchy::regular_tree(spec.m, n), gens, {},
                                               store.options().chain);
  rep.order = all.order();
  rep.product_holds = rep.order == rep.product;
  double total = log_of(store.chain(spec, n)->order());
  rep.ratio = total > 0 ? log_of(rep.order) / total : 0.0;
  return rep;
}

StabilizerChain level_stabilizer(const StabilizerChain& group, std::size_t k) {
  if (group.prefix_length() != 0) {
    throw std::invalid_argument("level_stabilizer: chain has a custom base prefix");
  }
  if (k > group.hierarchy().depth()) throw LevelMismatch("level_stabilizer: k beyond depth");
  std::size_t count = 0;
  for (const auto& b : group.base()) {
    if (b.level <= k) ++count;
  }
  auto gens = group.stabilizer_generators(count);
  return StabilizerChain::build(group.hierarchy(), gens);
}

// ---------------------------------------------------------------------------
// G_K verifier

bool GKReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const GKCheck& c) { return c.passed; });
}

namespace {

// Acts as z inside every level-1 block.
Permutation diagonal_lift(const Permutation& z, std::size_t m) {
  std::size_t bs = z.degree();
  std::vector<Point> img(bs * m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < bs; ++i) img[c * bs + i] = static_cast<Point>(c * bs + z(static_cast<Point>(i)));
  }
  return Permutation::from_images(std::move(img));
}

// Moves level-1 block c to block r(c), rigidly.
Permutation rooted_lift(const Permutation& r, std::size_t block) {
  std::size_t m = r.degree();
  std::vector<Point> img(block * m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < block; ++i) img[c * block + i] = static_cast<Point>(r(static_cast<Point>(c)) * block + i);
  }
  return Permutation::from_images(std::move(img));
}

}  // namespace

GKReport verify_GK(QuotientStore& store, const GroupSpec& gk, std::size_t max_level) {
  if (gk.construction != Construction::gk || !gk.k) {
    throw ValidationError("verify_GK: spec \"" + gk.name + "\" is not a GK construction");
  }
  const GroupSpec& k = *gk.k;
  const std::size_t m = gk.m;
  const AnalysisOptions& opts = store.options();
  checked_pow(m, max_level, opts.cap);

  GKReport rep;
  rep.group = gk.name;
  rep.checks = {{"a", "level-transitive on every level <= n", true, {}},
                {"b", "rooted H is normal and [h, d(k)] = 1 for all generators", true, {}},
                {"c", "|pi_n(G_K)| = |H| * |pi_{n-1}(K)|", true, {}},
                {"d", "rist of every level-1 vertex is trivial", true, {}},
                {"e", "Z(pi_n(G_K)) = Z(H) x diag(Z(pi_{n-1}(K)))", true, {}},
                {"f", "g -> section of the D_m(K)-part: kernel = rooted H, image = pi_{n-1}(K)",
                 true, {}}};
  auto fail = [&](std::size_t idx, std::size_t n, const std::string& what) {
    GKCheck& c = rep.checks[idx];
    if (c.passed) c.witness = "n=" + std::to_string(n) + ": " + what;
    c.passed = false;
  };

  StabilizerChain hchain = StabilizerChain::build(m, gk.h);
  const BigInt horder = hchain.order();
  StabilizerChain zh = center(hchain, opts.search);
  const LogRecord htop = log_record(top_order(gk), m);
  auto rooted = rooted_generators(m, gk.h);
  auto rooted_zh = rooted_generators(m, zh.generators());

  for (std::size_t n = 2; n <= max_level; ++n) {
    GKLevel lvl;
    lvl.level = n;
    auto g = store.chain(gk, n);
    auto kq = store.chain(k, n - 1);
    const std::size_t block = kq->degree();
    const BlockHierarchy tree = BlockHierarchy::regular_tree(m, n);
    lvl.order = g->order();
    lvl.expected_order = horder * kq->order();
    double wreath = static_cast<double>(inner_vertices(m, n)) * htop.value;
    lvl.ratio = wreath > 0 ? log_record(lvl.order, m).value / wreath : 0.0;

    // (a)
    for (std::size_t l = 1; l <= n; ++l) {
      auto gl = store.chain(gk, l);
      std::size_t count = orbits(gl->generators(), gl->degree()).size();
      if (count != 1) {
        fail(0, n, "level " + std::to_string(l) + " has " + std::to_string(count) + " orbits");
        break;
      }
    }

    // (b)
    std::vector<Permutation> hn;
    for (const auto& r : rooted) hn.push_back(evaluate(r, n, opts.cap));
    StabilizerChain hsub = StabilizerChain::build(tree, hn);
    try {
      if (!is_normal(*g, hsub)) fail(1, n, "rooted H is not normal");
    } catch (const NotSubgroup&) {
      fail(1, n, "rooted H is not contained in pi_n(G_K)");
    }
    auto kgens = generators_at(k, n - 1, opts.cap);
    auto diag = diagonal(kgens);
    for (std::size_t i = 0; i < hn.size(); ++i) {
      for (std::size_t j = 0; j < diag.size(); ++j) {
        if (!commute(hn[i], evaluate(diag[j], n, opts.cap))) {
          fail(1, n, "[" + rooted[i].to_string() + ", " + diag[j].to_string() + "] != 1");
        }
      }
    }

    // (c)
    if (lvl.order != lvl.expected_order) {
      fail(2, n, "order " + to_decimal(lvl.order) + ", expected " + to_decimal(lvl.expected_order));
    }

    // (d)
    for (std::size_t x = 1; x <= m; ++x) {
      Vertex v(m, {static_cast<Vertex::Letter>(x)});
      BigInt o = local_rigid(store, gk, v, n).order;
      if (o != 1) fail(3, n, "rist(" + v.to_string() + ") has order " + to_decimal(o));
    }

    // (e)
    StabilizerChain z = center(*g, opts.search);
    std::vector<Permutation> expected;
    for (const auto& r : rooted_zh) expected.push_back(evaluate(r, n, opts.cap));
    StabilizerChain zk = center(*kq, opts.search);
    for (const auto& c : zk.generators()) expected.push_back(diagonal_lift(c, m));
    StabilizerChain e = StabilizerChain::build(tree, expected);
    lvl.center_order = z.order();
    lvl.expected_center_order = e.order();
    if (z.order() != e.order()) {
      fail(4, n, "|Z| = " + to_decimal(z.order()) + ", expected " + to_decimal(e.order()));
    }
    for (const auto& x : e.generators()) {
      if (!z.contains(x)) fail(4, n, "expected central element " + x.to_cycle_string(0) + " missing");
    }
    for (const auto& x : z.generators()) {
      if (!e.contains(x)) fail(4, n, "unexpected central element " + x.to_cycle_string(0));
    }

    // (f) Every generator splits as (rooted part) * (diagonal part); the
    // diagonal parts form a subgroup normalized by rooted elements, so the
    // map to the common section is a homomorphism on all of pi_n(G_K).
    std::vector<Permutation> image;
    for (const auto& x : g->generators()) {
      std::vector<Point> r(m);
      for (std::size_t c = 0; c < m; ++c) r[c] = x(static_cast<Point>(c * block)) / static_cast<Point>(block);
      Permutation root = Permutation::from_images(std::move(r));
      Permutation d = compose(rooted_lift(root, block).inverse(), x);
      std::vector<Point> sec(block);
      for (std::size_t i = 0; i < block; ++i) sec[i] = d(static_cast<Point>(i));
      Permutation s = Permutation::from_images(std::move(sec));
      if (diagonal_lift(s, m) != d) {
        fail(5, n, "generator with a non-diagonal stabilizer part");
        continue;
      }
      if (!hchain.contains(root)) fail(5, n, "root action outside H");
      image.push_back(std::move(s));
    }
    StabilizerChain im = StabilizerChain::build(BlockHierarchy::regular_tree(m, n - 1), image);
    if (im.order() != kq->order()) {
      fail(5, n, "image order " + to_decimal(im.order()) + ", |pi_{n-1}(K)| = " +
                     to_decimal(kq->order()));
    }
    for (const auto& x : im.generators()) {
      if (!kq->contains(x)) fail(5, n, "image element outside pi_{n-1}(K)");
    }
    if (im.order() * horder != lvl.order) {
      fail(5, n, "kernel order " + to_decimal(lvl.order / im.order()) + " != |H|");
    }
    rep.levels.push_back(std::move(lvl));
  }
  return rep;
}

}  // namespace treedim
