#include <gtest/gtest.h>

#include <filesystem>

#include "treedim/analysis.hpp"
#include "treedim/errors.hpp"
#include "treedim/specfile.hpp"

using namespace treedim;

namespace {

const std::filesystem::path kData = TREEDIM_TEST_DATA;

std::string expect_validation(const std::string& text) {
  try {
    parse_spec(text, "t.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError for " << text;
  return {};
}

bool same_quotients(const GroupSpec& a, const GroupSpec& b, std::size_t levels) {
  for (std::size_t n = 0; n <= levels; ++n) {
    if (quotient(a, n).order() != quotient(b, n).order()) return false;
    auto ga = quotient_generators(a, n);
    auto gb = quotient_generators(b, n);
    if (ga != gb) return false;
  }
  return true;
}

}  // namespace

TEST(CycleString, Parse) {
  EXPECT_EQ(parse_cycle_string(2, "(1 2)"), Permutation::from_cycles(2, {{0, 1}}));
  EXPECT_TRUE(parse_cycle_string(3, "()").is_identity());
  EXPECT_THROW(parse_cycle_string(3, ""), ParseError);
  EXPECT_EQ(parse_cycle_string(4, "(1 2)(3 4)"), Permutation::from_cycles(4, {{0, 1}, {2, 3}}));
  EXPECT_THROW(parse_cycle_string(2, "(1 3)"), ParseError);
  EXPECT_THROW(parse_cycle_string(3, "(1 1)"), ParseError);
  EXPECT_THROW(parse_cycle_string(3, "(1 2"), ParseError);
  EXPECT_THROW(parse_cycle_string(3, "1 2"), ParseError);
}

TEST(SpecFile, FixturesRoundTrip) {
  for (const auto& [name, spec] : fixtures()) {
    std::string text = emit_spec(*spec);
    auto back = parse_spec(text);
    EXPECT_EQ(emit_spec(*back), text) << name;
    EXPECT_EQ(spec_hash(*back), spec_hash(*spec));
    EXPECT_TRUE(same_quotients(*spec, *back, spec->m == 2 ? 4 : 3)) << name;
  }
}

TEST(SpecFile, HashSeparatesSpecs) {
  EXPECT_NE(spec_hash(*fixture("odometer")), spec_hash(*fixture("grigorchuk")));
  EXPECT_NE(spec_hash(*fixture("w2")), spec_hash(*fixture("gk-w2")));
  EXPECT_EQ(spec_hash(*fixture("w2")).size(), 16u);
}

TEST(SpecFile, SectionTypoNamesState) {
  std::string msg = expect_validation(R"J({"name":"x","m":2,"top":["(1 2)"],
    "states":{"a":{"root":"(1 2)","sections":["1","aa"]}},"generators":["a"]})J");
  EXPECT_NE(msg.find("aa"), std::string::npos) << msg;
  EXPECT_NE(msg.find("states.a.sections[1]"), std::string::npos) << msg;
}

TEST(SpecFile, GKNotTransitive) {
  std::string msg = expect_validation(R"J({"name":"x","m":3,"top":["(1 2)"],
    "construction":{"type":"GK","H":["(1 2)"],"K":"odometer3"}})J");
  EXPECT_NE(msg.find("not transitive"), std::string::npos) << msg;
}

TEST(SpecFile, RootOutsideTop) {
  expect_validation(R"J({"name":"x","m":3,"top":["(1 2 3)"],
    "states":{"a":{"root":"(1 2)","sections":["1","1","a"]}},"generators":["a"]})J");
}

TEST(SpecFile, OtherValidationErrors) {
  expect_validation(R"J({"name":"x","m":2,"top":[],"bogus":1})J");
  expect_validation(R"J({"name":"x","m":1,"top":[]})J");
  expect_validation(R"J({"name":"x","m":2,"top":["(1 2)"],"generators":["q"]})J");
  expect_validation(R"J({"name":"x","m":2,"top":["(1 2)"],"construction":{"type":"spiral"}})J");
  expect_validation(R"J({"name":"x","m":2,"top":["(1 2)"],"construction":{"type":"GK","H":["(1 2)"]}})J");
  expect_validation(R"J({"schema_version":7,"name":"x","m":2,"top":[]})J");
  expect_validation(R"J({"name":"x","m":"two","top":[]})J");
}

TEST(SpecFile, SyntaxErrorIsParseError) {
  try {
    parse_spec("{\n  \"name\": \"x\",\n  \"m\": 2,,\n}", "broken.json");
    FAIL() << "no ParseError";
  } catch (const ParseError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("broken.json"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(SpecFile, LoadFromFilesAndNestedK) {
  auto l = load_spec(kData / "lamplighter.json");
  EXPECT_EQ(l->name, "lamplighter");
  EXPECT_EQ(quotient(*l, 3).order(), quotient(*l, 3).order());
  auto gk = load_spec(kData / "gk-lamplighter.json");
  ASSERT_TRUE(gk->k);
  EXPECT_EQ(gk->k->name, "lamplighter");
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_EQ(quotient(*gk, n).order(), 2 * quotient(*l, n - 1).order());
  }
  EXPECT_THROW(load_spec(kData / "missing.json"), ParseError);
}

TEST(SpecFile, ResolveSpec) {
  EXPECT_EQ(resolve_spec("odometer"), fixture("odometer"));
  EXPECT_EQ(resolve_spec((kData / "lamplighter.json").string())->name, "lamplighter");
  EXPECT_THROW(resolve_spec("no-such-thing"), ParseError);
}
