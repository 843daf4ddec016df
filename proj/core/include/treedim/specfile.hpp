#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "treedim/constructions.hpp"
#include "treedim/permutation.hpp"

namespace treedim {

inline constexpr int kSpecSchemaVersion = 1;

/// Parses 1-based cycle notation such as "(1 2)(3 4)"; "()" is the identity.
/// Throws ParseError.
Permutation parse_cycle_string(std::size_t degree, std::string_view text);

/// Canonical JSON text of a spec. Derived constructions embed K inline.
std::string emit_spec(const GroupSpec& spec);

/// Parses a JSON group spec. `origin` prefixes error messages; a string "K"
/// names a fixture or a spec file relative to `base_dir`.
/// Throws ParseError (syntax) or ValidationError (content).
GroupSpecPtr parse_spec(std::string_view text, std::string_view origin = "<input>",
                        const std::filesystem::path& base_dir = {});
GroupSpecPtr load_spec(const std::filesystem::path& path);

/// A fixture name, or else a path to a spec file.
GroupSpecPtr resolve_spec(const std::string& name_or_path);

/// Hex digest of the canonical text; the cache key of a spec.
std::string spec_hash(const GroupSpec& spec);

}  // namespace treedim
