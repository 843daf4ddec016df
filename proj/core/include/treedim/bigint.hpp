#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace treedim {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigInt& x) { return x.str(); }

/// Exact base-b logarithm when x is a power of b.
inline bool exact_log(const BigInt& x, std::uint64_t base, std::uint64_t& out) {
  if (x <= 0 || base < 2) return false;
  BigInt v = x;
  std::uint64_t e = 0;
  while (v > 1) {
    if (v % base != 0) return false;
    v /= base;
    ++e;
  }
  out = e;
  return true;
}

/// Natural logarithm of a positive big integer, accurate to double precision.
double log_of(const BigInt& x);

}  // namespace treedim
