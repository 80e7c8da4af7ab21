#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbqs {

/// Arbitrary-precision integer used wherever product terms can appear:
/// products of bases grow exponentially in the number of factors.
using BigInt = boost::multiprecision::cpp_int;

/// 128-bit working width for all polynomial-side accumulators.
using Wide = __int128;

/// Thrown when a value no longer fits the 128-bit working width (or an
/// int64 storage slot). Arithmetic never wraps silently.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Wide checked_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int128 add overflow");
  return r;
}

inline Wide checked_sub(Wide a, Wide b) {
  Wide r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int128 sub overflow");
  return r;
}

inline Wide checked_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int128 mul overflow");
  return r;
}

inline bool fits_i64(Wide v) {
  return v >= Wide(INT64_MIN) && v <= Wide(INT64_MAX);
}

inline std::int64_t narrow_i64(Wide v) {
  if (!fits_i64(v)) throw OverflowError("value does not fit int64");
  return static_cast<std::int64_t>(v);
}

inline BigInt to_big(Wide v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  BigInt b = static_cast<std::uint64_t>(u >> 64);
  b <<= 64;
  b += static_cast<std::uint64_t>(u);
  return neg ? -b : b;
}

inline std::string to_string(Wide v) { return to_big(v).str(); }

}  // namespace cbqs
