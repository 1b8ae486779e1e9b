#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sclforge {

using BigInt = mpz_class;
using Rational = mpq_class;

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

std::string to_string(const BigInt& value);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Fixed-point rendering with `digits` fractional digits, rounded half away
/// from zero.
std::string to_decimal(const Rational& value, unsigned digits = 40);

BigInt parse_bigint(std::string_view text);

/// Accepts "p", "p/q" and "-p/q". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

Rational make_rational(const BigInt& num, const BigInt& den);

/// Converts to a machine integer or throws RangeError naming `what`.
std::uint64_t to_u64(const BigInt& value, std::string_view what);

BigInt pow_ui(unsigned long base, std::uint64_t exponent);

inline int sign(const BigInt& value) { return sgn(value); }

}  // namespace sclforge
