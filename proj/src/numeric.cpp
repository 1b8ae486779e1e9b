#include "sclforge/numeric.hpp"

#include <cctype>
#include <limits>

namespace sclforge {

std::string to_string(const BigInt& value) { return value.get_str(); }

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

std::string to_decimal(const Rational& value, unsigned digits) {
  Rational v = value;
  v.canonicalize();
  const bool negative = sgn(v) < 0;
  if (negative) v = -v;
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  // round(v * scale) with halves going up (v is non-negative here)
  BigInt scaled_num = v.get_num() * scale * 2 + v.get_den();
  BigInt denom = v.get_den() * 2;
  BigInt rounded;
  mpz_fdiv_q(rounded.get_mpz_t(), scaled_num.get_mpz_t(), denom.get_mpz_t());
  std::string s = rounded.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  std::string out = s.substr(0, s.size() - digits);
  if (digits > 0) out += "." + s.substr(s.size() - digits);
  if (negative && rounded != 0) out.insert(0, "-");
  return out;
}

BigInt parse_bigint(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  if (i == text.size()) throw std::invalid_argument("expected integer, got '" + std::string(text) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j])))
      throw std::invalid_argument("expected integer, got '" + std::string(text) + "'");
  }
  std::string body(text[0] == '+' ? text.substr(1) : text);
  return BigInt(body, 10);
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  BigInt num = parse_bigint(text.substr(0, slash));
  BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return make_rational(num, den);
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::uint64_t to_u64(const BigInt& value, std::string_view what) {
  if (sgn(value) < 0 || mpz_sizeinbase(value.get_mpz_t(), 2) > 64)
    throw RangeError(std::string(what) + " out of range: " + value.get_str());
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, value.get_mpz_t());
  return out;
}

BigInt pow_ui(unsigned long base, std::uint64_t exponent) {
  if (exponent > std::numeric_limits<unsigned long>::max()) throw RangeError("exponent too large");
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, static_cast<unsigned long>(exponent));
  return out;
}

}  // namespace sclforge
