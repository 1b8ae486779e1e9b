#include "sclforge/rc.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace sclforge {

namespace {

Rational pow2_inv(std::uint64_t k) {
  Rational r(1);
  mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), k);
  return r;
}

bool is_prime(std::uint64_t i) {
  if (i < 2) return false;
  for (std::uint64_t d = 2; d * d <= i; ++d)
    if (i % d == 0) return false;
  return true;
}

}  // namespace

Rational specker_partial(const MembershipOracle& A, std::uint64_t k) {
  Rational sum(0);
  for (std::uint64_t i = 1; i <= k; ++i)
    if (!A(i)) sum += pow2_inv(i);
  return sum;
}

CutEnumerator specker_cut(const MembershipOracle& A, std::optional<Rational> limit) {
  // Partial sums are cached so sequential consumption stays linear.
  struct Cache {
    std::vector<Rational> partial{Rational(0)};
  };
  auto cache = std::make_shared<Cache>();
  auto produce = [A, cache](std::uint64_t j) {
    if (j == 0) throw std::invalid_argument("cut indices start at 1");
    auto& p = cache->partial;
    while (p.size() <= j) {
      const std::uint64_t i = p.size();
      p.push_back(A(i) ? p.back() : Rational(p.back() + pow2_inv(i)));
    }
    return Rational(p[j] + pow2_inv(j) + pow2_inv(2 * j));
  };
  return CutEnumerator{produce, std::move(limit)};
}

MembershipOracle builtin_set(std::string_view name) {
  if (name == "empty") return [](std::uint64_t) { return false; };
  if (name == "all") return [](std::uint64_t) { return true; };
  if (name == "evens") return [](std::uint64_t i) { return i % 2 == 0; };
  if (name == "odds") return [](std::uint64_t i) { return i % 2 == 1; };
  if (name == "squares")
    return [](std::uint64_t i) {
      std::uint64_t r = 0;
      while ((r + 1) * (r + 1) <= i) ++r;
      return r * r == i;
    };
  if (name == "primes") return is_prime;
  throw std::invalid_argument("unknown set '" + std::string(name) + "' (empty, all, evens, odds, squares, primes)");
}

std::optional<Rational> builtin_specker_limit(std::string_view name) {
  if (name == "empty") return Rational(1);
  if (name == "all") return Rational(0);
  if (name == "evens") return Rational(2, 3);
  if (name == "odds") return Rational(1, 3);
  return std::nullopt;
}

PairValue MonotoneEncoder::next(const Rational& value) {
  const BigInt& p = value.get_num();
  const BigInt& q = value.get_den();
  BigInt c = prev_n_ / q + 1;
  PairValue out{c * p, c * q};
  prev_n_ = out.n;
  return out;
}

MonotonePrefix cut_to_monotone(const CutEnumerator& cut, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("prefix length must be at least 1");
  MonotonePrefix out;
  out.pairs.reserve(k);
  MonotoneEncoder encoder;
  Rational running;
  for (std::uint64_t j = 1; j <= k; ++j) {
    Rational q = cut.produce(j);
    if (j == 1 || q < running) running = q;
    if (sgn(running) <= 0) out.nonpositive = true;
    out.pairs.push_back(encoder.next(running));
  }
  return out;
}

MonotoneApprox monotone_stream(const CutEnumerator& cut) {
  struct State {
    MonotoneEncoder encoder;
    std::optional<Rational> running;
  };
  auto state = std::make_shared<State>();
  auto produce = [cut, state](std::uint64_t j) {
    Rational q = cut.produce(j);
    if (!state->running || q < *state->running) state->running = q;
    return state->encoder.next(*state->running);
  };
  return MonotoneApprox(produce, std::nullopt, cut.infimum);
}

MonotoneApprox rational_approx(const Rational& value) {
  if (sgn(value) < 0) throw RangeError("rational_approx needs a non-negative value");
  if (sgn(value) == 0)
    return MonotoneApprox([](std::uint64_t i) { return PairValue{1, BigInt(std::to_string(i))}; }, std::nullopt,
                          Rational(0));
  const BigInt p = value.get_num();
  const BigInt q = value.get_den();
  return MonotoneApprox(
      [p, q](std::uint64_t i) {
        const BigInt k(std::to_string(i));
        return PairValue{k * p, k * q};
      },
      std::nullopt, value);
}

MonotoneApprox add_approx(const MonotoneApprox& x, const MonotoneApprox& y) {
  auto encoder = std::make_shared<MonotoneEncoder>();
  auto produce = [x, y, encoder](std::uint64_t i) { return encoder->next(x.value(i) + y.value(i)); };
  std::optional<std::uint64_t> length;
  if (x.length() && y.length()) length = std::min(*x.length(), *y.length());
  else if (x.length()) length = x.length();
  else if (y.length()) length = y.length();
  std::optional<Rational> limit;
  if (x.declared_limit() && y.declared_limit()) limit = *x.declared_limit() + *y.declared_limit();
  return MonotoneApprox(produce, length, limit);
}

}  // namespace sclforge
