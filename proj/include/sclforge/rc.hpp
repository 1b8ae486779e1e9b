#pragma once

// Right-computable numbers as rational streams.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sclforge/presentation.hpp"

namespace sclforge {

/// Decides i in A for i >= 1.
using MembershipOracle = std::function<bool(std::uint64_t)>;

/// Stream q_1, q_2, ... of rationals, each strictly above the target.
struct CutEnumerator {
  std::function<Rational(std::uint64_t)> produce;
  /// Exact infimum when the caller knows it.
  std::optional<Rational> infimum;
};

/// Pairs with n strictly increasing and m/n non-increasing; the same
/// contract as a SeqPair, so it is one.
using MonotoneApprox = SeqPair;

/// sum_{i <= k, i not in A} 2^-i
Rational specker_partial(const MembershipOracle& A, std::uint64_t k);

/// q_j = specker_partial(A, j) + 2^-j + 2^-2j
CutEnumerator specker_cut(const MembershipOracle& A, std::optional<Rational> limit = std::nullopt);

/// Named sets for the CLI: empty, all, evens, odds, squares, primes.
MembershipOracle builtin_set(std::string_view name);
/// Closed form of the Specker number for the sets that have one.
std::optional<Rational> builtin_specker_limit(std::string_view name);

/// Encodes a non-increasing value stream as pairs: each value p/q in lowest
/// terms is scaled by the least c >= 1 with c*q above the previous n.
class MonotoneEncoder {
 public:
  PairValue next(const Rational& value);

 private:
  BigInt prev_n_ = 0;
};

struct MonotonePrefix {
  std::vector<PairValue> pairs;
  /// The cut produced a value <= 0; pairs past that point have m <= 0 and
  /// do not form a valid SeqPair.
  bool nonpositive = false;
};

/// Running minimum of the first k cut values, encoded by MonotoneEncoder.
MonotonePrefix cut_to_monotone(const CutEnumerator& cut, std::uint64_t k);

/// Lazy version of cut_to_monotone; throws SequenceError at a value <= 0.
MonotoneApprox monotone_stream(const CutEnumerator& cut);

/// (i p, i q); zero is approximated by (1, i).
MonotoneApprox rational_approx(const Rational& value);

MonotoneApprox add_approx(const MonotoneApprox& x, const MonotoneApprox& y);

}  // namespace sclforge
