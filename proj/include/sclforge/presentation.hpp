#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sclforge/word.hpp"

namespace sclforge {

/// Raised when a pair stream breaks n_i < n_{i+1}, m_i/n_i >= m_{i+1}/n_{i+1}
/// or positivity. `index()` is the 1-based offending index.
class SequenceError : public std::runtime_error {
 public:
  SequenceError(const std::string& message, std::uint64_t index);
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t index_;
};

class PresentationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairValue {
  BigInt m;
  BigInt n;

  Rational value() const { return make_rational(m, n); }
  friend bool operator==(const PairValue&, const PairValue&) = default;
};

/// Memoized stream of pairs (m_i, n_i), i >= 1. The producer is called
/// exactly once per index, in increasing order, so it may carry state.
class SeqPair {
 public:
  using Producer = std::function<PairValue(std::uint64_t)>;

  explicit SeqPair(Producer producer, std::optional<std::uint64_t> length = std::nullopt,
                   std::optional<Rational> declared_limit = std::nullopt);

  static SeqPair from_lists(const std::vector<BigInt>& m, const std::vector<BigInt>& n,
                            std::optional<Rational> declared_limit = std::nullopt);

  /// 1-based; materializes and validates the prefix up to i.
  PairValue at(std::uint64_t i) const;
  Rational value(std::uint64_t i) const { return at(i).value(); }
  std::vector<PairValue> prefix(std::uint64_t k) const;

  std::optional<std::uint64_t> length() const;
  const std::optional<Rational>& declared_limit() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

struct FamilyInfo {
  SeqPair seq;
  std::optional<BigInt> l_override;
};

/// Alphabet plus a pull-based, memoized relator stream (indices from 1).
/// Copies share the cache.
class Presentation {
 public:
  using RelatorProducer = std::function<CyclicWord(std::uint64_t)>;

  static Presentation finite(Alphabet alphabet, std::vector<CyclicWord> relators);
  static Presentation recursive(Alphabet alphabet, RelatorProducer producer,
                                std::optional<std::uint64_t> count = std::nullopt);

  const Alphabet& alphabet() const;
  /// Throws PresentationError past the end of a finite stream.
  const CyclicWord& relator(std::uint64_t i) const;
  std::vector<CyclicWord> prefix(std::uint64_t k) const;
  std::optional<std::uint64_t> relator_count() const;
  std::uint64_t cached_count() const;

  const FamilyInfo* family() const;
  /// Prefix size declared by the file this came from (or relator count).
  std::optional<std::uint64_t> prefix_hint() const;
  void set_prefix_hint(std::uint64_t k);

 private:
  friend Presentation family_presentation(const SeqPair&, const std::optional<BigInt>&);
  struct State;
  std::shared_ptr<State> state_;
};

// The relator family over { t, a, b, c, s1, ..., s9 }.

Alphabet family_alphabet();

/// w_N = a^N b^N c^N a^-N b^-N c^-N
PowerWord build_w(std::uint64_t N);

/// l = 6 * 5^N * 7^m * 11^n
BigInt family_l(std::uint64_t N, std::uint64_t m, std::uint64_t n);

struct SWord {
  PowerWord word;
  BigInt l;
};

/// The 18-run word s_{N,m,n}; l_override replaces l (testing only).
SWord build_s(std::uint64_t N, std::uint64_t m, std::uint64_t n,
              const std::optional<BigInt>& l_override = std::nullopt);

/// r_{m,n,N} = t^n w_N^{2m} s_{N,m,n}
CyclicWord build_r(std::uint64_t m, std::uint64_t n, std::uint64_t N,
                   const std::optional<BigInt>& l_override = std::nullopt);

/// Relators i -> r_{m_i, n_i, i}.
Presentation family_presentation(const SeqPair& seq, const std::optional<BigInt>& l_override = std::nullopt);

enum class PairKind { Self, SelfInverse, Direct, Inverse };

std::string_view to_string(PairKind kind);

struct PieceEntry {
  std::uint64_t i;
  std::uint64_t j;
  PairKind kind;
  BigInt piece;
  /// piece / min(|r_i|, |r_j|)
  Rational ratio;
};

struct PiecesReport {
  std::vector<BigInt> relator_lengths;
  std::vector<PieceEntry> entries;
  Rational worst_ratio;
  Rational lambda;
  bool pass = false;
};

/// C'(lambda) over the symmetrized prefix r_1..r_k: every piece must be
/// strictly shorter than lambda times each relator containing it.
PiecesReport check_c_prime(const Presentation& pres, std::uint64_t k, const Rational& lambda = Rational(1, 6));

// File format: "gens:" line, "rel:" lines, optional
// "family: m=<list> n=<list> k=<int> [l_override=<int>]", '#' comments.

Presentation parse_presentation(std::string_view text);
std::string print_presentation(const Presentation& pres, std::uint64_t k);

}  // namespace sclforge
