#pragma once

// Free-group words in run-length form. Every operation works on
// (generator, exponent) runs; nothing here expands a power into letters.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sclforge/numeric.hpp"

namespace sclforge {

using GenId = std::uint32_t;

class AlphabetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Syntax error with a 1-based line/column position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Generator {
  GenId id;
  std::string name;
};

class PowerWord;

class Alphabet {
 public:
  Alphabet() = default;
  /// Names must match [A-Za-z][A-Za-z0-9]* and be unique.
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return generators_.size(); }
  const std::string& name(GenId id) const;
  std::optional<GenId> find(std::string_view name) const;
  GenId id_of(std::string_view name) const;
  const std::vector<Generator>& generators() const { return generators_; }
  bool contains(GenId id) const { return id < generators_.size(); }

  /// Throws AlphabetError if `word` mentions an id outside this alphabet.
  void check(const PowerWord& word) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.names_equal(b);
  }

 private:
  bool names_equal(const Alphabet& other) const;

  std::vector<Generator> generators_;
  std::unordered_map<std::string, GenId> by_name_;
};

struct Run {
  GenId gen;
  BigInt exp;

  friend bool operator==(const Run& a, const Run& b) { return a.gen == b.gen && a.exp == b.exp; }
};

/// Freely reduced word: no zero exponents, adjacent runs have distinct ids.
class PowerWord {
 public:
  PowerWord() = default;

  static PowerWord letter(GenId gen, const BigInt& exp = 1);

  const std::vector<Run>& runs() const { return runs_; }
  bool empty() const { return runs_.empty(); }
  std::size_t run_count() const { return runs_.size(); }
  BigInt letter_length() const;

  PowerWord inverse() const;
  /// Exact power for any integer k; large k only stays cheap when the
  /// cyclic core is a single run.
  PowerWord power(const BigInt& k) const;

  /// Appends `raw` with free reduction at the junction only.
  void append(const Run& raw);
  void append(const PowerWord& other);

  friend bool operator==(const PowerWord& a, const PowerWord& b) { return a.runs_ == b.runs_; }
  friend PowerWord operator*(const PowerWord& a, const PowerWord& b);

 private:
  std::vector<Run> runs_;
};

/// Free reduction of an arbitrary run list (zero exponents allowed).
PowerWord reduce(std::span<const Run> raw);
/// Same, rejecting ids outside `alphabet`.
PowerWord reduce(const Alphabet& alphabet, std::span<const Run> raw);

PowerWord multiply(const PowerWord& u, const PowerWord& v);
PowerWord invert(const PowerWord& u);
/// g u g^-1
PowerWord conjugate(const PowerWord& u, const PowerWord& g);
/// x y x^-1 y^-1
PowerWord commutator(const PowerWord& x, const PowerWord& y);
BigInt letter_length(const PowerWord& u);

/// Letters [begin, end) of u as a word (no reduction needed: a subword of a
/// reduced word is reduced).
PowerWord slice(const PowerWord& u, const BigInt& begin, const BigInt& end);

/// Total order on runs used for canonical rotations: id ascending, positive
/// before negative, larger |exponent| first.
int compare_runs(const Run& a, const Run& b);

struct CyclicReduction;

/// Cyclically reduced word in canonical rotation.
class CyclicWord {
 public:
  CyclicWord() = default;

  const PowerWord& word() const { return word_; }
  const std::vector<Run>& runs() const { return word_.runs(); }
  bool empty() const { return word_.empty(); }
  std::size_t run_count() const { return word_.run_count(); }
  BigInt letter_length() const { return word_.letter_length(); }
  CyclicWord inverse() const;

  friend bool operator==(const CyclicWord& a, const CyclicWord& b) { return a.word_ == b.word_; }

 private:
  friend CyclicReduction cyclic_reduce(const PowerWord& u);
  explicit CyclicWord(PowerWord w) : word_(std::move(w)) {}
  PowerWord word_;
};

struct CyclicReduction {
  CyclicWord core;
  /// u = conjugator * core * conjugator^-1
  PowerWord conjugator;
};

CyclicReduction cyclic_reduce(const PowerWord& u);

/// Exponent sum per generator (size = alphabet_size).
std::vector<BigInt> exponent_sums(const PowerWord& u, std::size_t alphabet_size);

// Text form: word := term (SP term)* | "1"; term := name ("^" int)? | "(" word ")" "^" int

PowerWord parse_word(std::string_view text, const Alphabet& alphabet);
/// As parse_word, reporting errors at `line` with columns shifted by
/// `column_offset` (for words embedded in larger files).
PowerWord parse_word_at(std::string_view text, const Alphabet& alphabet, std::size_t line,
                        std::size_t column_offset);
/// Expanded runs ("a^2 b^-1"), "1" for the empty word. With `compact`,
/// repeated blocks of runs are folded into "(...)^k".
std::string format_word(const PowerWord& u, const Alphabet& alphabet, bool compact = false);
std::string format_word(const CyclicWord& u, const Alphabet& alphabet, bool compact = false);

}  // namespace sclforge
