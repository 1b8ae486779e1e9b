#pragma once

// Commutator certificates, the scl bound calculus and the bounded search
// for cl(g^N) <= qN.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sclforge/diagram.hpp"
#include "sclforge/presentation.hpp"

namespace sclforge {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RelatorFactor {
  PowerWord conjugator;
  std::uint64_t index = 1;
  int sign = 1;
  friend bool operator==(const RelatorFactor&, const RelatorFactor&) = default;
};

/// Claims target^power = prod [x_i, y_i] * prod u_j r_{i_j}^{+-1} u_j^-1.
struct CommutatorCertificate {
  PowerWord target;
  BigInt power = 1;
  std::vector<std::pair<PowerWord, PowerWord>> commutators;
  std::vector<RelatorFactor> relators;
  friend bool operator==(const CommutatorCertificate&, const CommutatorCertificate&) = default;
};

struct VerifyResult {
  bool pass;
  /// Free reduction of target^-power * (claimed product); empty iff pass.
  PowerWord residue;
};

VerifyResult verify_certificate(const CommutatorCertificate& cert, const Presentation& pres);

// File format:
//   target: <word>
//   power: <int>
//   comm: <word> | <word>
//   relfac: <word> | <index> | <+1|-1>
CommutatorCertificate parse_certificate(std::string_view text, const Alphabet& alphabet);
std::string print_certificate(const CommutatorCertificate& cert, const Alphabet& alphabet);

/// Certificate for t^n from the relator r_{m,n,N} at index N of `pres`:
/// three commutators for s^-1, 2m for w^-2m and the relator conjugated by
/// w^2m s. A family presentation supplies its own l_override; otherwise the
/// argument is used.
CommutatorCertificate family_upper_certificate(std::uint64_t m, std::uint64_t n, std::uint64_t N,
                                               const Presentation& pres,
                                               const std::optional<BigInt>& l_override = std::nullopt);

// Bound calculus.

enum class Rule {
  Atom,              // caller-supplied bound
  HomMonotone,       // scl_G(f(g)) <= scl_H(g)
  Product,           // scl(g1...gk) <= sum + (k-1)/2
  Commutator,        // scl([g,h]) <= 1/2
  Power,             // scl(g^k) = k scl(g)
  Root,              // scl(g) = scl(g^k) / k
  Inverse,           // scl(g^-1) = scl(g)
  CommutatorProduct, // cl(g) <= k gives scl(g) <= k, or k - 1/2 with cl-half
};

std::string_view rule_name(Rule rule);

struct BoundExpr {
  Rule rule = Rule::Atom;
  std::string label;
  std::optional<Rational> atom_bound;  // Atom only
  BigInt k = 1;                        // Power, Root, CommutatorProduct
  std::vector<std::shared_ptr<const BoundExpr>> children;

  static BoundExpr atom(std::string label, std::optional<Rational> bound);
  static BoundExpr commutator(std::string label = "[g,h]");
  static BoundExpr commutator_product(BigInt k, std::string label = "");
  static BoundExpr product(std::vector<BoundExpr> factors, std::string label = "");
  static BoundExpr power(BoundExpr base, BigInt k, std::string label = "");
  static BoundExpr root(BoundExpr power, BigInt k, std::string label = "");
  static BoundExpr inverse(BoundExpr base, std::string label = "");
  static BoundExpr hom(BoundExpr source, std::string label = "");
};

struct BoundDerivation {
  Rule rule;
  std::string label;
  Rational bound;
  bool used_cl_half = false;
  std::vector<BoundDerivation> premises;
};

/// Bottom-up evaluation; throws CertificateError on an atom without bound.
BoundDerivation derive_bound(const BoundExpr& expr, bool cl_half = false);
std::string format_derivation(const BoundDerivation& d);

/// Expression syntax: comm | cl(k) | atom(name, p/q) | prod(e, ...) |
/// pow(e, k) | root(e, k) | inv(e) | hom(e).
BoundExpr parse_bound_expr(std::string_view text);

/// scl(t) <= (m + 7/2)/n, or (m + 3)/n with cl-half.
BoundExpr family_bound_expr(std::uint64_t m, std::uint64_t n);

// Bounded search for cl(g^N) <= floor(qN).

struct SearchConfig {
  std::uint64_t max_len = 2;           // letters per commutator word / conjugator
  std::uint64_t max_commutators = 8;   // cap on floor(qN)
  std::uint64_t max_relator_factors = 2;
  std::uint64_t max_relator_index = 1;
  unsigned workers = 1;
  std::uint64_t budget = 1'000'000;    // candidate count
  std::uint64_t batch = 4096;
  void validate() const;
};

/// Default budget, or SCLFORGE_BUDGET when set.
std::uint64_t default_budget();

struct SearchResult {
  enum class Status { Halt, BudgetExhausted } status;
  std::optional<CommutatorCertificate> witness;
  std::uint64_t candidates = 0;
  std::uint64_t q_prime = 0;
  /// The configured space was searched completely.
  bool space_exhausted = false;
  std::vector<std::string> warnings;
};

SearchResult cl_search(const Presentation& pres, const PowerWord& g, const BigInt& N, const Rational& q,
                       const SearchConfig& cfg);

// Report over a family prefix.

struct ReportRow {
  std::uint64_t i;
  BigInt m, n;
  Rational value;        // m/n
  Rational bound;        // (m + 7/2)/n
  Rational bound_cl_half;  // (m + 3)/n
  bool certificate_verified;
};

struct FixtureBound {
  std::string name;
  std::optional<Rational> upper;
  std::string error;
};

struct SclReport {
  std::vector<ReportRow> rows;
  std::vector<FixtureBound> fixtures;
  std::optional<Rational> target;
  bool target_declared;  // false: last prefix value used as the trend
  std::optional<BigInt> l_override;
};

SclReport scl_report(const Presentation& family, std::uint64_t k,
                     const std::vector<std::pair<std::string, ValidatedDiagram>>& fixtures = {});
std::string format_report_tsv(const SclReport& report);

}  // namespace sclforge
