#include "sclforge/scl.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace sclforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void check_word(const Alphabet& alphabet, const PowerWord& w, const std::string& what) {
  try {
    alphabet.check(w);
  } catch (const AlphabetError& e) {
    throw CertificateError(what + ": " + e.what());
  }
}

}  // namespace

VerifyResult verify_certificate(const CommutatorCertificate& cert, const Presentation& pres) {
  const Alphabet& alphabet = pres.alphabet();
  if (cert.power < 1) throw CertificateError("power must be positive");
  check_word(alphabet, cert.target, "target");
  PowerWord acc = cert.target.power(cert.power).inverse();
  for (std::size_t i = 0; i < cert.commutators.size(); ++i) {
    const auto& [x, y] = cert.commutators[i];
    check_word(alphabet, x, "commutator " + std::to_string(i + 1));
    check_word(alphabet, y, "commutator " + std::to_string(i + 1));
    acc.append(commutator(x, y));
  }
  for (std::size_t j = 0; j < cert.relators.size(); ++j) {
    const auto& f = cert.relators[j];
    check_word(alphabet, f.conjugator, "relator factor " + std::to_string(j + 1));
    if (f.sign != 1 && f.sign != -1) throw CertificateError("relator factor sign must be +1 or -1");
    CyclicWord r;
    try {
      r = pres.relator(f.index);
    } catch (const std::exception& e) {
      throw CertificateError("relator factor " + std::to_string(j + 1) + ": " + e.what());
    }
    acc.append(conjugate(f.sign == 1 ? r.word() : r.word().inverse(), f.conjugator));
  }
  return {acc.empty(), acc};
}

CommutatorCertificate parse_certificate(std::string_view text, const Alphabet& alphabet) {
  CommutatorCertificate cert;
  bool have_target = false, have_power = false;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'key: value'", line_no, 1);
    std::string_view key = trim(line.substr(0, colon));
    std::string_view body = line.substr(colon + 1);
    const std::size_t body_col = colon + 1;
    // Splits body at '|' into (text, column offset) fields.
    auto fields = [&](std::size_t expected) {
      std::vector<std::pair<std::string_view, std::size_t>> out;
      std::size_t s = 0;
      while (true) {
        auto bar = body.find('|', s);
        if (bar == std::string_view::npos) {
          out.emplace_back(body.substr(s), body_col + s);
          break;
        }
        out.emplace_back(body.substr(s, bar - s), body_col + s);
        s = bar + 1;
      }
      if (out.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " '|'-separated fields", line_no, body_col + 1);
      return out;
    };
    auto integer = [&](std::string_view t, std::size_t col) {
      try {
        return parse_bigint(trim(t));
      } catch (const std::invalid_argument&) {
        throw ParseError("expected integer, got '" + std::string(trim(t)) + "'", line_no, col + 1);
      }
    };
    if (key == "target") {
      cert.target = parse_word_at(body, alphabet, line_no, body_col);
      have_target = true;
    } else if (key == "power") {
      cert.power = integer(body, body_col);
      if (cert.power < 1) throw ParseError("power must be positive", line_no, body_col + 1);
      have_power = true;
    } else if (key == "comm") {
      auto f = fields(2);
      cert.commutators.emplace_back(parse_word_at(f[0].first, alphabet, line_no, f[0].second),
                                    parse_word_at(f[1].first, alphabet, line_no, f[1].second));
    } else if (key == "relfac") {
      auto f = fields(3);
      RelatorFactor rf;
      rf.conjugator = parse_word_at(f[0].first, alphabet, line_no, f[0].second);
      BigInt idx = integer(f[1].first, f[1].second);
      if (idx < 1) throw ParseError("relator index must be positive", line_no, f[1].second + 1);
      rf.index = to_u64(idx, "relator index");
      std::string_view sg = trim(f[2].first);
      if (sg == "+1" || sg == "1" || sg == "+") rf.sign = 1;
      else if (sg == "-1" || sg == "-") rf.sign = -1;
      else throw ParseError("sign must be +1 or -1", line_no, f[2].second + 1);
      cert.relators.push_back(std::move(rf));
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", line_no, 1);
    }
  }
  if (!have_target) throw ParseError("missing target line", line_no, 1);
  if (!have_power) cert.power = 1;
  return cert;
}

std::string print_certificate(const CommutatorCertificate& cert, const Alphabet& alphabet) {
  std::string out = "target: " + format_word(cert.target, alphabet) + "\n";
  out += "power: " + cert.power.get_str() + "\n";
  for (const auto& [x, y] : cert.commutators)
    out += "comm: " + format_word(x, alphabet) + " | " + format_word(y, alphabet) + "\n";
  for (const auto& f : cert.relators)
    out += "relfac: " + format_word(f.conjugator, alphabet) + " | " + std::to_string(f.index) + " | " +
           (f.sign == 1 ? "+1" : "-1") + "\n";
  return out;
}

CommutatorCertificate family_upper_certificate(std::uint64_t m, std::uint64_t n, std::uint64_t N,
                                               const Presentation& pres, const std::optional<BigInt>& override_arg) {
  const FamilyInfo* fam = pres.family();
  const std::optional<BigInt> l_override = fam ? fam->l_override : override_arg;
  if (!(pres.alphabet() == family_alphabet())) throw CertificateError("presentation is not over the family alphabet");
  const std::string which = "r_{" + std::to_string(m) + "," + std::to_string(n) + "," + std::to_string(N) + "}";
  try {
    if (!(pres.relator(N) == build_r(m, n, N, l_override)))
      throw CertificateError("relator " + which + " not found at index " + std::to_string(N));
  } catch (const CertificateError&) {
    throw;
  } catch (const std::exception& e) {
    throw CertificateError("relator " + which + " not found at index " + std::to_string(N) + ": " + e.what());
  }

  const Alphabet alphabet = family_alphabet();
  const GenId a = alphabet.id_of("a"), b = alphabet.id_of("b"), c = alphabet.id_of("c"), t = alphabet.id_of("t");
  const BigInt Nb(std::to_string(N));
  SWord s = build_s(N, m, n, l_override);
  const BigInt& l = s.l;
  const PowerWord w = build_w(N);

  CommutatorCertificate cert;
  cert.target = PowerWord::letter(t, 1);
  cert.power = BigInt(std::to_string(n));
  // s = [X1,Y1][X2,Y2][X3,Y3], so s^-1 = [Y3,X3][Y2,X2][Y1,X1].
  for (int k = 3; k >= 1; --k) {
    const GenId s1 = alphabet.id_of("s" + std::to_string(3 * k - 2));
    const GenId s2 = alphabet.id_of("s" + std::to_string(3 * k - 1));
    const GenId s3 = alphabet.id_of("s" + std::to_string(3 * k));
    PowerWord X = PowerWord::letter(s1, l) * PowerWord::letter(s2, l);
    PowerWord Y = PowerWord::letter(s3, l) * PowerWord::letter(s1, -l);
    cert.commutators.emplace_back(Y, X);
  }
  // w = [A,B] with A = a^N b^N, B = c^N a^-N; w^-1 = [B,A].
  const PowerWord A = PowerWord::letter(a, Nb) * PowerWord::letter(b, Nb);
  const PowerWord B = PowerWord::letter(c, Nb) * PowerWord::letter(a, -Nb);
  for (std::uint64_t i = 0; i < 2 * m; ++i) cert.commutators.emplace_back(B, A);
  // t^n = s^-1 w^-2m . (w^2m s) r (w^2m s)^-1
  cert.relators.push_back({w.power(2 * BigInt(std::to_string(m))) * s.word, N, 1});
  return cert;
}

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::Atom: return "ATOM";
    case Rule::HomMonotone: return "HOM-MONOTONE";
    case Rule::Product: return "PRODUCT";
    case Rule::Commutator: return "COMMUTATOR";
    case Rule::Power: return "POWER";
    case Rule::Root: return "ROOT";
    case Rule::Inverse: return "INVERSE";
    case Rule::CommutatorProduct: return "CERTIFICATE";
  }
  return "?";
}

namespace {

std::shared_ptr<const BoundExpr> share(BoundExpr e) { return std::make_shared<const BoundExpr>(std::move(e)); }

}  // namespace

BoundExpr BoundExpr::atom(std::string label, std::optional<Rational> bound) {
  BoundExpr e;
  e.rule = Rule::Atom;
  e.label = std::move(label);
  e.atom_bound = std::move(bound);
  return e;
}

BoundExpr BoundExpr::commutator(std::string label) {
  BoundExpr e;
  e.rule = Rule::Commutator;
  e.label = std::move(label);
  return e;
}

BoundExpr BoundExpr::commutator_product(BigInt k, std::string label) {
  BoundExpr e;
  e.rule = Rule::CommutatorProduct;
  e.k = std::move(k);
  e.label = std::move(label);
  return e;
}

BoundExpr BoundExpr::product(std::vector<BoundExpr> factors, std::string label) {
  BoundExpr e;
  e.rule = Rule::Product;
  e.label = std::move(label);
  for (auto& f : factors) e.children.push_back(share(std::move(f)));
  return e;
}

BoundExpr BoundExpr::power(BoundExpr base, BigInt k, std::string label) {
  BoundExpr e;
  e.rule = Rule::Power;
  e.k = std::move(k);
  e.label = std::move(label);
  e.children.push_back(share(std::move(base)));
  return e;
}

BoundExpr BoundExpr::root(BoundExpr power, BigInt k, std::string label) {
  BoundExpr e;
  e.rule = Rule::Root;
  e.k = std::move(k);
  e.label = std::move(label);
  e.children.push_back(share(std::move(power)));
  return e;
}

BoundExpr BoundExpr::inverse(BoundExpr base, std::string label) {
  BoundExpr e;
  e.rule = Rule::Inverse;
  e.label = std::move(label);
  e.children.push_back(share(std::move(base)));
  return e;
}

BoundExpr BoundExpr::hom(BoundExpr source, std::string label) {
  BoundExpr e;
  e.rule = Rule::HomMonotone;
  e.label = std::move(label);
  e.children.push_back(share(std::move(source)));
  return e;
}

BoundDerivation derive_bound(const BoundExpr& expr, bool cl_half) {
  BoundDerivation d{expr.rule, expr.label, Rational(0), false, {}};
  for (const auto& child : expr.children) d.premises.push_back(derive_bound(*child, cl_half));
  auto one_child = [&]() -> const Rational& {
    if (d.premises.size() != 1) throw CertificateError(std::string(rule_name(expr.rule)) + " takes one premise");
    return d.premises[0].bound;
  };
  switch (expr.rule) {
    case Rule::Atom:
      if (!expr.atom_bound) throw CertificateError("unbounded atom '" + expr.label + "'");
      if (sgn(*expr.atom_bound) < 0) throw CertificateError("atom '" + expr.label + "' has a negative bound");
      d.bound = *expr.atom_bound;
      break;
    case Rule::HomMonotone:
    case Rule::Inverse:
      d.bound = one_child();
      break;
    case Rule::Product: {
      if (d.premises.empty()) throw CertificateError("empty product");
      Rational sum(0);
      for (const auto& p : d.premises) sum += p.bound;
      d.bound = sum + make_rational(static_cast<long>(d.premises.size() - 1), 2);
      break;
    }
    case Rule::Commutator:
      d.bound = Rational(1, 2);
      break;
    case Rule::Power:
      d.bound = one_child() * Rational(abs(expr.k));
      break;
    case Rule::Root:
      if (expr.k < 1) throw CertificateError("root index must be positive");
      d.bound = one_child() / Rational(expr.k);
      break;
    case Rule::CommutatorProduct:
      if (expr.k < 0) throw CertificateError("commutator count must be non-negative");
      d.bound = Rational(expr.k);
      if (cl_half && expr.k >= 1) {
        d.bound -= Rational(1, 2);
        d.used_cl_half = true;
      }
      break;
  }
  return d;
}

namespace {

void format_into(const BoundDerivation& d, std::size_t depth, std::string& out) {
  out += std::string(2 * depth, ' ') + std::string(rule_name(d.rule));
  if (d.used_cl_half) out += "+CL-HALF";
  if (!d.label.empty()) out += " " + d.label;
  out += "  <= " + to_string(d.bound) + "\n";
  for (const auto& p : d.premises) format_into(p, depth + 1, out);
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  BoundExpr parse() {
    BoundExpr e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, 1, pos_ + 1); }
  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    std::size_t s = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '-' || text_[pos_] == '^'))
      ++pos_;
    if (s == pos_) fail("expected a name");
    return std::string(text_.substr(s, pos_ - s));
  }
  std::string_view number_text() {
    skip();
    std::size_t s = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/' ||
                                   text_[pos_] == '-'))
      ++pos_;
    if (s == pos_) fail("expected a number");
    return text_.substr(s, pos_ - s);
  }
  BigInt integer() {
    auto t = number_text();
    try {
      return parse_bigint(t);
    } catch (const std::invalid_argument&) {
      fail("expected an integer");
    }
  }
  Rational rational() {
    auto t = number_text();
    try {
      return parse_rational(t);
    } catch (const std::invalid_argument&) {
      fail("expected a rational");
    }
  }

  BoundExpr expr() {
    const std::string name = ident();
    if (name == "comm") {
      if (eat('(')) expect(')');
      return BoundExpr::commutator();
    }
    expect('(');
    BoundExpr out;
    if (name == "cl") {
      out = BoundExpr::commutator_product(integer());
    } else if (name == "atom") {
      std::string label = ident();
      std::optional<Rational> b;
      if (eat(',')) b = rational();
      out = BoundExpr::atom(label, b);
    } else if (name == "prod") {
      std::vector<BoundExpr> fs;
      fs.push_back(expr());
      while (eat(',')) fs.push_back(expr());
      out = BoundExpr::product(std::move(fs));
    } else if (name == "pow" || name == "root") {
      BoundExpr base = expr();
      expect(',');
      BigInt k = integer();
      out = name == "pow" ? BoundExpr::power(std::move(base), k) : BoundExpr::root(std::move(base), k);
    } else if (name == "inv") {
      out = BoundExpr::inverse(expr());
    } else if (name == "hom") {
      out = BoundExpr::hom(expr());
    } else {
      fail("unknown rule '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_derivation(const BoundDerivation& d) {
  std::string out;
  format_into(d, 0, out);
  return out;
}

BoundExpr parse_bound_expr(std::string_view text) { return ExprParser(text).parse(); }

BoundExpr family_bound_expr(std::uint64_t m, std::uint64_t n) {
  const BigInt mb(std::to_string(m)), nb(std::to_string(n));
  BoundExpr s = BoundExpr::inverse(BoundExpr::commutator_product(3, "s = [X1,Y1][X2,Y2][X3,Y3]"), "s^-1");
  BoundExpr w = BoundExpr::power(BoundExpr::inverse(BoundExpr::commutator("w = [a^N b^N, c^N a^-N]"), "w^-1"), 2 * mb,
                                 "w^-2m");
  std::vector<BoundExpr> factors;
  factors.push_back(std::move(s));
  factors.push_back(std::move(w));
  BoundExpr tn = BoundExpr::product(std::move(factors), "t^n = s^-1 w^-2m");
  return BoundExpr::root(std::move(tn), nb, "t");
}

// ---------------------------------------------------------------------------
// cl_search

void SearchConfig::validate() const {
  if (max_len == 0 || max_commutators == 0 || budget == 0 || batch == 0 || workers == 0)
    throw std::invalid_argument("search caps must be positive");
  if (max_len > 16) throw std::invalid_argument("max_len above 16 is not supported");
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("SCLFORGE_BUDGET")) {
    try {
      BigInt v = parse_bigint(env);
      if (v >= 1) return to_u64(v, "SCLFORGE_BUDGET");
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("SCLFORGE_BUDGET must be a positive integer, got '") + env + "'");
  }
  return 1'000'000;
}

namespace {

/// Rank of integer row vectors over Q.
std::size_t rank_q(std::vector<std::vector<Rational>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && sgn(rows[pivot][c]) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || sgn(rows[r][c]) == 0) continue;
      Rational f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

/// Freely reduced words of each length up to max_len, in lexicographic order
/// of letters (generator id ascending, positive before negative).
std::vector<std::vector<PowerWord>> words_by_length(std::size_t gens, std::uint64_t max_len) {
  std::vector<std::vector<PowerWord>> out(max_len + 1);
  out[0].push_back(PowerWord());
  std::vector<std::pair<GenId, int>> letters;
  for (GenId g = 0; g < gens; ++g) {
    letters.emplace_back(g, 1);
    letters.emplace_back(g, -1);
  }
  std::vector<std::pair<GenId, int>> current;
  auto rec = [&](auto&& self, std::uint64_t len) -> void {
    if (len > 0) {
      std::vector<Run> raw;
      for (auto [g, e] : current) raw.push_back({g, e});
      out[len].push_back(reduce(raw));
    }
    if (len == max_len) return;
    for (auto [g, e] : letters) {
      if (!current.empty() && current.back().first == g && current.back().second == -e) continue;
      current.emplace_back(g, e);
      self(self, len + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

struct Candidate {
  std::uint32_t c = 0;
  std::vector<std::uint32_t> len;   // 2c commutator slots then k conjugator slots
  std::vector<std::uint32_t> word;  // index into words[len]
  std::vector<std::pair<std::uint64_t, int>> rel;
};

class Searcher {
 public:
  Searcher(const Presentation& pres, PowerWord target, const SearchConfig& cfg, std::uint64_t cmax, std::uint64_t rel_count)
      : pres_(pres), target_(std::move(target)), cfg_(cfg), cmax_(cmax), rel_count_(rel_count) {
    words_ = words_by_length(pres.alphabet().size(), cfg.max_len);
    for (std::uint64_t i = 1; i <= rel_count_; ++i) {
      rel_words_.push_back(pres.relator(i).word());
      rel_inverse_.push_back(rel_words_.back().inverse());
    }
    kmax_ = rel_count_ > 0 ? cfg.max_relator_factors : 0;
  }

  /// Returns true when a witness was found.
  bool run() {
    for (std::uint64_t c = 0; c <= cmax_; ++c) {
      const std::uint64_t hi = (2 * c + kmax_) * cfg_.max_len;
      for (std::uint64_t total = 2 * c; total <= hi; ++total) {
        for (std::uint64_t k = 0; k <= kmax_; ++k) {
          if (total > (2 * c + k) * cfg_.max_len) continue;
          cand_.c = static_cast<std::uint32_t>(c);
          cand_.len.assign(2 * c + k, 0);
          cand_.word.assign(2 * c + k, 0);
          cand_.rel.assign(k, {1, 1});
          if (!compositions(0, total)) return finish();
        }
      }
    }
    flush();
    space_exhausted_ = !found_;
    return found_;
  }

  const std::optional<Candidate>& witness() const { return witness_; }
  /// Candidates up to and including the witness, or all emitted.
  std::uint64_t emitted() const { return found_ ? witness_position_ : emitted_; }
  bool space_exhausted() const { return space_exhausted_; }

  PowerWord product(const Candidate& cand) const {
    PowerWord acc;
    for (std::uint32_t j = 0; j < cand.c; ++j)
      acc.append(commutator(words_[cand.len[2 * j]][cand.word[2 * j]], words_[cand.len[2 * j + 1]][cand.word[2 * j + 1]]));
    for (std::size_t f = 0; f < cand.rel.size(); ++f) {
      const std::size_t slot = 2 * cand.c + f;
      const auto [idx, sign] = cand.rel[f];
      const PowerWord& r = sign == 1 ? rel_words_[idx - 1] : rel_inverse_[idx - 1];
      acc.append(conjugate(r, words_[cand.len[slot]][cand.word[slot]]));
    }
    return acc;
  }

  const PowerWord& word(std::uint32_t len, std::uint32_t idx) const { return words_[len][idx]; }

 private:
  bool finish() {
    flush();
    return found_;
  }

  // Each recursive stage returns false to stop the enumeration.
  bool compositions(std::size_t slot, std::uint64_t remaining) {
    const std::size_t slots = cand_.len.size();
    if (slot == slots) return remaining == 0 ? relators(0) : true;
    const std::uint64_t lo = slot < 2 * cand_.c ? 1 : 0;
    const std::uint64_t rest_hi = (slots - slot - 1) * cfg_.max_len;
    for (std::uint64_t l = lo; l <= cfg_.max_len && l <= remaining; ++l) {
      if (remaining - l > rest_hi) continue;
      cand_.len[slot] = static_cast<std::uint32_t>(l);
      if (!compositions(slot + 1, remaining - l)) return false;
    }
    return true;
  }

  bool relators(std::size_t f) {
    if (f == cand_.rel.size()) return words(0);
    for (std::uint64_t idx = 1; idx <= rel_count_; ++idx) {
      for (int sign : {1, -1}) {
        cand_.rel[f] = {idx, sign};
        if (!relators(f + 1)) return false;
      }
    }
    return true;
  }

  bool words(std::size_t slot) {
    if (slot == cand_.len.size()) return emit();
    const std::size_t count = words_[cand_.len[slot]].size();
    for (std::size_t i = 0; i < count; ++i) {
      cand_.word[slot] = static_cast<std::uint32_t>(i);
      if (!words(slot + 1)) return false;
    }
    return true;
  }

  bool emit() {
    if (emitted_ >= cfg_.budget) return false;
    batch_.push_back(cand_);
    ++emitted_;
    if (batch_.size() >= cfg_.batch || emitted_ >= cfg_.budget) {
      flush();
      if (found_) return false;
    }
    return emitted_ < cfg_.budget;
  }

  void flush() {
    if (batch_.empty() || found_) {
      batch_.clear();
      return;
    }
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::atomic<std::size_t> best{none};
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= batch_.size() || i > best.load()) return;
        if (product(batch_[i]) == target_) {
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
      }
    };
    const unsigned workers = std::min<std::size_t>(cfg_.workers, batch_.size());
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (best.load() != none) {
      witness_ = batch_[best.load()];
      witness_position_ = emitted_ - batch_.size() + best.load() + 1;
      found_ = true;
    }
    batch_.clear();
  }

  const Presentation& pres_;
  PowerWord target_;
  const SearchConfig& cfg_;
  std::uint64_t cmax_;
  std::uint64_t rel_count_;
  std::uint64_t kmax_ = 0;
  std::vector<std::vector<PowerWord>> words_;
  std::vector<PowerWord> rel_words_, rel_inverse_;
  Candidate cand_;
  std::vector<Candidate> batch_;
  std::uint64_t emitted_ = 0;
  std::uint64_t witness_position_ = 0;
  bool found_ = false;
  bool space_exhausted_ = false;
  std::optional<Candidate> witness_;
};

}  // namespace

SearchResult cl_search(const Presentation& pres, const PowerWord& g, const BigInt& N, const Rational& q,
                       const SearchConfig& cfg) {
  cfg.validate();
  if (sgn(q) < 0) throw std::invalid_argument("q must be non-negative");
  if (N < 1) throw std::invalid_argument("power must be positive");
  pres.alphabet().check(g);

  SearchResult res{SearchResult::Status::BudgetExhausted, std::nullopt, 0, 0, false, {}};
  BigInt qn;
  BigInt num = q.get_num() * N;
  mpz_fdiv_q(qn.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  res.q_prime = to_u64(qn, "floor(qN)");
  std::uint64_t cmax = res.q_prime;
  if (cmax > cfg.max_commutators) {
    res.warnings.push_back("floor(qN) = " + qn.get_str() + " capped at max_commutators = " +
                           std::to_string(cfg.max_commutators));
    cmax = cfg.max_commutators;
  }
  std::uint64_t rel_count = cfg.max_relator_index;
  if (auto count = pres.relator_count()) rel_count = std::min(rel_count, *count);

  const PowerWord target = g.power(N);

  // Abelian image check against the relators the search can use.
  {
    const std::size_t gens = pres.alphabet().size();
    auto to_row = [&](const PowerWord& w) {
      std::vector<Rational> row;
      for (const auto& e : exponent_sums(w, gens)) row.emplace_back(e);
      return row;
    };
    std::vector<std::vector<Rational>> rows;
    const std::uint64_t upto = std::max<std::uint64_t>(rel_count, pres.cached_count());
    for (std::uint64_t i = 1; i <= upto; ++i) rows.push_back(to_row(pres.relator(i).word()));
    const std::size_t base = rank_q(rows);
    rows.push_back(to_row(target));
    if (rank_q(rows) > base)
      res.warnings.push_back(upto == 0 ? std::string("g^N has nonzero abelian image; no certificate exists")
                                       : "g^N is outside the rational span of relators 1.." + std::to_string(upto) +
                                             " in the abelianization; only later relators could kill it");
  }

  Searcher searcher(pres, target, cfg, cmax, rel_count);
  const bool found = searcher.run();
  res.candidates = searcher.emitted();
  if (!found) {
    res.space_exhausted = searcher.space_exhausted();
    return res;
  }
  const Candidate& w = *searcher.witness();
  CommutatorCertificate cert;
  cert.target = g;
  cert.power = N;
  for (std::uint32_t j = 0; j < w.c; ++j)
    cert.commutators.emplace_back(searcher.word(w.len[2 * j], w.word[2 * j]),
                                  searcher.word(w.len[2 * j + 1], w.word[2 * j + 1]));
  for (std::size_t f = 0; f < w.rel.size(); ++f) {
    const std::size_t slot = 2 * w.c + f;
    cert.relators.push_back({searcher.word(w.len[slot], w.word[slot]), w.rel[f].first, w.rel[f].second});
  }
  if (!verify_certificate(cert, pres).pass) throw std::logic_error("search witness failed independent verification");
  res.status = SearchResult::Status::Halt;
  res.witness = std::move(cert);
  return res;
}

// ---------------------------------------------------------------------------
// Report

SclReport scl_report(const Presentation& family, std::uint64_t k,
                     const std::vector<std::pair<std::string, ValidatedDiagram>>& fixtures) {
  const FamilyInfo* fam = family.family();
  if (!fam) throw std::invalid_argument("report needs a family presentation");
  if (k == 0) throw std::invalid_argument("report needs k >= 1");
  SclReport rep;
  rep.l_override = fam->l_override;
  for (std::uint64_t i = 1; i <= k; ++i) {
    PairValue pv = fam->seq.at(i);
    const std::uint64_t m = to_u64(pv.m, "m"), n = to_u64(pv.n, "n");
    CommutatorCertificate cert = family_upper_certificate(m, n, i, family);
    const bool ok = verify_certificate(cert, family).pass;
    BoundExpr expr = family_bound_expr(m, n);
    rep.rows.push_back({i, pv.m, pv.n, pv.value(), derive_bound(expr, false).bound, derive_bound(expr, true).bound, ok});
  }
  for (const auto& [name, vd] : fixtures) {
    try {
      rep.fixtures.push_back({name, diagram_scl_upper(vd), ""});
    } catch (const std::exception& e) {
      rep.fixtures.push_back({name, std::nullopt, e.what()});
    }
  }
  if (fam->seq.declared_limit()) {
    rep.target = *fam->seq.declared_limit();
    rep.target_declared = true;
  } else {
    rep.target = fam->seq.value(k);
    rep.target_declared = false;
  }
  return rep;
}

std::string format_report_tsv(const SclReport& report) {
  std::ostringstream out;
  out << "i\tm\tn\tm/n\tupper_cl_half\tupper_cl_half_decimal\tupper_basic\tupper_basic_decimal\tcertificate\n";
  for (const auto& r : report.rows) {
    out << r.i << '\t' << r.m << '\t' << r.n << '\t' << to_string(r.value) << '\t' << to_string(r.bound_cl_half) << '\t'
        << to_decimal(r.bound_cl_half) << '\t' << to_string(r.bound) << '\t' << to_decimal(r.bound) << '\t'
        << (r.certificate_verified ? "verified" : "FAILED") << '\n';
  }
  for (const auto& f : report.fixtures) {
    out << "fixture\t" << f.name << '\t';
    if (f.upper) out << to_string(*f.upper) << '\t' << to_decimal(*f.upper) << '\n';
    else out << "-\t" << f.error << '\n';
  }
  if (report.target)
    out << "target\t" << to_string(*report.target) << '\t' << to_decimal(*report.target) << '\t'
        << (report.target_declared ? "declared limit" : "last prefix value") << '\n';
  out << "l_override\t" << (report.l_override ? report.l_override->get_str() : "none") << '\n';
  return out.str();
}

}  // namespace sclforge
