#include "sclforge/presentation.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "sclforge/pieces.hpp"

namespace sclforge {

SequenceError::SequenceError(const std::string& message, std::uint64_t index)
    : std::runtime_error("index " + std::to_string(index) + ": " + message), index_(index) {}

struct SeqPair::State {
  Producer producer;
  std::optional<std::uint64_t> length;
  std::optional<Rational> declared_limit;
  std::mutex mutex;
  std::vector<PairValue> cache;
};

SeqPair::SeqPair(Producer producer, std::optional<std::uint64_t> length, std::optional<Rational> declared_limit)
    : state_(std::make_shared<State>()) {
  state_->producer = std::move(producer);
  state_->length = length;
  state_->declared_limit = std::move(declared_limit);
}

SeqPair SeqPair::from_lists(const std::vector<BigInt>& m, const std::vector<BigInt>& n,
                            std::optional<Rational> declared_limit) {
  if (m.size() != n.size()) throw std::invalid_argument("m and n lists differ in length");
  auto producer = [m, n](std::uint64_t i) { return PairValue{m[i - 1], n[i - 1]}; };
  return SeqPair(producer, m.size(), std::move(declared_limit));
}

PairValue SeqPair::at(std::uint64_t i) const {
  if (i == 0) throw SequenceError("indices start at 1", 0);
  std::lock_guard lock(state_->mutex);
  auto& cache = state_->cache;
  while (cache.size() < i) {
    const std::uint64_t idx = cache.size() + 1;
    if (state_->length && idx > *state_->length) throw SequenceError("sequence has no such index", idx);
    PairValue p = state_->producer(idx);
    if (p.m < 1 || p.n < 1) throw SequenceError("m and n must be positive", idx);
    if (!cache.empty()) {
      const PairValue& prev = cache.back();
      if (!(p.n > prev.n)) throw SequenceError("n must be strictly increasing", idx);
      if (p.m * prev.n > prev.m * p.n) throw SequenceError("m/n must be non-increasing", idx);
    }
    cache.push_back(std::move(p));
  }
  return cache[i - 1];
}

std::vector<PairValue> SeqPair::prefix(std::uint64_t k) const {
  std::vector<PairValue> out;
  out.reserve(k);
  for (std::uint64_t i = 1; i <= k; ++i) out.push_back(at(i));
  return out;
}

std::optional<std::uint64_t> SeqPair::length() const { return state_->length; }
const std::optional<Rational>& SeqPair::declared_limit() const { return state_->declared_limit; }

struct Presentation::State {
  Alphabet alphabet;
  RelatorProducer producer;
  std::optional<std::uint64_t> count;
  std::optional<FamilyInfo> family;
  std::optional<std::uint64_t> prefix_hint;
  mutable std::shared_mutex mutex;
  std::deque<CyclicWord> cache;  // deque: references stay valid on append
};

Presentation Presentation::finite(Alphabet alphabet, std::vector<CyclicWord> relators) {
  for (std::size_t i = 0; i < relators.size(); ++i) {
    if (relators[i].empty()) throw PresentationError("relator " + std::to_string(i + 1) + " is empty");
    alphabet.check(relators[i].word());
  }
  Presentation p;
  p.state_ = std::make_shared<State>();
  p.state_->alphabet = std::move(alphabet);
  p.state_->count = relators.size();
  p.state_->prefix_hint = relators.size();
  p.state_->cache.assign(relators.begin(), relators.end());
  p.state_->producer = [](std::uint64_t i) -> CyclicWord {
    throw PresentationError("finite presentation has no relator " + std::to_string(i));
  };
  return p;
}

Presentation Presentation::recursive(Alphabet alphabet, RelatorProducer producer,
                                     std::optional<std::uint64_t> count) {
  Presentation p;
  p.state_ = std::make_shared<State>();
  p.state_->alphabet = std::move(alphabet);
  p.state_->producer = std::move(producer);
  p.state_->count = count;
  return p;
}

const Alphabet& Presentation::alphabet() const { return state_->alphabet; }

const CyclicWord& Presentation::relator(std::uint64_t i) const {
  if (i == 0) throw PresentationError("relator indices start at 1");
  if (state_->count && i > *state_->count)
    throw PresentationError("no relator " + std::to_string(i) + " (presentation has " +
                            std::to_string(*state_->count) + ")");
  {
    std::shared_lock lock(state_->mutex);
    if (i <= state_->cache.size()) return state_->cache[i - 1];
  }
  std::unique_lock lock(state_->mutex);
  while (state_->cache.size() < i) {
    const std::uint64_t idx = state_->cache.size() + 1;
    CyclicWord r = state_->producer(idx);
    if (r.empty()) throw PresentationError("relator " + std::to_string(idx) + " is empty");
    state_->alphabet.check(r.word());
    state_->cache.push_back(std::move(r));
  }
  return state_->cache[i - 1];
}

std::vector<CyclicWord> Presentation::prefix(std::uint64_t k) const {
  std::vector<CyclicWord> out;
  out.reserve(k);
  for (std::uint64_t i = 1; i <= k; ++i) out.push_back(relator(i));
  return out;
}

std::optional<std::uint64_t> Presentation::relator_count() const { return state_->count; }

std::uint64_t Presentation::cached_count() const {
  std::shared_lock lock(state_->mutex);
  return state_->cache.size();
}

const FamilyInfo* Presentation::family() const { return state_->family ? &*state_->family : nullptr; }

std::optional<std::uint64_t> Presentation::prefix_hint() const {
  if (state_->prefix_hint) return state_->prefix_hint;
  return state_->count;
}

void Presentation::set_prefix_hint(std::uint64_t k) { state_->prefix_hint = k; }

Alphabet family_alphabet() {
  return Alphabet({"t", "a", "b", "c", "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"});
}

namespace {

constexpr GenId kT = 0, kA = 1, kB = 2, kC = 3;
constexpr GenId kS1 = 4;
constexpr std::uint64_t kMaxM = 1'000'000;

}  // namespace

PowerWord build_w(std::uint64_t N) {
  if (N == 0) throw RangeError("N must be positive");
  const BigInt e(std::to_string(N), 10);
  const std::vector<Run> raw{{kA, e}, {kB, e}, {kC, e}, {kA, -e}, {kB, -e}, {kC, -e}};
  return reduce(raw);
}

BigInt family_l(std::uint64_t N, std::uint64_t m, std::uint64_t n) {
  if (N == 0 || m == 0 || n == 0) throw RangeError("N, m, n must be positive");
  return 6 * pow_ui(5, N) * pow_ui(7, m) * pow_ui(11, n);
}

SWord build_s(std::uint64_t N, std::uint64_t m, std::uint64_t n, const std::optional<BigInt>& l_override) {
  BigInt l;
  if (l_override) {
    if (*l_override < 1) throw RangeError("l_override must be positive");
    if (N == 0 || m == 0 || n == 0) throw RangeError("N, m, n must be positive");
    l = *l_override;
  } else {
    l = family_l(N, m, n);
  }
  std::vector<Run> raw;
  raw.reserve(18);
  for (GenId block = 0; block < 3; ++block) {
    const GenId base = kS1 + 3 * block;
    for (GenId k = 0; k < 3; ++k) raw.push_back({base + k, l});
    for (GenId k = 0; k < 3; ++k) raw.push_back({base + k, -l});
  }
  return SWord{reduce(raw), l};
}

CyclicWord build_r(std::uint64_t m, std::uint64_t n, std::uint64_t N, const std::optional<BigInt>& l_override) {
  if (m > kMaxM) throw RangeError("m too large to materialize w^{2m}: " + std::to_string(m));
  SWord s = build_s(N, m, n, l_override);
  const BigInt n_big(std::to_string(n), 10);
  const BigInt m_big(std::to_string(m), 10);
  PowerWord raw = PowerWord::letter(kT, n_big) * build_w(N).power(2 * m_big) * s.word;
  const BigInt expected = n_big + 12 * m_big * BigInt(std::to_string(N), 10) + 18 * s.l;
  if (raw.letter_length() != expected)
    throw std::logic_error("cancellation inside r_{m,n,N}: length " + raw.letter_length().get_str());
  auto reduced = cyclic_reduce(raw);
  if (!reduced.conjugator.empty() || reduced.core.letter_length() != expected)
    throw std::logic_error("r_{m,n,N} is not in canonical cyclic form");
  return reduced.core;
}

Presentation family_presentation(const SeqPair& seq, const std::optional<BigInt>& l_override) {
  auto producer = [seq, l_override](std::uint64_t i) {
    PairValue p = seq.at(i);
    return build_r(to_u64(p.m, "m"), to_u64(p.n, "n"), i, l_override);
  };
  Presentation pres = Presentation::recursive(family_alphabet(), producer, seq.length());
  pres.state_->family = FamilyInfo{seq, l_override};
  return pres;
}

std::string_view to_string(PairKind kind) {
  switch (kind) {
    case PairKind::Self: return "self";
    case PairKind::SelfInverse: return "self-inverse";
    case PairKind::Direct: return "direct";
    case PairKind::Inverse: return "inverse";
  }
  return "?";
}

PiecesReport check_c_prime(const Presentation& pres, std::uint64_t k, const Rational& lambda) {
  if (k == 0) throw std::invalid_argument("prefix size must be at least 1");
  PiecesReport report;
  report.lambda = lambda;
  std::vector<CyclicWord> rel = pres.prefix(k);
  std::vector<CyclicWord> inv;
  inv.reserve(k);
  for (const auto& r : rel) {
    inv.push_back(r.inverse());
    report.relator_lengths.push_back(r.letter_length());
  }
  auto add = [&](std::uint64_t i, std::uint64_t j, PairKind kind, BigInt piece) {
    const BigInt& shorter = std::min(report.relator_lengths[i], report.relator_lengths[j]);
    Rational ratio = make_rational(piece, shorter);
    report.entries.push_back(PieceEntry{i + 1, j + 1, kind, std::move(piece), std::move(ratio)});
  };
  for (std::uint64_t i = 0; i < k; ++i) {
    add(i, i, PairKind::Self, max_common_piece(rel[i], rel[i], true));
    add(i, i, PairKind::SelfInverse, max_common_piece(rel[i], inv[i], false));
    for (std::uint64_t j = i + 1; j < k; ++j) {
      add(i, j, PairKind::Direct, max_common_piece(rel[i], rel[j], false));
      add(i, j, PairKind::Inverse, max_common_piece(rel[i], inv[j], false));
    }
  }
  report.worst_ratio = 0;
  for (const auto& e : report.entries) report.worst_ratio = std::max(report.worst_ratio, e.ratio);
  report.pass = report.worst_ratio < lambda;
  return report;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<BigInt> parse_int_list(std::string_view text, std::size_t line, std::size_t column) {
  std::vector<BigInt> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = trim(text.substr(start, comma - start));
    try {
      out.push_back(parse_bigint(item));
    } catch (const std::invalid_argument&) {
      throw ParseError("expected integer in list, got '" + std::string(item) + "'", line, column + start);
    }
    start = comma + 1;
  }
  return out;
}

struct FamilyLine {
  std::vector<BigInt> m, n;
  std::uint64_t k = 0;
  std::optional<BigInt> l_override;
};

FamilyLine parse_family_line(std::string_view body, std::size_t line, std::size_t col0) {
  FamilyLine f;
  bool have_m = false, have_n = false, have_k = false;
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = body.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view tok = body.substr(pos, end - pos);
    const std::size_t col = col0 + pos + 1;
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value in family line", line, col);
    std::string_view key = tok.substr(0, eq);
    std::string_view value = tok.substr(eq + 1);
    try {
      if (key == "m") {
        f.m = parse_int_list(value, line, col + eq + 1);
        have_m = true;
      } else if (key == "n") {
        f.n = parse_int_list(value, line, col + eq + 1);
        have_n = true;
      } else if (key == "k") {
        f.k = to_u64(parse_bigint(value), "k");
        have_k = true;
      } else if (key == "l_override") {
        f.l_override = parse_bigint(value);
      } else {
        throw ParseError("unknown family key '" + std::string(key) + "'", line, col);
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line, col);
    } catch (const RangeError& e) {
      throw ParseError(e.what(), line, col);
    }
    pos = end;
  }
  if (!have_m || !have_n || !have_k) throw ParseError("family line needs m=, n= and k=", line, col0 + 1);
  if (f.m.size() != f.n.size()) throw ParseError("family m and n lists differ in length", line, col0 + 1);
  if (f.k == 0 || f.k > f.m.size()) throw ParseError("family k must be between 1 and the list length", line, col0 + 1);
  return f;
}

}  // namespace

Presentation parse_presentation(std::string_view text) {
  std::optional<Alphabet> alphabet;
  std::vector<std::pair<std::size_t, std::string>> rel_lines;  // (line number, body)
  std::vector<std::size_t> rel_cols;
  std::optional<FamilyLine> family;
  std::size_t family_line_no = 0;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'gens:', 'rel:' or 'family:'", line_no, 1);
    std::string_view key = trim(line.substr(0, colon));
    std::string_view body = line.substr(colon + 1);
    if (key == "gens") {
      if (alphabet) throw ParseError("duplicate gens line", line_no, 1);
      std::vector<std::string> names;
      std::istringstream in{std::string(body)};
      for (std::string name; in >> name;) names.push_back(name);
      try {
        alphabet = Alphabet(std::move(names));
      } catch (const AlphabetError& e) {
        throw ParseError(e.what(), line_no, colon + 2);
      }
    } else if (key == "rel") {
      if (!alphabet) throw ParseError("rel line before gens line", line_no, 1);
      rel_lines.emplace_back(line_no, std::string(body));
      rel_cols.push_back(colon + 1);
    } else if (key == "family") {
      if (family) throw ParseError("duplicate family line", line_no, 1);
      family = parse_family_line(body, line_no, colon + 1);
      family_line_no = line_no;
    } else {
      throw ParseError("unknown section '" + std::string(key) + "'", line_no, 1);
    }
  }
  if (!alphabet) throw ParseError("missing gens line", line_no, 1);

  std::vector<CyclicWord> relators;
  for (std::size_t r = 0; r < rel_lines.size(); ++r) {
    const auto& [ln, body] = rel_lines[r];
    PowerWord w = parse_word_at(body, *alphabet, ln, rel_cols[r]);
    auto core = cyclic_reduce(w).core;
    if (core.empty()) throw ParseError("relator reduces to the empty word", ln, rel_cols[r] + 1);
    relators.push_back(std::move(core));
  }

  if (!family) return Presentation::finite(std::move(*alphabet), std::move(relators));

  if (!(*alphabet == family_alphabet()))
    throw ParseError("family presentations use gens: t a b c s1 s2 s3 s4 s5 s6 s7 s8 s9", family_line_no, 1);
  Presentation pres;
  try {
    pres = family_presentation(SeqPair::from_lists(family->m, family->n), family->l_override);
    for (std::uint64_t i = 1; i <= family->k; ++i) (void)pres.relator(i);
  } catch (const SequenceError& e) {
    throw ParseError(e.what(), family_line_no, 1);
  } catch (const RangeError& e) {
    throw ParseError(e.what(), family_line_no, 1);
  }
  for (std::size_t r = 0; r < relators.size(); ++r) {
    if (r + 1 > family->m.size() || !(pres.relator(r + 1) == relators[r]))
      throw ParseError("rel line does not match family relator " + std::to_string(r + 1), rel_lines[r].first, 1);
  }
  pres.set_prefix_hint(family->k);
  return pres;
}

std::string print_presentation(const Presentation& pres, std::uint64_t k) {
  if (auto count = pres.relator_count(); count && k > *count) k = *count;
  const Alphabet& alphabet = pres.alphabet();
  std::string out = "gens:";
  for (const auto& g : alphabet.generators()) out += " " + g.name;
  out += "\n";
  if (const FamilyInfo* fam = pres.family()) {
    std::string ms, ns;
    for (std::uint64_t i = 1; i <= k; ++i) {
      PairValue p = fam->seq.at(i);
      ms += (i > 1 ? "," : "") + p.m.get_str();
      ns += (i > 1 ? "," : "") + p.n.get_str();
    }
    out += "family: m=" + ms + " n=" + ns + " k=" + std::to_string(k);
    if (fam->l_override) out += " l_override=" + fam->l_override->get_str();
    out += "\n";
  }
  for (std::uint64_t i = 1; i <= k; ++i) out += "rel: " + format_word(pres.relator(i), alphabet) + "\n";
  return out;
}

}  // namespace sclforge
