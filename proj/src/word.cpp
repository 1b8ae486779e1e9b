#include "sclforge/word.hpp"

#include <algorithm>
#include <cctype>

namespace sclforge {

namespace {

bool valid_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

constexpr std::size_t kMaxExpandedRuns = std::size_t{1} << 24;

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

Alphabet::Alphabet(std::vector<std::string> names) {
  generators_.reserve(names.size());
  for (auto& name : names) {
    if (!valid_name(name)) throw AlphabetError("invalid generator name '" + name + "'");
    auto id = static_cast<GenId>(generators_.size());
    if (!by_name_.emplace(name, id).second) throw AlphabetError("duplicate generator name '" + name + "'");
    generators_.push_back({id, std::move(name)});
  }
}

const std::string& Alphabet::name(GenId id) const {
  if (!contains(id)) throw AlphabetError("unknown generator id " + std::to_string(id));
  return generators_[id].name;
}

std::optional<GenId> Alphabet::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

GenId Alphabet::id_of(std::string_view name) const {
  auto id = find(name);
  if (!id) throw AlphabetError("unknown generator '" + std::string(name) + "'");
  return *id;
}

void Alphabet::check(const PowerWord& word) const {
  for (const auto& run : word.runs()) {
    if (!contains(run.gen)) throw AlphabetError("unknown generator id " + std::to_string(run.gen));
  }
}

bool Alphabet::names_equal(const Alphabet& other) const {
  if (generators_.size() != other.generators_.size()) return false;
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].name != other.generators_[i].name) return false;
  }
  return true;
}

PowerWord PowerWord::letter(GenId gen, const BigInt& exp) {
  PowerWord w;
  w.append(Run{gen, exp});
  return w;
}

BigInt PowerWord::letter_length() const {
  BigInt total = 0;
  for (const auto& run : runs_) total += abs(run.exp);
  return total;
}

void PowerWord::append(const Run& raw) {
  if (raw.exp == 0) return;
  if (!runs_.empty() && runs_.back().gen == raw.gen) {
    runs_.back().exp += raw.exp;
    if (runs_.back().exp == 0) runs_.pop_back();
    return;
  }
  runs_.push_back(raw);
}

void PowerWord::append(const PowerWord& other) {
  // Only the junction can cancel; once a run survives, the rest copies.
  std::size_t i = 0;
  const auto& rhs = other.runs_;
  while (i < rhs.size() && !runs_.empty() && runs_.back().gen == rhs[i].gen) {
    runs_.back().exp += rhs[i].exp;
    ++i;
    if (runs_.back().exp != 0) break;
    runs_.pop_back();
  }
  runs_.insert(runs_.end(), rhs.begin() + static_cast<std::ptrdiff_t>(i), rhs.end());
}

PowerWord PowerWord::inverse() const {
  PowerWord w;
  w.runs_.reserve(runs_.size());
  for (auto it = runs_.rbegin(); it != runs_.rend(); ++it) w.runs_.push_back(Run{it->gen, -it->exp});
  return w;
}

PowerWord PowerWord::power(const BigInt& k) const {
  if (k == 0 || empty()) return {};
  if (k < 0) return inverse().power(-k);
  auto [core, conj] = cyclic_reduce(*this);
  PowerWord body;
  if (core.run_count() == 1) {
    body = PowerWord::letter(core.runs()[0].gen, core.runs()[0].exp * k);
  } else {
    if (mpz_sizeinbase(k.get_mpz_t(), 2) > 40 || k.get_ui() * core.run_count() > kMaxExpandedRuns)
      throw RangeError("power too large to expand: (" + std::to_string(core.run_count()) + " runs)^" +
                       k.get_str());
    const auto times = k.get_ui();
    body.runs_.reserve(times * core.run_count());
    for (unsigned long i = 0; i < times; ++i) {
      body.runs_.insert(body.runs_.end(), core.runs().begin(), core.runs().end());
    }
  }
  return conj * body * conj.inverse();
}

PowerWord operator*(const PowerWord& a, const PowerWord& b) {
  PowerWord out = a;
  out.append(b);
  return out;
}

PowerWord reduce(std::span<const Run> raw) {
  PowerWord w;
  for (const auto& run : raw) w.append(run);
  return w;
}

PowerWord reduce(const Alphabet& alphabet, std::span<const Run> raw) {
  for (const auto& run : raw) {
    if (!alphabet.contains(run.gen)) throw AlphabetError("unknown generator id " + std::to_string(run.gen));
  }
  return reduce(raw);
}

PowerWord multiply(const PowerWord& u, const PowerWord& v) { return u * v; }
PowerWord invert(const PowerWord& u) { return u.inverse(); }
PowerWord conjugate(const PowerWord& u, const PowerWord& g) { return g * u * g.inverse(); }
PowerWord commutator(const PowerWord& x, const PowerWord& y) { return x * y * x.inverse() * y.inverse(); }
BigInt letter_length(const PowerWord& u) { return u.letter_length(); }

PowerWord slice(const PowerWord& u, const BigInt& begin, const BigInt& end) {
  PowerWord out;
  if (end <= begin) return out;
  BigInt offset = 0;
  for (const auto& run : u.runs()) {
    BigInt len = abs(run.exp);
    BigInt lo = std::max<BigInt>(begin, offset);
    BigInt hi = std::min<BigInt>(end, offset + len);
    if (lo < hi) out.append(Run{run.gen, sgn(run.exp) > 0 ? BigInt(hi - lo) : BigInt(lo - hi)});
    offset += len;
    if (offset >= end) break;
  }
  return out;
}

int compare_runs(const Run& a, const Run& b) {
  if (a.gen != b.gen) return a.gen < b.gen ? -1 : 1;
  const int sa = sgn(a.exp);
  const int sb = sgn(b.exp);
  if (sa != sb) return sa > 0 ? -1 : 1;
  const int c = cmp(abs(a.exp), abs(b.exp));
  return c > 0 ? -1 : (c < 0 ? 1 : 0);
}

namespace {

// Least rotation of a cyclic sequence (two-pointer minimum expression).
std::size_t least_rotation(const std::vector<Run>& s) {
  const std::size_t n = s.size();
  std::size_t i = 0, j = 1, k = 0;
  while (i < n && j < n && k < n) {
    int c = compare_runs(s[(i + k) % n], s[(j + k) % n]);
    if (c == 0) {
      ++k;
      continue;
    }
    if (c > 0)
      i += k + 1;
    else
      j += k + 1;
    if (i == j) ++j;
    k = 0;
  }
  return std::min(i, j);
}

}  // namespace

CyclicReduction cyclic_reduce(const PowerWord& u) {
  std::vector<Run> runs = u.runs();
  std::size_t lo = 0;
  std::size_t hi = runs.size();
  PowerWord conj;
  while (hi - lo >= 2 && runs[lo].gen == runs[hi - 1].gen) {
    const Run last = runs[hi - 1];
    // g^e1 X g^e2 = g^-e2 (g^(e1+e2) X) g^e2
    conj.append(Run{last.gen, -last.exp});
    runs[lo].exp += last.exp;
    --hi;
    if (runs[lo].exp == 0) ++lo;
  }
  std::vector<Run> core(runs.begin() + static_cast<std::ptrdiff_t>(lo),
                        runs.begin() + static_cast<std::ptrdiff_t>(hi));
  if (core.size() >= 2) {
    const std::size_t p = least_rotation(core);
    if (p != 0) {
      // core = A B, rotated = B A = A^-1 core A
      for (std::size_t i = 0; i < p; ++i) conj.append(core[i]);
      std::rotate(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(p), core.end());
    }
  }
  PowerWord core_word;
  for (const auto& r : core) core_word.append(r);
  return CyclicReduction{CyclicWord(std::move(core_word)), std::move(conj)};
}

CyclicWord CyclicWord::inverse() const { return cyclic_reduce(word_.inverse()).core; }

std::vector<BigInt> exponent_sums(const PowerWord& u, std::size_t alphabet_size) {
  std::vector<BigInt> sums(alphabet_size, BigInt(0));
  for (const auto& run : u.runs()) {
    if (run.gen >= alphabet_size) throw AlphabetError("unknown generator id " + std::to_string(run.gen));
    sums[run.gen] += run.exp;
  }
  return sums;
}

namespace {

class WordParser {
 public:
  WordParser(std::string_view text, const Alphabet& alphabet, std::size_t line, std::size_t col0)
      : text_(text), alphabet_(alphabet), line_(line), col0_(col0) {}

  PowerWord parse() {
    skip_space();
    if (at_end()) fail("empty word (use \"1\" for the identity)");
    PowerWord w = parse_sequence(/*nested=*/false);
    skip_space();
    if (!at_end()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return w;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, col0_ + pos_ + 1); }

  bool at_end() const { return pos_ >= text_.size(); }
  void skip_space() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  PowerWord parse_sequence(bool nested) {
    skip_space();
    if (!at_end() && text_[pos_] == '1') {
      std::size_t save = pos_;
      ++pos_;
      skip_space();
      if (at_end() || (nested && text_[pos_] == ')')) return {};
      pos_ = save;
      fail("'1' must stand alone");
    }
    PowerWord w;
    bool any = false;
    while (true) {
      skip_space();
      if (at_end() || (nested && text_[pos_] == ')')) break;
      w.append(parse_term());
      any = true;
    }
    if (!any) fail("empty word");
    return w;
  }

  PowerWord parse_term() {
    if (text_[pos_] == '(') {
      ++pos_;
      PowerWord inner = parse_sequence(/*nested=*/true);
      skip_space();
      if (at_end() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      if (at_end() || text_[pos_] != '^') fail("parenthesized word needs an exponent");
      ++pos_;
      return inner.power(parse_int());
    }
    if (!std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected generator name");
    std::size_t start = pos_;
    while (!at_end() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    auto id = alphabet_.find(name);
    if (!id) {
      pos_ = start;
      fail("unknown generator '" + std::string(name) + "'");
    }
    BigInt exp = 1;
    if (!at_end() && text_[pos_] == '^') {
      ++pos_;
      exp = parse_int();
    }
    return PowerWord::letter(*id, exp);
  }

  BigInt parse_int() {
    std::size_t start = pos_;
    if (!at_end() && text_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer exponent");
    }
    return BigInt(std::string(text_.substr(start, pos_ - start)), 10);
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t line_;
  std::size_t col0_;
  std::size_t pos_ = 0;
};

void format_runs(std::string& out, const Alphabet& alphabet, const std::vector<Run>& runs, std::size_t begin,
                 std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty() && out.back() != '(') out += ' ';
    out += alphabet.name(runs[i].gen);
    if (runs[i].exp != 1) out += "^" + runs[i].exp.get_str();
  }
}

}  // namespace

PowerWord parse_word(std::string_view text, const Alphabet& alphabet) {
  return WordParser(text, alphabet, 1, 0).parse();
}

PowerWord parse_word_at(std::string_view text, const Alphabet& alphabet, std::size_t line,
                        std::size_t column_offset) {
  return WordParser(text, alphabet, line, column_offset).parse();
}

std::string format_word(const PowerWord& u, const Alphabet& alphabet, bool compact) {
  if (u.empty()) return "1";
  const auto& runs = u.runs();
  std::string out;
  if (!compact) {
    format_runs(out, alphabet, runs, 0, runs.size());
    return out;
  }
  std::size_t i = 0;
  while (i < runs.size()) {
    std::size_t best_block = 0, best_reps = 1;
    for (std::size_t b = 2; i + 2 * b <= runs.size(); ++b) {
      std::size_t reps = 1;
      while (i + (reps + 1) * b <= runs.size() &&
             std::equal(runs.begin() + static_cast<std::ptrdiff_t>(i),
                        runs.begin() + static_cast<std::ptrdiff_t>(i + b),
                        runs.begin() + static_cast<std::ptrdiff_t>(i + reps * b)))
        ++reps;
      if (reps >= 2 && reps * b > best_reps * best_block) {
        best_block = b;
        best_reps = reps;
      }
    }
    if (best_block == 0) {
      format_runs(out, alphabet, runs, i, i + 1);
      ++i;
      continue;
    }
    if (!out.empty()) out += ' ';
    out += '(';
    format_runs(out, alphabet, runs, i, i + best_block);
    out += ")^" + std::to_string(best_reps);
    i += best_block * best_reps;
  }
  return out;
}

std::string format_word(const CyclicWord& u, const Alphabet& alphabet, bool compact) {
  return format_word(u.word(), alphabet, compact);
}

}  // namespace sclforge
