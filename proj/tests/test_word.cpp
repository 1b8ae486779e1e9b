#include <doctest.h>

#include <random>

#include "sclforge/pieces.hpp"
#include "sclforge/presentation.hpp"
#include "support.hpp"

using namespace sclforge;

namespace {

const Alphabet abc({"t", "a", "b", "c"});

PowerWord W(const char* text) { return parse_word(text, abc); }

std::vector<Run> random_runs(std::mt19937_64& rng, std::size_t max_runs, int max_exp) {
  std::uniform_int_distribution<std::size_t> count(0, max_runs);
  std::uniform_int_distribution<int> gen(0, 3), ex(-max_exp, max_exp);
  std::vector<Run> raw(count(rng));
  for (auto& r : raw) r = {static_cast<GenId>(gen(rng)), ex(rng)};
  return raw;
}

}  // namespace

TEST_SUITE("word") {
  TEST_CASE("reduce examples") {
    const GenId a = 1, b = 2;
    std::vector<Run> r1{{a, 1}, {a, -1}, {b, 1}};
    CHECK(reduce(r1) == W("b"));
    std::vector<Run> r2{{a, 3}, {a, 4}};
    CHECK(reduce(r2) == W("a^7"));
    std::vector<Run> r3{{a, 2}, {b, 1}, {b, -1}, {a, -2}};
    CHECK(reduce(r3).empty());
    std::vector<Run> bad{{GenId(9), 1}};
    CHECK_THROWS_AS(reduce(abc, bad), AlphabetError);
  }

  TEST_CASE("group operations") {
    CHECK(multiply(W("a^3"), W("a^-3")).empty());
    CHECK(invert(W("a^2 b^-1")) == W("b a^-2"));
    CHECK(conjugate(W("b"), W("a")) == W("a b a^-1"));
    CHECK(commutator(W("a"), W("b")) == W("a b a^-1 b^-1"));
    CHECK(commutator(W("a"), W("a")).empty());
    CHECK(commutator(W("a^5 b^5"), W("c^5 a^-5")) == W("a^5 b^5 c^5 a^-5 b^-5 c^-5"));
    CHECK(letter_length(PowerWord()) == 0);
    CHECK(letter_length(W("a^3 b^-2")) == 5);
  }

  TEST_CASE("huge exponents stay run-length") {
    BigInt e = pow_ui(10, 40);
    PowerWord u = PowerWord::letter(1, e) * PowerWord::letter(2, 1);
    CHECK(u.letter_length() == e + 1);
    CHECK((u * u.inverse()).empty());
    CHECK(u.power(3).run_count() == 6);
  }

  TEST_CASE("cyclic_reduce examples") {
    auto [core, conj] = cyclic_reduce(W("b a b^-1"));
    CHECK(core.word() == W("a"));
    CHECK(conj == W("b"));
    auto r2 = cyclic_reduce(W("a b a^-1 b^-1"));
    CHECK(r2.core.word() == W("a b a^-1 b^-1"));
    CHECK(r2.conjugator.empty());
    auto r3 = cyclic_reduce(W("c^-2 t^3 c^2"));
    CHECK(r3.core.word() == W("t^3"));
    CHECK(r3.conjugator == W("c^-2"));
    CHECK(cyclic_reduce(PowerWord()).core.empty());
  }

  TEST_CASE("canonical rotation is rotation invariant") {
    PowerWord u = W("b^2 a c^-1 a^-3 t");
    CyclicWord base = cyclic_reduce(u).core;
    const auto& runs = u.runs();
    for (std::size_t k = 0; k < runs.size(); ++k) {
      std::vector<Run> rot(runs.begin() + k, runs.end());
      rot.insert(rot.end(), runs.begin(), runs.begin() + k);
      CHECK(cyclic_reduce(reduce(rot)).core == base);
    }
    CHECK(base.runs().front().gen == 0);  // t sorts first
  }

  TEST_CASE("parse and print") {
    CHECK(W("t^3 (a^2 b^2 c^2 a^-2 b^-2 c^-2)^4").letter_length() == 3 + 48);
    CHECK(W("1").empty());
    CHECK(format_word(PowerWord(), abc) == "1");
    PowerWord u = W("t^3 a^-1 b^12 c");
    CHECK(format_word(u, abc) == "t^3 a^-1 b^12 c");
    CHECK(parse_word(format_word(u, abc), abc) == u);
    PowerWord rep = W("(a b)^3");
    CHECK(parse_word(format_word(rep, abc, true), abc) == rep);
    CHECK_THROWS_AS(W("a x"), ParseError);
    CHECK_THROWS_AS(W("a^"), ParseError);
    try {
      W("a b^q");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() >= 3);
    }
  }

  TEST_CASE("properties on random run lists") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      auto raw = random_runs(rng, 8, 3);
      PowerWord u = reduce(raw);
      CHECK(reduce(u.runs()) == u);
      CHECK(multiply(u, invert(u)).empty());
      for (std::size_t i = 1; i < u.runs().size(); ++i) CHECK(u.runs()[i - 1].gen != u.runs()[i].gen);
      PowerWord v = reduce(random_runs(rng, 6, 3));
      CHECK(letter_length(multiply(u, v)) <= letter_length(u) + letter_length(v));
      CHECK(commutator(u, v).empty() == (multiply(u, v) == multiply(v, u)));
      auto [core, conj] = cyclic_reduce(u);
      CHECK(conjugate(core.word(), conj) == u);
      // decoded reduction agrees
      auto dec = testing::decode(u);
      for (std::size_t i = 1; i < dec.size(); ++i) CHECK(dec[i] != -dec[i - 1]);
    }
  }
}

TEST_SUITE("pieces") {
  TEST_CASE("examples") {
    auto cw = [](const char* t) { return cyclic_reduce(W(t)).core; };
    CHECK(max_common_piece(cw("a^9"), cw("a^4 b"), false) == 4);
    CHECK(max_common_piece(cw("t^3 a b"), cw("t^5 c"), false) == 3);
    CyclicWord w4 = cyclic_reduce(build_w(1).power(4)).core;
    CHECK(max_common_piece(w4, w4, true) == 18);
    CHECK(max_common_piece(CyclicWord(), cw("a"), false) == 0);
  }

  TEST_CASE("agrees with decoded oracle on random words") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> gen(0, 3), ex(-4, 4), len(1, 7);
    auto random_cyclic = [&] {
      while (true) {
        std::vector<Run> raw(len(rng));
        for (auto& r : raw) r = {static_cast<GenId>(gen(rng)), ex(rng)};
        CyclicWord c = cyclic_reduce(reduce(raw)).core;
        if (!c.empty()) return c;
      }
    };
    for (int trial = 0; trial < 600; ++trial) {
      CyclicWord u = random_cyclic(), v = random_cyclic();
      auto du = testing::decode(u.word()), dv = testing::decode(v.word());
      CHECK(max_common_piece(u, v, false) == testing::oracle_piece(du, dv));
      CHECK(max_common_piece(u, u, true) == testing::oracle_self_piece(du));
      CHECK(max_common_piece(u, v.inverse(), false) == testing::oracle_piece(du, testing::decode(v.inverse().word())));
    }
  }

  TEST_CASE("run level cost is independent of exponent size") {
    BigInt l = pow_ui(7, 200);
    CyclicWord u = cyclic_reduce(PowerWord::letter(1, l) * PowerWord::letter(2, 1)).core;
    CyclicWord v = cyclic_reduce(PowerWord::letter(1, l - 1) * PowerWord::letter(3, 1)).core;
    CHECK(max_common_piece(u, v, false) == l - 1);
  }
}
