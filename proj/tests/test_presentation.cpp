#include <doctest.h>

#include <set>

#include "sclforge/pieces.hpp"
#include "sclforge/presentation.hpp"
#include "support.hpp"

using namespace sclforge;

namespace {

SeqPair ones(std::uint64_t k) {
  std::vector<BigInt> m(k, BigInt(1)), n;
  for (std::uint64_t i = 1; i <= k; ++i) n.emplace_back(static_cast<unsigned long>(i));
  return SeqPair::from_lists(m, n);
}

}  // namespace

TEST_SUITE("presentation") {
  TEST_CASE("build_w and build_s") {
    const Alphabet A = family_alphabet();
    CHECK(format_word(build_w(1), A) == "a b c a^-1 b^-1 c^-1");
    CHECK(build_w(2).letter_length() == 12);
    const PowerWord a7 = PowerWord::letter(A.id_of("a"), 7), b7 = PowerWord::letter(A.id_of("b"), 7);
    const PowerWord c7 = PowerWord::letter(A.id_of("c"), 7);
    CHECK(build_w(7) == commutator(a7 * b7, c7 * a7.inverse()));
    CHECK_THROWS(build_w(0));

    SWord s = build_s(1, 1, 1);
    CHECK(s.l == 2310);
    CHECK(s.word.letter_length() == 41580);
    CHECK(s.word.run_count() == 18);
    SWord s1 = build_s(1, 1, 1, BigInt(1));
    CHECK(format_word(s1.word, A) ==
          "s1 s2 s3 s1^-1 s2^-1 s3^-1 s4 s5 s6 s4^-1 s5^-1 s6^-1 s7 s8 s9 s7^-1 s8^-1 s9^-1");
    PowerWord prod;
    for (int k = 1; k <= 3; ++k) {
      auto g = [&](int j) { return PowerWord::letter(A.id_of("s" + std::to_string(j)), s.l); };
      prod.append(commutator(g(3 * k - 2) * g(3 * k - 1), g(3 * k) * g(3 * k - 2).inverse()));
    }
    CHECK(prod == s.word);
  }

  TEST_CASE("build_r lengths") {
    CHECK(build_r(1, 1, 1, BigInt(1)).letter_length() == 31);
    CHECK(build_r(1, 1, 1).letter_length() == 41593);
    CHECK(build_r(2, 3, 1).letter_length() == 3 + 24 + 18 * family_l(1, 2, 3));
    CHECK(family_l(1, 2, 3) == 6 * 5 * 49 * 1331);
    for (std::uint64_t N = 1; N <= 4; ++N)
      for (std::uint64_t m = 1; m <= 4; ++m)
        for (std::uint64_t n = 1; n <= 4; ++n)
          CHECK(build_r(m, n, N).letter_length() == n + 12 * m * N + 18 * family_l(N, m, n));
  }

  TEST_CASE("l is injective on a grid") {
    std::set<BigInt> seen;
    for (std::uint64_t N = 1; N <= 6; ++N)
      for (std::uint64_t m = 1; m <= 6; ++m)
        for (std::uint64_t n = 1; n <= 6; ++n) CHECK(seen.insert(family_l(N, m, n)).second);
  }

  TEST_CASE("SeqPair invariants") {
    SeqPair ok = ones(5);
    CHECK(ok.value(3) == Rational(1, 3));
    SeqPair bad = SeqPair::from_lists({1, 1, 1}, {2, 2, 3});
    CHECK(bad.at(1).n == 2);
    try {
      bad.at(2);
      FAIL("accepted");
    } catch (const SequenceError& e) {
      CHECK(e.index() == 2);
    }
    SeqPair rising = SeqPair::from_lists({1, 3}, {2, 3});
    CHECK_THROWS_AS(rising.at(2), SequenceError);
    SeqPair zero = SeqPair::from_lists({0}, {1});
    CHECK_THROWS_AS(zero.at(1), SequenceError);

    int calls = 0;
    SeqPair counted([&](std::uint64_t i) {
      ++calls;
      return PairValue{BigInt(1), BigInt(static_cast<unsigned long>(i))};
    });
    counted.at(4);
    counted.at(2);
    counted.at(4);
    CHECK(calls == 4);
  }

  TEST_CASE("family presentation") {
    Presentation p = family_presentation(ones(3));
    CHECK(p.alphabet() == family_alphabet());
    CHECK(p.relator(2) == build_r(1, 2, 2));
    CHECK(p.relator(3) == build_r(1, 3, 3));
    Presentation bad = family_presentation(SeqPair::from_lists({1, 1}, {2, 2}));
    CHECK_THROWS_AS(bad.relator(2), SequenceError);
    Presentation general = family_presentation(SeqPair::from_lists({1, 2, 4}, {2, 5, 11}));
    CHECK(general.relator(3).letter_length() == 11 + 12 * 4 * 3 + 18 * family_l(3, 4, 11));
  }

  TEST_CASE("C'(1/6) examples") {
    Presentation fam = family_presentation(ones(2));
    PiecesReport rep = check_c_prime(fam, 2);
    CHECK(rep.pass);
    CHECK(rep.worst_ratio < Rational(1, 6));
    // The report keeps the longest piece per pair: for r_{1,1,1} that is an
    // s-run against itself shifted by one letter, which dominates the
    // w-period overlap of 6.
    bool self_found = false;
    for (const auto& e : rep.entries)
      if (e.i == 1 && e.j == 1 && e.kind == PairKind::Self) {
        self_found = true;
        CHECK(e.piece == family_l(1, 1, 1) - 1);
      }
    CHECK(self_found);
    CyclicWord w2 = cyclic_reduce(PowerWord::letter(0, 1) * build_w(1).power(2)).core;
    CHECK(max_common_piece(w2, w2, true) == 6);

    Presentation torus = parse_presentation("gens: a b\nrel: a b a^-1 b^-1\n");
    CHECK_FALSE(check_c_prime(torus, 1).pass);

    Presentation broken = family_presentation(ones(2), BigInt(1));
    CHECK_FALSE(check_c_prime(broken, 2).pass);
  }

  TEST_CASE("C'(lambda) is monotone in lambda") {
    Presentation broken = family_presentation(ones(2), BigInt(3));
    PiecesReport base = check_c_prime(broken, 2, Rational(1, 6));
    for (int den = 1; den <= 12; ++den) {
      const Rational lam(1, den);
      const bool pass = check_c_prime(broken, 2, lam).pass;
      CHECK(pass == (base.worst_ratio < lam));
    }
  }

  TEST_CASE("pieces report agrees with decoded oracle at small l") {
    for (unsigned lo : {1u, 2u, 5u}) {
      Presentation p = family_presentation(SeqPair::from_lists({1, 1, 2}, {1, 2, 5}), BigInt(lo));
      PiecesReport rep = check_c_prime(p, 3);
      std::vector<std::vector<int>> dec;
      for (std::uint64_t i = 1; i <= 3; ++i) dec.push_back(testing::decode(p.relator(i).word()));
      for (const auto& e : rep.entries) {
        const auto& u = dec[e.i - 1];
        std::size_t expect = 0;
        switch (e.kind) {
          case PairKind::Self: expect = testing::oracle_self_piece(u); break;
          case PairKind::SelfInverse:
            expect = testing::oracle_piece(u, testing::decode(p.relator(e.i).inverse().word()));
            break;
          case PairKind::Direct: expect = testing::oracle_piece(u, dec[e.j - 1]); break;
          case PairKind::Inverse:
            expect = testing::oracle_piece(u, testing::decode(p.relator(e.j).inverse().word()));
            break;
        }
        CHECK(e.piece == expect);
      }
    }
  }

  TEST_CASE("file format") {
    Presentation p = parse_presentation("gens: a b\nrel: a b a^-1 b^-1\n");
    CHECK(p.relator_count() == 1u);
    try {
      parse_presentation("gens: t a\nrel: t^0\n");
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("empty") != std::string::npos);
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_presentation("gens: a\nrel: a b\n"), ParseError);
    CHECK_THROWS_AS(parse_presentation("gens: a a\n"), ParseError);

    Presentation fam = family_presentation(ones(1), BigInt(1));
    const std::string text = print_presentation(fam, 1);
    CHECK(text.rfind("gens: t a b c s1 s2 s3 s4 s5 s6 s7 s8 s9\n", 0) == 0);
    CHECK(text.find("rel: t a b c a^-1 b^-1 c^-1 a b c a^-1 b^-1 c^-1 s1 s2 s3 s1^-1") != std::string::npos);
    Presentation back = parse_presentation(text);
    CHECK(print_presentation(back, 1) == text);
    CHECK(back.relator(1) == fam.relator(1));
    REQUIRE(back.family() != nullptr);
    CHECK(back.family()->l_override == BigInt(1));

    Presentation three = family_presentation(ones(3));
    const std::string t3 = print_presentation(three, 3);
    CHECK(print_presentation(parse_presentation(t3), 3) == t3);
  }
}
