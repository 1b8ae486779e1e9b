#include <doctest.h>

#include <algorithm>
#include <random>

#include "sclforge/diagram.hpp"
#include "support.hpp"

using namespace sclforge;
using testing::fixture;
using testing::read_file;

namespace {

struct Loaded {
  Presentation pres;
  SurfaceDiagram diag;
};

Loaded load(const std::string& vkd, const std::string& pres) {
  Presentation p = parse_presentation(read_file(fixture(pres)));
  return {p, parse_diagram(read_file(fixture(vkd)), p.alphabet())};
}

ValidatedDiagram valid(const Loaded& l) { return require_valid(l.diag, l.pres); }

/// Splits the label g^k of dart `id` into g^a g^(k-a), mirroring its mate;
/// disk labels are unchanged.
SurfaceDiagram split_dart(const SurfaceDiagram& d, std::uint64_t id, const BigInt& a) {
  SurfaceDiagram out = d;
  std::uint64_t next_id = 0;
  for (const auto& x : d.darts) next_id = std::max(next_id, x.id);
  auto find_dart = [&](std::uint64_t want) -> DartSpec& {
    return *std::find_if(out.darts.begin(), out.darts.end(), [&](const DartSpec& x) { return x.id == want; });
  };
  auto split_one = [&](std::uint64_t dart, const BigInt& first) {
    DartSpec& spec = find_dart(dart);
    const Run r = spec.label.runs().at(0);
    spec.label = PowerWord::letter(r.gen, first);
    const std::uint64_t fresh = ++next_id;
    out.darts.push_back({fresh, PowerWord::letter(r.gen, r.exp - first)});
    for (auto& disk : out.disks) {
      auto it = std::find(disk.darts.begin(), disk.darts.end(), dart);
      if (it != disk.darts.end()) {
        disk.darts.insert(it + 1, fresh);
        break;
      }
    }
    return fresh;
  };
  std::optional<std::uint64_t> mate;
  std::size_t pair_index = 0;
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    if (d.pairs[i].first == id) mate = d.pairs[i].second, pair_index = i;
    if (d.pairs[i].second == id) mate = d.pairs[i].first, pair_index = i;
  }
  const BigInt k = find_dart(id).label.runs().at(0).exp;
  const std::uint64_t d2 = split_one(id, a);
  if (mate) {
    // mate reads g^-k; its first part g^-(k-a) faces d2.
    const std::uint64_t m2 = split_one(*mate, -(k - a));
    out.pairs[pair_index] = {id, m2};
    out.pairs.emplace_back(d2, *mate);
  }
  return out;
}

}  // namespace

TEST_SUITE("diagram") {
  TEST_CASE("torus square") {
    Loaded t = load("torus.vkd", "torus.pres");
    ValidatedDiagram vd = valid(t);
    CHECK(euler_characteristic(vd) == 0);
    CHECK(chi_minus(vd) == 0);
    CHECK(curvature(vd, 0) == 0);
    CHECK(vd.vertices().size() == 1);
    CHECK(vd.vertices()[0].degree == 4);
    CHECK(beta_disk(vd, 0) == 4);  // one vertex, four corners
    auto bb = branch_bound_check(vd);
    CHECK(bb[0].holds);
    GaussBonnet gb = gauss_bonnet_check(vd);
    CHECK(gb.equal);
    CHECK(gb.chi == 0);
  }

  TEST_CASE("mismatched pairing is reported with the dart ids") {
    Loaded t = load("torus.vkd", "torus.pres");
    t.diag.pairs[0] = {1, 2};
    t.diag.pairs[1] = {3, 4};
    ValidationResult r = validate(t.diag, t.pres);
    CHECK_FALSE(r.ok());
    bool found = false;
    for (const auto& e : r.errors)
      if (e.message.find("pairing labels not inverse: darts 1 and 2") != std::string::npos) found = true;
    CHECK(found);
    CHECK(r.errors.size() >= 2);  // both bad pairs, no early abort
    CHECK_THROWS_AS(require_valid(t.diag, t.pres), DiagramError);
  }

  TEST_CASE("tetrahedron and genus 2") {
    ValidatedDiagram tet = valid(load("tetra.vkd", "tetra.pres"));
    CHECK(euler_characteristic(tet) == 2);
    CHECK(chi_minus(tet) == 0);
    for (std::size_t p = 0; p < 4; ++p) {
      CHECK(curvature(tet, p) == Rational(1, 2));
      CHECK(beta_disk(tet, p) == 3);
    }
    for (const auto& b : branch_bound_check(tet)) {
      CHECK(b.holds);
      CHECK(-b.kappa == (b.beta - 6) / 6);
    }
    CHECK(gauss_bonnet_check(tet).total_kappa == 2);

    ValidatedDiagram g2 = valid(load("genus2.vkd", "genus2.pres"));
    CHECK(euler_characteristic(g2) == -2);
    CHECK(chi_minus(g2) == -2);
    CHECK(gauss_bonnet_check(g2).equal);
  }

  TEST_CASE("lone disk with boundary") {
    Presentation p = parse_presentation("gens: x y z\nrel: x y z\n");
    SurfaceDiagram d = parse_diagram("darts:\n1 x\n2 y\n3 z\ndisks:\n+1 1 1 2 3\n", p.alphabet());
    ValidatedDiagram vd = require_valid(d, p);
    CHECK(curvature(vd, 0) == 1);
    CHECK(euler_characteristic(vd) == 1);
    CHECK(beta_disk(vd, 0) == 0);
    CHECK(beta_path(vd, std::vector<std::uint64_t>{1, 2}) == 0);
    auto bb = branch_bound_check(vd);
    CHECK(-bb[0].kappa == (bb[0].beta - 6) / 6);
    CHECK_THROWS(beta_path(vd, std::vector<std::uint64_t>{1, 3}));
  }

  TEST_CASE("negative disks read the inverse relator") {
    Presentation p = parse_presentation("gens: x y z\nrel: x y z\n");
    SurfaceDiagram d = parse_diagram("darts:\n1 z^-1\n2 y^-1\n3 x^-1\ndisks:\n-1 1 1 2 3\n", p.alphabet());
    CHECK(validate(d, p).ok());
    d.disks[0].sign = 1;
    CHECK_FALSE(validate(d, p).ok());
  }

  TEST_CASE("family fixtures: admissible diagram of degree 1") {
    Loaded h = load("r111_handles.vkd", "family_r111.pres");
    ValidatedDiagram vd = valid(h);
    CHECK(boundary_degree(vd) == 1);
    CHECK(euler_characteristic(vd) == -9);
    CHECK(diagram_scl_upper(vd) == Rational(9, 2));
    ClaimsReport c = claims_check(vd);
    CHECK(c.all_pass());
    CHECK(c.c4_degree == 1);
    CHECK(c.outside_hypotheses);  // l = 1 is not C'(1/6)
    auto mus = mu(vd);
    REQUIRE(mus.size() == 1);
    CHECK(mus[0].total == 0);
    CHECK(mus[0].endpoint_mu.size() == 13);

    // Disjoint doubling keeps the ratio.
    SurfaceDiagram two = disjoint_union(h.diag, h.diag);
    ValidatedDiagram vd2 = require_valid(two, h.pres);
    CHECK(boundary_degree(vd2) == 2);
    CHECK(chi_minus(vd2) == -18);
    CHECK(diagram_scl_upper(vd2) == Rational(9, 2));
    CHECK(gauss_bonnet_check(vd2).total_kappa == -18);
    CHECK(vd2.components().size() == 2);
  }

  TEST_CASE("family fixtures: w-part glued to a negative disk") {
    ValidatedDiagram vd = valid(load("r111_sphere.vkd", "family_r111.pres"));
    auto mus = mu(vd);
    REQUIRE(mus.size() == 1);
    CHECK(mus[0].total == 12);
    ClaimsReport c = claims_check(vd);
    CHECK(c.c1.pass);
    CHECK(c.c2.pass);
    CHECK(c.c2.checked == 12);
    CHECK(c.c4.pass);
    CHECK_FALSE(c.c3.pass);  // sphere, kappa = 1 on both disks
    CHECK(c.outside_hypotheses);
    CHECK(euler_characteristic(vd) == 2);
  }

  TEST_CASE("non-positive boundary is rejected") {
    Loaded h = load("r111_handles.vkd", "family_r111.pres");
    SurfaceDiagram flipped = h.diag;
    for (auto& d : flipped.darts) d.label = d.label.inverse();
    for (auto& disk : flipped.disks) {
      std::reverse(disk.darts.begin(), disk.darts.end());
      disk.sign = -1;
      disk.markers.reset();
    }
    ValidatedDiagram vd = require_valid(flipped, h.pres);
    CHECK_THROWS_AS(boundary_degree(vd), DiagramError);
    CHECK_THROWS_AS(diagram_scl_upper(vd), DiagramError);
    ValidatedDiagram torus = valid(load("torus.vkd", "torus.pres"));
    CHECK_THROWS_AS(diagram_scl_upper(torus, "a"), DiagramError);
  }

  TEST_CASE("markers are checked against labels") {
    Loaded h = load("r111_sphere.vkd", "family_r111.pres");
    h.diag.disks[0].markers = SegmentMarkers{{0, 1}, {1, 13}, {13, 31}};
    CHECK(validate(h.diag, h.pres).ok());
    h.diag.disks[0].markers = SegmentMarkers{{0, 1}, {1, 12}, {12, 31}};
    CHECK_FALSE(validate(h.diag, h.pres).ok());
    h.diag.disks[0].markers = SegmentMarkers{{0, 2}, {2, 13}, {13, 31}};
    CHECK_FALSE(validate(h.diag, h.pres).ok());
  }

  TEST_CASE("file round trip") {
    for (auto [vkd, pres] : {std::pair{"torus.vkd", "torus.pres"}, {"tetra.vkd", "tetra.pres"},
                             {"genus2.vkd", "genus2.pres"}, {"r111_handles.vkd", "family_r111.pres"},
                             {"r111_sphere.vkd", "family_r111.pres"}}) {
      Loaded l = load(vkd, pres);
      const std::string text = print_diagram(l.diag, l.pres.alphabet());
      CHECK(parse_diagram(text, l.pres.alphabet()) == l.diag);
    }
    Presentation p = parse_presentation("gens: a b\n");
    CHECK_THROWS_AS(parse_diagram("darts:\n1 a\ndisks:\n+2 1 1\n", p.alphabet()), ParseError);
    CHECK_THROWS_AS(parse_diagram("darts:\n1 q\n", p.alphabet()), ParseError);
  }

  TEST_CASE("random surfaces: Gauss-Bonnet, chi and branch bound") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      testing::GeneratedDiagram g = testing::random_diagram(rng);
      ValidationResult r = validate(g.diagram, g.presentation);
      REQUIRE_MESSAGE(r.ok(), g.kind, " ", r.errors.front().message);
      const ValidatedDiagram& vd = *r.diagram;
      CHECK(euler_characteristic(vd) == g.expected_chi);
      GaussBonnet gb = gauss_bonnet_check(vd);
      CHECK(gb.equal);
      for (const auto& b : branch_bound_check(vd)) CHECK_MESSAGE(b.holds, g.kind);
      CHECK(print_diagram(parse_diagram(print_diagram(g.diagram, g.presentation.alphabet()),
                                        g.presentation.alphabet()),
                          g.presentation.alphabet()) == print_diagram(g.diagram, g.presentation.alphabet()));
    }
  }

  TEST_CASE("random surfaces: beta is additive over boundary splits") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 150; ++trial) {
      testing::GeneratedDiagram g = testing::random_diagram(rng);
      ValidatedDiagram vd = require_valid(g.diagram, g.presentation);
      for (std::size_t p = 0; p < vd.disks().size(); ++p) {
        const long L = vd.disks()[p].length.get_si();
        std::uniform_int_distribution<long> cut(0, L - 1);
        std::vector<long> cuts(std::uniform_int_distribution<int>(1, 5)(rng));
        for (auto& c : cuts) c = cut(rng);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        Rational sum(0);
        for (std::size_t k = 0; k < cuts.size(); ++k) {
          const long next = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + L;
          sum += beta_path(vd, p, BigInt(cuts[k]), BigInt(next - cuts[k]));
        }
        if (cuts.size() == 1) CHECK(beta_path(vd, p, BigInt(cuts[0]), BigInt(L)) == beta_disk(vd, p));
        CHECK(sum == beta_disk(vd, p));
        // dart-path form agrees with the offset form
        const auto& darts = vd.disks()[p].darts;
        std::vector<std::uint64_t> ids;
        for (std::size_t k = 0; k < darts.size(); ++k) ids.push_back(vd.darts()[darts[k]].id);
        CHECK(beta_path(vd, ids) == beta_disk(vd, p));
      }
    }
  }

  TEST_CASE("random surfaces: subdivision then normalization keeps curvature") {
    std::mt19937_64 rng(5);
    int splits = 0;
    for (int trial = 0; trial < 150; ++trial) {
      testing::GeneratedDiagram g = testing::random_diagram(rng);
      ValidatedDiagram vd = require_valid(g.diagram, g.presentation);
      CurvatureReport rep = curvature_report(vd);
      CHECK(rep.normalized_total_kappa == rep.total_kappa);
      ValidatedDiagram norm = require_valid(normalized(vd), g.presentation);
      CHECK(euler_characteristic(norm) == euler_characteristic(vd));

      // pick a dart with |exponent| >= 2 and split it
      std::optional<std::uint64_t> target;
      for (const auto& d : g.diagram.darts)
        if (abs(d.label.runs()[0].exp) >= 2) target = d.id;
      if (!target) continue;
      ++splits;
      const BigInt k = std::find_if(g.diagram.darts.begin(), g.diagram.darts.end(), [&](const DartSpec& d) {
                         return d.id == *target;
                       })->label.runs()[0].exp;
      SurfaceDiagram sub = split_dart(g.diagram, *target, k > 0 ? BigInt(1) : BigInt(-1));
      ValidatedDiagram vs = require_valid(sub, g.presentation);
      CHECK(euler_characteristic(vs) == euler_characteristic(vd));
      CHECK(gauss_bonnet_check(vs).equal);
      ValidatedDiagram vs_norm = require_valid(normalized(vs), g.presentation);
      for (std::size_t p = 0; p < vd.disks().size(); ++p) CHECK(curvature(vs_norm, p) == curvature(norm, p));
    }
    CHECK(splits > 50);
  }

  TEST_CASE("disjoint union is additive") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      auto a = testing::random_diagram(rng);
      ValidatedDiagram va = require_valid(a.diagram, a.presentation);
      SurfaceDiagram doubled = disjoint_union(a.diagram, a.diagram);
      ValidatedDiagram vd = require_valid(doubled, a.presentation);
      CHECK(euler_characteristic(vd) == 2 * euler_characteristic(va));
      CHECK(chi_minus(vd) == 2 * chi_minus(va));
      CHECK(gauss_bonnet_check(vd).total_kappa == 2 * gauss_bonnet_check(va).total_kappa);
    }
  }
}
