#include "sclforge/diagram.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sclforge {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool cancels(const PowerWord& left, const PowerWord& right) {
  if (left.empty() || right.empty()) return false;
  const Run& x = left.runs().back();
  const Run& y = right.runs().front();
  return x.gen == y.gen && sgn(x.exp) != sgn(y.exp);
}

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

/// `len` letters of the cyclic word B (length L) starting at `begin`.
PowerWord cyclic_slice(const PowerWord& B, const BigInt& L, const BigInt& begin, const BigInt& len) {
  const BigInt b = mod(begin, L);
  if (b + len <= L) return slice(B, b, b + len);
  PowerWord out = slice(B, b, L);
  out.append(slice(B, 0, b + len - L));
  return out;
}

std::string ids_text(std::uint64_t a, std::uint64_t b) { return std::to_string(a) + " and " + std::to_string(b); }

std::string range_text(const LetterRange& r) { return r.begin.get_str() + ".." + r.end.get_str(); }

}  // namespace

std::size_t ValidatedDiagram::edge_count() const {
  std::size_t e = 0;
  for (const auto& d : darts_) e += d.mate ? 1 : 2;
  return e / 2;
}

ValidationResult validate(const SurfaceDiagram& diag, const Presentation& pres) {
  ValidationResult res;
  auto error = [&](const std::string& kind, const std::string& msg) { res.errors.push_back({kind, msg}); };

  const std::size_t D = diag.darts.size();
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < D; ++i) {
    const auto& d = diag.darts[i];
    if (!index.emplace(d.id, i).second) error("dart", "duplicate dart id " + std::to_string(d.id));
    if (d.label.empty()) error("dart", "dart " + std::to_string(d.id) + " has an empty label");
    try {
      pres.alphabet().check(d.label);
    } catch (const AlphabetError& e) {
      error("dart", "dart " + std::to_string(d.id) + ": " + e.what());
    }
  }

  std::vector<std::optional<std::size_t>> mate(D);
  for (const auto& [a, b] : diag.pairs) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      error("pair", "pair " + ids_text(a, b) + " names an unknown dart");
      continue;
    }
    if (a == b) {
      error("pair", "dart " + std::to_string(a) + " is paired with itself");
      continue;
    }
    if (mate[ia->second] || mate[ib->second]) {
      error("pair", "pair " + ids_text(a, b) + " reuses an already paired dart");
      continue;
    }
    if (!(diag.darts[ia->second].label == invert(diag.darts[ib->second].label)))
      error("pair", "pairing labels not inverse: darts " + ids_text(a, b));
    mate[ia->second] = ib->second;
    mate[ib->second] = ia->second;
  }

  const std::size_t F = diag.disks.size();
  std::vector<std::optional<std::size_t>> disk_of(D);
  std::vector<std::size_t> pos(D, 0);
  for (std::size_t p = 0; p < F; ++p) {
    const auto& disk = diag.disks[p];
    const std::string name = "disk " + std::to_string(p + 1);
    if (disk.darts.empty()) error("disk", name + " has no darts");
    if (disk.sign != 1 && disk.sign != -1) error("disk", name + " has sign " + std::to_string(disk.sign));
    for (std::size_t k = 0; k < disk.darts.size(); ++k) {
      auto it = index.find(disk.darts[k]);
      if (it == index.end()) {
        error("disk", name + " lists unknown dart " + std::to_string(disk.darts[k]));
        continue;
      }
      if (disk_of[it->second]) {
        error("disk", "dart " + std::to_string(disk.darts[k]) + " appears in disk " +
                          std::to_string(*disk_of[it->second] + 1) + " and " + name);
        continue;
      }
      disk_of[it->second] = p;
      pos[it->second] = k;
    }
  }
  for (std::size_t i = 0; i < D; ++i)
    if (!disk_of[i]) error("dart", "dart " + std::to_string(diag.darts[i].id) + " belongs to no disk");
  if (!res.errors.empty()) return res;

  // Disk labels.
  std::vector<PowerWord> boundary(F);
  for (std::size_t p = 0; p < F; ++p) {
    const auto& disk = diag.disks[p];
    const std::string name = "disk " + std::to_string(p + 1);
    bool reduced = true;
    const std::size_t k = disk.darts.size();
    for (std::size_t j = 0; j < k; ++j) {
      const auto& here = diag.darts[index.at(disk.darts[j])];
      const auto& there = diag.darts[index.at(disk.darts[(j + 1) % k])];
      if (cancels(here.label, there.label)) {
        error("label", name + " boundary is not reduced between darts " + ids_text(here.id, there.id));
        reduced = false;
      }
    }
    if (!reduced) continue;
    for (auto id : disk.darts) boundary[p].append(diag.darts[index.at(id)].label);
    CyclicWord rel;
    try {
      rel = pres.relator(disk.relator);
    } catch (const std::exception& e) {
      error("disk", name + ": " + e.what());
      continue;
    }
    CyclicWord core = cyclic_reduce(boundary[p]).core;
    const CyclicWord expected = disk.sign == 1 ? rel : rel.inverse();
    if (!(core == expected)) {
      const CyclicWord other = disk.sign == 1 ? rel.inverse() : rel;
      if (core == other)
        error("label", name + " reads relator " + std::to_string(disk.relator) + " with the opposite sign");
      else
        error("label", name + " label does not match relator " + std::to_string(disk.relator) +
                           (disk.sign == 1 ? "" : "^-1"));
    }
  }
  if (!res.errors.empty()) return res;

  ValidatedDiagram vd;
  vd.source_ = diag;
  vd.pres_ = pres;
  vd.darts_.resize(D);
  vd.disks_.resize(F);
  for (std::size_t p = 0; p < F; ++p) {
    const auto& spec = diag.disks[p];
    auto& disk = vd.disks_[p];
    disk.sign = spec.sign;
    disk.relator = spec.relator;
    disk.boundary = boundary[p];
    disk.length = boundary[p].letter_length();
    BigInt offset = 0;
    const std::size_t k = spec.darts.size();
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = index.at(spec.darts[j]);
      disk.darts.push_back(i);
      auto& d = vd.darts_[i];
      d.id = diag.darts[i].id;
      d.label = diag.darts[i].label;
      d.length = d.label.letter_length();
      d.disk = p;
      d.next = index.at(spec.darts[(j + 1) % k]);
      d.prev = index.at(spec.darts[(j + k - 1) % k]);
      d.mate = mate[i];
      d.offset = offset;
      offset += d.length;
    }
  }

  // Vertices: the start of d is the end of its mate, i.e. the start of next(mate(d)).
  UnionFind corners(D);
  for (std::size_t i = 0; i < D; ++i)
    if (vd.darts_[i].mate) corners.unite(i, vd.darts_[*vd.darts_[i].mate].next);
  std::unordered_map<std::size_t, std::size_t> vertex_of_root;
  for (std::size_t i = 0; i < D; ++i) {
    auto [it, fresh] = vertex_of_root.emplace(corners.find(i), vd.vertices_.size());
    if (fresh) vd.vertices_.push_back({0, {}, false});
    vd.darts_[i].vertex = it->second;
    vd.vertices_[it->second].corners.push_back(i);
  }
  for (std::size_t i = 0; i < D; ++i) {
    const auto& d = vd.darts_[i];
    vd.vertices_[d.vertex].degree += 1;
    if (!d.mate) {
      vd.vertices_[vd.darts_[d.next].vertex].degree += 1;
      vd.vertices_[d.vertex].on_boundary = true;
      vd.vertices_[vd.darts_[d.next].vertex].on_boundary = true;
    }
  }

  // Components.
  UnionFind faces(F);
  for (std::size_t i = 0; i < D; ++i)
    if (vd.darts_[i].mate) faces.unite(vd.darts_[i].disk, vd.darts_[*vd.darts_[i].mate].disk);
  std::unordered_map<std::size_t, std::size_t> comp_of_root;
  for (std::size_t p = 0; p < F; ++p) {
    auto [it, fresh] = comp_of_root.emplace(faces.find(p), vd.components_.size());
    if (fresh) vd.components_.emplace_back();
    vd.disks_[p].component = it->second;
    vd.components_[it->second].disks.push_back(p);
    vd.components_[it->second].faces += 1;
  }
  for (const auto& v : vd.vertices_) vd.components_[vd.disks_[vd.darts_[v.corners.front()].disk].component].vertices += 1;
  std::vector<bool> seen(D, false);
  for (std::size_t i = 0; i < D; ++i) {
    auto& comp = vd.components_[vd.disks_[vd.darts_[i].disk].component];
    if (vd.darts_[i].mate) {
      if (i < *vd.darts_[i].mate) comp.edges += 1;
      continue;
    }
    comp.edges += 1;
    if (seen[i]) continue;
    comp.boundary_cycles += 1;
    std::size_t d = i;
    while (!seen[d]) {
      seen[d] = true;
      std::size_t x = vd.darts_[d].next;
      while (vd.darts_[x].mate) x = vd.darts_[*vd.darts_[x].mate].next;
      d = x;
    }
  }

  // Family data and markers.
  const FamilyInfo* family = pres.family();
  for (std::size_t p = 0; p < F; ++p) {
    auto& disk = vd.disks_[p];
    const auto& spec = diag.disks[p];
    const std::string name = "disk " + std::to_string(p + 1);
    if (!family) {
      if (spec.markers) error("marker", name + ": markers need a family presentation");
      continue;
    }
    PairValue pv = family->seq.at(disk.relator);
    disk.family = FamilyParams{pv.m, pv.n, disk.relator};
    if (disk.sign == -1) {
      if (spec.markers) error("marker", name + ": markers only apply to positive disks");
      continue;
    }
    const BigInt& L = disk.length;
    const std::uint64_t N = disk.relator;
    const BigInt n = pv.n;
    const BigInt wlen = 12 * pv.m * N;
    SegmentMarkers mk;
    if (spec.markers) {
      mk = *spec.markers;
      bool in_range = true;
      for (const LetterRange* r : {&mk.t, &mk.w, &mk.s}) {
        if (r->begin < 0 || r->begin > L || r->end < 0 || r->end > L) {
          error("marker", name + ": marker range " + range_text(*r) + " outside 0.." + L.get_str());
          in_range = false;
        }
      }
      if (!in_range) continue;
      if (mod(mk.t.end - mk.w.begin, L) != 0 || mod(mk.w.end - mk.s.begin, L) != 0 ||
          mod(mk.s.end - mk.t.begin, L) != 0) {
        error("marker", name + ": markers do not partition the boundary as t . w . s");
        continue;
      }
      if (mod(mk.t.end - mk.t.begin, L) != mod(n, L) || mod(mk.w.end - mk.w.begin, L) != mod(wlen, L)) {
        error("marker", name + ": marker lengths do not match n and 12mN");
        continue;
      }
    } else {
      const GenId t = pres.alphabet().id_of("t");
      const auto& runs = disk.boundary.runs();
      BigInt begin = 0;
      bool found = false;
      if (runs.size() > 1 && runs.back().gen == t) {
        begin = L - abs(runs.back().exp);
        found = true;
      } else {
        BigInt off = 0;
        for (const auto& r : runs) {
          if (r.gen == t) {
            begin = off;
            found = true;
            break;
          }
          off += abs(r.exp);
        }
      }
      if (!found) {
        error("marker", name + ": no t-run to place markers");
        continue;
      }
      mk.t = {begin, mod(begin + n, L)};
      mk.w = {mk.t.end, mod(begin + n + wlen, L)};
      mk.s = {mk.w.end, begin};
      res.notes.push_back({"marker", name + ": markers placed at t=" + range_text(mk.t) + " w=" + range_text(mk.w) +
                                         " s=" + range_text(mk.s)});
    }
    {
      const GenId t = pres.alphabet().id_of("t");
      const std::uint64_t Nu = N;
      const PowerWord want_t = PowerWord::letter(t, n);
      const PowerWord want_w = build_w(Nu).power(2 * pv.m);
      const PowerWord want_s = build_s(Nu, to_u64(pv.m, "m"), to_u64(pv.n, "n"), family->l_override).word;
      const BigInt slen = L - n - wlen;
      if (!(cyclic_slice(disk.boundary, L, mk.t.begin, n) == want_t))
        error("marker", name + ": t-range " + range_text(mk.t) + " does not read t^" + n.get_str());
      else if (!(cyclic_slice(disk.boundary, L, mk.w.begin, wlen) == want_w))
        error("marker", name + ": w-range " + range_text(mk.w) + " does not read w_N^{2m}");
      else if (!(cyclic_slice(disk.boundary, L, mk.s.begin, slen) == want_s))
        error("marker", name + ": s-range " + range_text(mk.s) + " does not read s_{N,m,n}");
      else
        disk.markers = mk;
    }
  }
  if (!res.errors.empty()) return res;
  res.diagram = std::move(vd);
  return res;
}

ValidatedDiagram require_valid(const SurfaceDiagram& diag, const Presentation& pres) {
  ValidationResult res = validate(diag, pres);
  if (!res.ok()) {
    std::string msg = "invalid diagram:";
    for (const auto& e : res.errors) msg += "\n  " + e.message;
    throw DiagramError(msg);
  }
  return std::move(*res.diagram);
}

std::int64_t euler_characteristic(const ValidatedDiagram& vd) {
  std::int64_t chi = 0;
  for (const auto& c : vd.components()) chi += c.chi();
  return chi;
}

std::int64_t chi_minus(const ValidatedDiagram& vd) {
  std::int64_t chi = 0;
  for (const auto& c : vd.components()) chi += std::min<std::int64_t>(c.chi(), 0);
  return chi;
}

Rational curvature(const ValidatedDiagram& vd, std::size_t disk) {
  if (disk >= vd.disks().size()) throw std::out_of_range("no disk " + std::to_string(disk + 1));
  Rational kappa(1);
  for (std::size_t i : vd.disks()[disk].darts) {
    const auto& d = vd.darts()[i];
    kappa += Rational(1, vd.vertices()[d.vertex].corners.size());
    kappa -= Rational(1, d.mate ? 2 : 1);
  }
  return kappa;
}

GaussBonnet gauss_bonnet_check(const ValidatedDiagram& vd) {
  Rational total(0);
  for (std::size_t p = 0; p < vd.disks().size(); ++p) total += curvature(vd, p);
  const std::int64_t chi = euler_characteristic(vd);
  return {total, chi, total == Rational(chi)};
}

int beta_vertex(const ValidatedDiagram& vd, std::size_t vertex) {
  return vd.vertices().at(vertex).degree >= 3 ? 1 : 0;
}

namespace {

/// Position of dart start offsets in a disk, for letter-level queries.
struct DiskIndex {
  const ValidatedDiagram& vd;
  const ValidatedDiagram::Disk& disk;

  /// Dart whose label contains letter offset o (0 <= o < L); exact is true
  /// when o is the start corner of that dart.
  std::pair<std::size_t, bool> locate(const BigInt& o) const {
    const auto& ds = disk.darts;
    std::size_t lo = 0, hi = ds.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (vd.darts()[ds[mid]].offset <= o) lo = mid;
      else hi = mid;
    }
    return {ds[lo], vd.darts()[ds[lo]].offset == o};
  }

  int beta_at(const BigInt& o) const {
    auto [dart, exact] = locate(o);
    return exact ? beta_vertex(vd, vd.darts()[dart].vertex) : 0;
  }

  /// Branch corners with offset strictly inside (lo, hi), 0 <= lo <= hi <= L.
  std::int64_t branch_between(const BigInt& lo, const BigInt& hi) const {
    std::int64_t count = 0;
    for (std::size_t i : disk.darts) {
      const auto& d = vd.darts()[i];
      if (d.offset > lo && d.offset < hi) count += beta_vertex(vd, d.vertex);
    }
    return count;
  }
};

}  // namespace

Rational beta_path(const ValidatedDiagram& vd, std::size_t disk_index, const BigInt& begin, const BigInt& length) {
  const auto& disk = vd.disks().at(disk_index);
  const BigInt& L = disk.length;
  if (length < 0 || length > L) throw std::invalid_argument("path length outside 0..|dP|");
  DiskIndex idx{vd, disk};
  const BigInt b = mod(begin, L);
  const BigInt e = mod(b + length, L);
  Rational beta = make_rational(idx.beta_at(b) + idx.beta_at(e), 2);
  if (length == 0) return beta;
  if (b + length <= L) {
    beta += idx.branch_between(b, b + length);
  } else {
    beta += idx.branch_between(b, L);
    beta += idx.beta_at(0);
    beta += idx.branch_between(0, b + length - L);
  }
  return beta;
}

Rational beta_path(const ValidatedDiagram& vd, const std::vector<std::uint64_t>& dart_ids) {
  if (dart_ids.empty()) throw std::invalid_argument("empty path");
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < vd.darts().size(); ++i) index.emplace(vd.darts()[i].id, i);
  std::vector<std::size_t> ds;
  for (auto id : dart_ids) {
    auto it = index.find(id);
    if (it == index.end()) throw std::invalid_argument("unknown dart " + std::to_string(id));
    ds.push_back(it->second);
  }
  BigInt length = 0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const auto& d = vd.darts()[ds[k]];
    if (k > 0 && vd.darts()[ds[k - 1]].next != ds[k])
      throw std::invalid_argument("path is not contiguous at dart " + std::to_string(d.id));
    length += d.length;
  }
  const auto& first = vd.darts()[ds.front()];
  if (length > vd.disks()[first.disk].length) throw std::invalid_argument("path runs around the disk more than once");
  return beta_path(vd, first.disk, first.offset, length);
}

Rational beta_disk(const ValidatedDiagram& vd, std::size_t disk) {
  Rational beta(0);
  for (std::size_t i : vd.disks().at(disk).darts) beta += beta_vertex(vd, vd.darts()[i].vertex);
  return beta;
}

std::vector<BranchBound> branch_bound_check(const ValidatedDiagram& vd) {
  std::vector<BranchBound> out;
  for (std::size_t p = 0; p < vd.disks().size(); ++p) {
    Rational kappa = curvature(vd, p);
    Rational beta = beta_disk(vd, p);
    out.push_back({p, kappa, beta, -kappa >= (beta - 6) / 6});
  }
  return out;
}

namespace {

/// Letter point on a disk boundary with its degree and, when the degree is
/// 2 and the point is interior, the other disk at it.
struct PointInfo {
  std::size_t degree;
  std::optional<std::size_t> other_disk;
};

PointInfo point_info(const ValidatedDiagram& vd, std::size_t disk_index, const BigInt& offset) {
  DiskIndex idx{vd, vd.disks()[disk_index]};
  auto [dart, exact] = idx.locate(mod(offset, vd.disks()[disk_index].length));
  const auto& d = vd.darts()[dart];
  if (!exact) {
    if (d.mate) return {2, vd.darts()[*d.mate].disk};
    return {2, std::nullopt};
  }
  const auto& v = vd.vertices()[d.vertex];
  if (v.degree == 2 && v.corners.size() == 2) {
    const std::size_t other = v.corners[0] == dart ? v.corners[1] : v.corners[0];
    return {2, vd.darts()[other].disk};
  }
  return {v.degree, std::nullopt};
}

const FamilyInfo& require_family(const ValidatedDiagram& vd) {
  const FamilyInfo* f = vd.presentation().family();
  if (!f) throw DiagramError("mu and the claims need a family presentation");
  return *f;
}

}  // namespace

std::vector<DiskMu> mu(const ValidatedDiagram& vd) {
  require_family(vd);
  std::vector<DiskMu> out;
  for (std::size_t p = 0; p < vd.disks().size(); ++p) {
    const auto& disk = vd.disks()[p];
    if (disk.sign != 1) continue;
    if (!disk.markers) throw DiagramError("disk " + std::to_string(p + 1) + " has no markers");
    const std::uint64_t N = disk.family->N;
    const std::uint64_t segments = 12 * to_u64(disk.family->m, "m");
    DiskMu dm{p, {}, {}, {}, Rational(0)};
    dm.endpoint_mu.reserve(segments + 1);
    for (std::uint64_t k = 0; k <= segments; ++k) {
      const BigInt o = disk.markers->w.begin + BigInt(std::to_string(k)) * N;
      PointInfo pi = point_info(vd, p, o);
      int value = 0;
      if (pi.degree == 2 && pi.other_disk) {
        const auto& other = vd.disks()[*pi.other_disk];
        value = (other.sign == -1 && other.relator >= N) ? 1 : 0;
      }
      dm.endpoint_mu.push_back(value);
    }
    for (std::uint64_t k = 0; k < segments; ++k) {
      Rational seg = make_rational(dm.endpoint_mu[k] + dm.endpoint_mu[k + 1], 2);
      dm.segment_mu.push_back(seg);
      dm.total += seg;
      dm.segment_beta.push_back(beta_path(vd, p, disk.markers->w.begin + BigInt(std::to_string(k)) * N, BigInt(N)));
    }
    out.push_back(std::move(dm));
  }
  return out;
}

namespace {

BigInt exponent_of(const PowerWord& w, GenId g) {
  BigInt sum = 0;
  for (const auto& r : w.runs())
    if (r.gen == g) sum += r.exp;
  return sum;
}

}  // namespace

ClaimsReport claims_check(const ValidatedDiagram& vd) {
  const FamilyInfo& family = require_family(vd);
  ClaimsReport rep;
  rep.c1.name = "C1 degree-2 segment endpoints touch negative disks";
  rep.c2.name = "C2 beta(q) + mu(q) >= 1";
  rep.c3.name = "C3 -kappa(P) >= -mu(P)/6 + 2m(P)";
  rep.c4.name = "C4 n(Sigma) <= sum (n(P) - mu(P) n(P) / 12m(P))";

  // Hypothesis heuristics.
  std::uint64_t max_relator = 1;
  for (const auto& disk : vd.disks()) max_relator = std::max(max_relator, disk.relator);
  for (std::size_t i = 0; i < vd.darts().size(); ++i) {
    const auto& d = vd.darts()[i];
    if (!d.mate || i > *d.mate) continue;
    const auto& p = vd.disks()[d.disk];
    const auto& q = vd.disks()[vd.darts()[*d.mate].disk];
    if (6 * d.length >= p.length || 6 * d.length >= q.length) {
      rep.outside_hypotheses = true;
      rep.hypothesis_notes.push_back("edge " + ids_text(d.id, vd.darts()[*d.mate].id) + " has length " +
                                     d.length.get_str() + ", at least 1/6 of an adjacent disk boundary");
    }
  }
  PiecesReport pieces = check_c_prime(vd.presentation(), max_relator);
  if (!pieces.pass) {
    rep.outside_hypotheses = true;
    rep.hypothesis_notes.push_back("relators 1.." + std::to_string(max_relator) + " are not C'(1/6) (worst ratio " +
                                   to_string(pieces.worst_ratio) + ")");
  }
  const GenId t = vd.presentation().alphabet().id_of("t");
  BigInt degree = 0;
  for (const auto& d : vd.darts()) {
    if (d.mate) continue;
    degree += exponent_of(d.label, t);
    if (!(d.label.run_count() == 1 && d.label.runs()[0].gen == t && d.label.runs()[0].exp > 0)) {
      rep.outside_hypotheses = true;
      rep.hypothesis_notes.push_back("boundary dart " + std::to_string(d.id) + " is not a positive power of t");
    }
  }

  std::vector<DiskMu> mus = mu(vd);
  Rational bound(0);
  for (const auto& dm : mus) {
    const auto& disk = vd.disks()[dm.disk];
    const std::string name = "disk " + std::to_string(dm.disk + 1);
    const std::uint64_t N = disk.family->N;
    for (std::size_t k = 0; k < dm.endpoint_mu.size(); ++k) {
      PointInfo pi = point_info(vd, dm.disk, disk.markers->w.begin + BigInt(std::to_string(k)) * N);
      if (pi.degree != 2) continue;
      rep.c1.checked += 1;
      if (!pi.other_disk) {
        rep.c1.pass = false;
        rep.c1.failures.push_back(name + " endpoint " + std::to_string(k) + ": on the surface boundary");
      } else if (vd.disks()[*pi.other_disk].sign != -1) {
        rep.c1.pass = false;
        rep.c1.failures.push_back(name + " endpoint " + std::to_string(k) + ": adjacent disk " +
                                  std::to_string(*pi.other_disk + 1) + " is positive");
      }
    }
    for (std::size_t k = 0; k < dm.segment_mu.size(); ++k) {
      rep.c2.checked += 1;
      if (dm.segment_beta[k] + dm.segment_mu[k] < 1) {
        rep.c2.pass = false;
        rep.c2.failures.push_back(name + " segment q^" + std::to_string(k / 6 + 1) + "_" + std::to_string(k % 6 + 1) +
                                  ": beta " + to_string(dm.segment_beta[k]) + " + mu " + to_string(dm.segment_mu[k]) +
                                  " < 1");
      }
    }
    const Rational kappa = curvature(vd, dm.disk);
    const Rational rhs = -dm.total / 6 + 2 * Rational(disk.family->m);
    rep.c3.checked += 1;
    if (!(-kappa >= rhs)) {
      rep.c3.pass = false;
      rep.c3.failures.push_back(name + ": -kappa = " + to_string(Rational(-kappa)) + " < " + to_string(rhs));
    }
    const Rational n(disk.family->n);
    bound += n - dm.total * n / (12 * Rational(disk.family->m));
  }
  (void)family;
  rep.c4.checked = 1;
  rep.c4_degree = Rational(degree);
  rep.c4_bound = bound;
  if (!(rep.c4_degree <= bound)) {
    rep.c4.pass = false;
    rep.c4.failures.push_back("n(Sigma) = " + degree.get_str() + " exceeds " + to_string(bound));
  }
  return rep;
}

BigInt boundary_degree(const ValidatedDiagram& vd, std::string_view generator) {
  auto g = vd.presentation().alphabet().find(generator);
  if (!g) throw DiagramError("generator '" + std::string(generator) + "' not in the alphabet");
  BigInt degree = 0;
  for (const auto& d : vd.darts()) {
    if (d.mate) continue;
    const auto& runs = d.label.runs();
    if (runs.size() != 1 || runs[0].gen != *g || runs[0].exp <= 0)
      throw DiagramError("not positive admissible: boundary dart " + std::to_string(d.id) + " is not a positive power of " +
                         std::string(generator));
    degree += runs[0].exp;
  }
  return degree;
}

Rational diagram_scl_upper(const ValidatedDiagram& vd, std::string_view generator) {
  const BigInt n = boundary_degree(vd, generator);
  if (n == 0) throw DiagramError("not positive admissible: boundary degree is 0");
  return Rational(-chi_minus(vd)) / (2 * Rational(n));
}

SurfaceDiagram normalized(const ValidatedDiagram& vd) {
  const auto& darts = vd.darts();
  const std::size_t D = darts.size();
  std::vector<PowerWord> label(D);
  std::vector<std::size_t> next(D), prev(D);
  std::vector<std::optional<std::size_t>> mate(D);
  std::vector<bool> alive(D, true);
  std::vector<std::size_t> first(vd.disks().size());
  std::vector<BigInt> shift(vd.disks().size(), 0);
  for (std::size_t i = 0; i < D; ++i) {
    label[i] = darts[i].label;
    next[i] = darts[i].next;
    prev[i] = darts[i].prev;
    mate[i] = darts[i].mate;
  }
  for (std::size_t p = 0; p < vd.disks().size(); ++p) first[p] = vd.disks()[p].darts.front();

  // Removes the start corner of y by gluing y onto x = prev(y).
  auto merge = [&](std::size_t y) {
    const std::size_t x = prev[y];
    const std::size_t p = darts[y].disk;
    if (first[p] == y) {
      first[p] = x;
      shift[p] += label[x].letter_length();
    }
    label[x].append(label[y]);
    next[x] = next[y];
    prev[next[y]] = x;
    alive[y] = false;
  };

  for (const auto& v : vd.vertices()) {
    if (v.degree != 2) continue;
    if (v.corners.size() == 2) {
      const std::size_t d = v.corners[0], e = v.corners[1];
      if (prev[d] == d || prev[e] == e) continue;
      const std::size_t pd = prev[d], pe = prev[e];
      merge(d);
      merge(e);
      mate[pd] = pe;
      mate[pe] = pd;
    } else {
      const std::size_t d = v.corners[0];
      if (prev[d] == d) continue;
      merge(d);
    }
  }

  SurfaceDiagram out;
  for (std::size_t i = 0; i < D; ++i) {
    if (!alive[i]) continue;
    out.darts.push_back({darts[i].id, label[i]});
    if (mate[i] && i < *mate[i]) out.pairs.emplace_back(darts[i].id, darts[*mate[i]].id);
  }
  for (std::size_t p = 0; p < vd.disks().size(); ++p) {
    const auto& src = vd.source().disks[p];
    DiskSpec spec{src.sign, src.relator, {}, src.markers};
    std::size_t d = first[p];
    do {
      spec.darts.push_back(darts[d].id);
      d = next[d];
    } while (d != first[p]);
    if (spec.markers && shift[p] != 0) {
      const BigInt& L = vd.disks()[p].length;
      for (LetterRange* r : {&spec.markers->t, &spec.markers->w, &spec.markers->s}) {
        r->begin = mod(r->begin + shift[p], L);
        r->end = mod(r->end + shift[p], L);
      }
    }
    out.disks.push_back(std::move(spec));
  }
  return out;
}

CurvatureReport curvature_report(const ValidatedDiagram& vd) {
  CurvatureReport rep;
  std::optional<std::vector<DiskMu>> mus;
  if (vd.presentation().family()) mus = mu(vd);
  auto bb = branch_bound_check(vd);
  rep.total_kappa = 0;
  for (std::size_t p = 0; p < vd.disks().size(); ++p) {
    const auto& disk = vd.disks()[p];
    DiskReport dr{p, disk.sign, disk.relator, bb[p].kappa, bb[p].beta, std::nullopt, std::nullopt, std::nullopt,
                  bb[p].holds};
    if (disk.family) {
      dr.n = disk.sign * disk.family->n;
      dr.m = disk.family->m;
    }
    if (mus)
      for (const auto& dm : *mus)
        if (dm.disk == p) dr.mu = dm.total;
    rep.total_kappa += dr.kappa;
    rep.disks.push_back(std::move(dr));
  }
  rep.chi = euler_characteristic(vd);
  rep.chi_minus = chi_minus(vd);
  rep.vertices = vd.vertices().size();
  rep.edges = vd.edge_count();
  rep.faces = vd.disks().size();
  rep.gauss_bonnet = rep.total_kappa == Rational(rep.chi);
  ValidatedDiagram norm = require_valid(normalized(vd), vd.presentation());
  rep.normalized_vertices = norm.vertices().size();
  rep.normalized_edges = norm.edge_count();
  rep.normalized_total_kappa = gauss_bonnet_check(norm).total_kappa;
  return rep;
}

SurfaceDiagram disjoint_union(const SurfaceDiagram& a, const SurfaceDiagram& b) {
  std::uint64_t shift = 0;
  for (const auto& d : a.darts) shift = std::max(shift, d.id + 1);
  SurfaceDiagram out = a;
  for (const auto& d : b.darts) out.darts.push_back({d.id + shift, d.label});
  for (const auto& [x, y] : b.pairs) out.pairs.emplace_back(x + shift, y + shift);
  for (auto disk : b.disks) {
    for (auto& id : disk.darts) id += shift;
    out.disks.push_back(std::move(disk));
  }
  return out;
}

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return out;
}

std::uint64_t parse_id(const Token& tok, std::size_t line) {
  try {
    BigInt v = parse_bigint(tok.text);
    if (v < 0) throw std::invalid_argument("negative");
    return to_u64(v, "id");
  } catch (const std::exception&) {
    throw ParseError("expected a non-negative integer, got '" + std::string(tok.text) + "'", line, tok.column);
  }
}

LetterRange parse_range(std::string_view text, std::size_t line, std::size_t column) {
  auto dots = text.find("..");
  if (dots == std::string_view::npos) throw ParseError("expected range a..b", line, column);
  try {
    return {parse_bigint(text.substr(0, dots)), parse_bigint(text.substr(dots + 2))};
  } catch (const std::invalid_argument&) {
    throw ParseError("expected range a..b", line, column);
  }
}

}  // namespace

SurfaceDiagram parse_diagram(std::string_view text, const Alphabet& alphabet) {
  SurfaceDiagram diag;
  enum class Section { None, Darts, Pairs, Disks } section = Section::None;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string_view body = trim_view(line);
    if (body.empty()) continue;
    if (body == "darts:") {
      section = Section::Darts;
      continue;
    }
    if (body == "pairs:") {
      section = Section::Pairs;
      continue;
    }
    if (body == "disks:") {
      section = Section::Disks;
      continue;
    }
    auto toks = tokenize(line);
    switch (section) {
      case Section::None:
        throw ParseError("expected 'darts:', 'pairs:' or 'disks:'", line_no, toks[0].column);
      case Section::Darts: {
        if (toks.size() < 2) throw ParseError("dart line needs an id and a label", line_no, toks[0].column);
        const std::uint64_t id = parse_id(toks[0], line_no);
        const std::size_t label_col = toks[1].column - 1;
        diag.darts.push_back({id, parse_word_at(line.substr(label_col), alphabet, line_no, label_col)});
        break;
      }
      case Section::Pairs: {
        if (toks.size() != 2) throw ParseError("pair line needs exactly two dart ids", line_no, toks[0].column);
        diag.pairs.emplace_back(parse_id(toks[0], line_no), parse_id(toks[1], line_no));
        break;
      }
      case Section::Disks: {
        if (toks.size() < 3) throw ParseError("disk line needs sign, relator index and darts", line_no, toks[0].column);
        DiskSpec disk;
        const auto s = toks[0].text;
        if (s == "+1" || s == "+" || s == "1") disk.sign = 1;
        else if (s == "-1" || s == "-") disk.sign = -1;
        else throw ParseError("disk sign must be +1 or -1", line_no, toks[0].column);
        disk.relator = parse_id(toks[1], line_no);
        std::size_t k = 2;
        for (; k < toks.size() && toks[k].text != "markers:"; ++k) disk.darts.push_back(parse_id(toks[k], line_no));
        if (k < toks.size()) {
          SegmentMarkers mk;
          bool have_t = false, have_w = false, have_s = false;
          for (++k; k < toks.size(); ++k) {
            auto eq = toks[k].text.find('=');
            if (eq == std::string_view::npos) throw ParseError("expected t=, w= or s=", line_no, toks[k].column);
            auto key = toks[k].text.substr(0, eq);
            LetterRange r = parse_range(toks[k].text.substr(eq + 1), line_no, toks[k].column + eq + 1);
            if (key == "t") mk.t = r, have_t = true;
            else if (key == "w") mk.w = r, have_w = true;
            else if (key == "s") mk.s = r, have_s = true;
            else throw ParseError("unknown marker '" + std::string(key) + "'", line_no, toks[k].column);
          }
          if (!have_t || !have_w || !have_s) throw ParseError("markers need t=, w= and s=", line_no, 1);
          disk.markers = mk;
        }
        diag.disks.push_back(std::move(disk));
        break;
      }
    }
  }
  return diag;
}

std::string print_diagram(const SurfaceDiagram& diag, const Alphabet& alphabet) {
  std::ostringstream out;
  out << "darts:\n";
  for (const auto& d : diag.darts) out << d.id << ' ' << format_word(d.label, alphabet) << '\n';
  out << "pairs:\n";
  for (const auto& [a, b] : diag.pairs) out << a << ' ' << b << '\n';
  out << "disks:\n";
  for (const auto& disk : diag.disks) {
    out << (disk.sign == 1 ? "+1" : "-1") << ' ' << disk.relator;
    for (auto id : disk.darts) out << ' ' << id;
    if (disk.markers)
      out << " markers: t=" << range_text(disk.markers->t) << " w=" << range_text(disk.markers->w)
          << " s=" << range_text(disk.markers->s);
    out << '\n';
  }
  return out.str();
}

}  // namespace sclforge
