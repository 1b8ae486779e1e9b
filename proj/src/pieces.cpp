#include "sclforge/pieces.hpp"

#include <algorithm>

namespace sclforge {

namespace {

bool same_letter(const Run& a, const Run& b) { return a.gen == b.gen && sgn(a.exp) == sgn(b.exp); }

// Letter offset at which run `i` starts.
std::vector<BigInt> run_offsets(const std::vector<Run>& runs) {
  std::vector<BigInt> out(runs.size() + 1, BigInt(0));
  for (std::size_t i = 0; i < runs.size(); ++i) out[i + 1] = out[i] + abs(runs[i].exp);
  return out;
}

// Common length across the run boundary after run `bu` of u and after run
// `bv` of v. The walk stops once `cap` letters are covered.
BigInt boundary_extension(const std::vector<Run>& u, const std::vector<Run>& v, std::size_t bu, std::size_t bv,
                          const BigInt& cap) {
  const std::size_t nu = u.size();
  const std::size_t nv = v.size();
  auto at_u = [&](std::ptrdiff_t i) -> const Run& { return u[((i % static_cast<std::ptrdiff_t>(nu)) + nu) % nu]; };
  auto at_v = [&](std::ptrdiff_t i) -> const Run& { return v[((i % static_cast<std::ptrdiff_t>(nv)) + nv) % nv]; };
  const auto iu = static_cast<std::ptrdiff_t>(bu);
  const auto iv = static_cast<std::ptrdiff_t>(bv);
  if (!same_letter(at_u(iu), at_v(iv)) || !same_letter(at_u(iu + 1), at_v(iv + 1))) return 0;

  BigInt total = 0;
  // Backward from the boundary: runs bu, bu-1, ... against bv, bv-1, ...
  for (std::ptrdiff_t k = 0; total < cap; ++k) {
    const Run& a = at_u(iu - k);
    const Run& b = at_v(iv - k);
    if (!same_letter(a, b)) break;
    if (a.exp != b.exp) {
      total += std::min(abs(a.exp), abs(b.exp));
      break;
    }
    total += abs(a.exp);
  }
  // Forward: runs bu+1, bu+2, ... against bv+1, ...
  for (std::ptrdiff_t k = 1; total < cap; ++k) {
    const Run& a = at_u(iu + k);
    const Run& b = at_v(iv + k);
    if (!same_letter(a, b)) break;
    if (a.exp != b.exp) {
      total += std::min(abs(a.exp), abs(b.exp));
      break;
    }
    total += abs(a.exp);
  }
  return std::min(total, cap);
}

}  // namespace

BigInt max_common_piece(const CyclicWord& u, const CyclicWord& v_in, bool same_relator) {
  const CyclicWord& v = same_relator ? u : v_in;
  if (u.empty() || v.empty()) return 0;
  const auto& ru = u.runs();
  const auto& rv = v.runs();
  const BigInt len_u = u.letter_length();
  const BigInt len_v = v.letter_length();

  BigInt best = 0;
  for (std::size_t i = 0; i < ru.size(); ++i) {
    for (std::size_t j = 0; j < rv.size(); ++j) {
      if (!same_letter(ru[i], rv[j])) continue;
      BigInt cand = (same_relator && i == j) ? BigInt(abs(ru[i].exp) - 1)
                                             : BigInt(std::min(abs(ru[i].exp), abs(rv[j].exp)));
      best = std::max(best, cand);
    }
  }
  if (ru.size() < 2 || rv.size() < 2) return best;

  const auto off_u = run_offsets(ru);
  const BigInt cap_distinct = std::min(len_u, len_v);
  for (std::size_t bu = 0; bu < ru.size(); ++bu) {
    for (std::size_t bv = 0; bv < rv.size(); ++bv) {
      BigInt cap = cap_distinct;
      if (same_relator) {
        if (bu == bv) continue;
        // Both occurrences must fit in one linear rotation.
        BigInt d = off_u[bv + 1] - off_u[bu + 1];
        if (d < 0) d += len_u;
        cap = std::max(d, BigInt(len_u - d));
      }
      if (cap <= best) continue;
      best = std::max(best, boundary_extension(ru, rv, bu, bv, cap));
    }
  }
  return best;
}

}  // namespace sclforge
