#pragma once

#include "sclforge/word.hpp"

namespace sclforge {

/// Longest word that is a subword of a rotation of `u` and of a rotation of
/// `v`, computed on runs (cost independent of exponent sizes).
///
/// With `same_relator` the two occurrences must sit at distinct offsets of
/// one linear rotation of `u` (v is ignored); this is the self-overlap of a
/// relator with itself. Inverse closure is the caller's job.
BigInt max_common_piece(const CyclicWord& u, const CyclicWord& v, bool same_relator);

}  // namespace sclforge
