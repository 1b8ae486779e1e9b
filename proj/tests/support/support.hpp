#pragma once

// Shared helpers for the unit tests and the acceptance binary: a random
// surface diagram generator with known Euler characteristic and decoded
// (letter-by-letter) oracles for piece lengths.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sclforge/diagram.hpp"

namespace sclforge::testing {

std::string read_file(const std::string& path);
/// Absolute path of a file under fixtures/.
std::string fixture(const std::string& name);

/// Signed letters, generator g as +(g+1) / -(g+1).
std::vector<int> decode(const PowerWord& w);

/// min(LCS(uu, vv), |u|, |v|) via a suffix automaton.
std::size_t oracle_piece(const std::vector<int>& u, const std::vector<int>& v);
/// Longest word occurring twice, at distinct positions, in one rotation of u.
std::size_t oracle_self_piece(const std::vector<int>& u);

struct GeneratedDiagram {
  SurfaceDiagram diagram;
  Presentation presentation;
  std::int64_t expected_chi;
  std::string kind;
};

/// Polygon model of a connected surface of genus g with b boundary circles
/// (a sphere is two glued polygons), then `refinements` random chord splits
/// and edge subdivisions, which keep chi. Every edge gets its own generator
/// with a random nonzero exponent; disk signs are random.
GeneratedDiagram random_surface(std::mt19937_64& rng, int genus, int boundaries, int refinements);

/// Mix of spheres, tori, genus 2 and bordered surfaces.
GeneratedDiagram random_diagram(std::mt19937_64& rng);

}  // namespace sclforge::testing
