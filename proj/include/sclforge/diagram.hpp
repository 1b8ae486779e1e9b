#pragma once

// Van Kampen diagrams on surfaces as combinatorial maps.
//
// Every dart is one side of an edge and belongs to exactly one disk; a disk
// lists its darts counterclockwise. Paired darts are the two sides of an
// interior edge and carry inverse labels. Unpaired darts lie on the surface
// boundary. A corner is the start point of a dart inside its disk; vertices
// are classes of corners.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sclforge/presentation.hpp"

namespace sclforge {

class DiagramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open range of letter offsets on a disk boundary, read cyclically.
struct LetterRange {
  BigInt begin;
  BigInt end;
  friend bool operator==(const LetterRange&, const LetterRange&) = default;
};

/// Boundary split p_t . p_w . p_s of a positive family disk.
struct SegmentMarkers {
  LetterRange t;
  LetterRange w;
  LetterRange s;
  friend bool operator==(const SegmentMarkers&, const SegmentMarkers&) = default;
};

struct DartSpec {
  std::uint64_t id = 0;
  PowerWord label;
  friend bool operator==(const DartSpec&, const DartSpec&) = default;
};

struct DiskSpec {
  int sign = 1;
  std::uint64_t relator = 1;
  std::vector<std::uint64_t> darts;
  std::optional<SegmentMarkers> markers;
  friend bool operator==(const DiskSpec&, const DiskSpec&) = default;
};

struct SurfaceDiagram {
  std::vector<DartSpec> darts;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::vector<DiskSpec> disks;
  friend bool operator==(const SurfaceDiagram&, const SurfaceDiagram&) = default;
};

struct Diagnostic {
  std::string kind;
  std::string message;
};

/// Family parameters of a disk labelled r_{m,n,N}^{+-1}.
struct FamilyParams {
  BigInt m;
  BigInt n;
  std::uint64_t N = 0;
};

struct ValidationResult;

/// A diagram that passed validate(); every analysis takes one of these.
class ValidatedDiagram {
 public:
  struct Dart {
    std::uint64_t id;
    PowerWord label;
    BigInt length;
    std::size_t disk;
    std::size_t next;
    std::size_t prev;
    std::optional<std::size_t> mate;
    std::size_t vertex;  // vertex of the start corner
    BigInt offset;       // letter offset of the start corner in its disk
  };
  struct Disk {
    int sign;
    std::uint64_t relator;
    std::vector<std::size_t> darts;
    PowerWord boundary;
    BigInt length;
    std::optional<SegmentMarkers> markers;
    std::optional<FamilyParams> family;
    std::size_t component;
  };
  struct Vertex {
    std::size_t degree;   // edge ends
    std::vector<std::size_t> corners;  // dart indices whose start corner is here
    bool on_boundary;
  };
  struct Component {
    std::vector<std::size_t> disks;
    std::int64_t vertices = 0;
    std::int64_t edges = 0;
    std::int64_t faces = 0;
    std::int64_t boundary_cycles = 0;
    std::int64_t chi() const { return vertices - edges + faces; }
  };

  const std::vector<Dart>& darts() const { return darts_; }
  const std::vector<Disk>& disks() const { return disks_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Component>& components() const { return components_; }
  const Presentation& presentation() const { return pres_; }
  const SurfaceDiagram& source() const { return source_; }
  std::size_t edge_count() const;

 private:
  friend ValidationResult validate(const SurfaceDiagram& diag, const Presentation& pres);
  ValidatedDiagram() = default;

  SurfaceDiagram source_;
  Presentation pres_;
  std::vector<Dart> darts_;
  std::vector<Disk> disks_;
  std::vector<Vertex> vertices_;
  std::vector<Component> components_;
};

struct ValidationResult {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> notes;
  std::optional<ValidatedDiagram> diagram;
  bool ok() const { return errors.empty(); }
};

/// Checks pairing, disk cycles, labels against R^{+-1}, markers; collects
/// every violation. Missing markers on positive family disks are placed
/// from the unique t-run.
ValidationResult validate(const SurfaceDiagram& diag, const Presentation& pres);
/// validate() or throw DiagramError listing every error.
ValidatedDiagram require_valid(const SurfaceDiagram& diag, const Presentation& pres);

std::int64_t euler_characteristic(const ValidatedDiagram& vd);
/// Sum over components of min(chi, 0).
std::int64_t chi_minus(const ValidatedDiagram& vd);

/// Disks are addressed by their 0-based position in the file.
Rational curvature(const ValidatedDiagram& vd, std::size_t disk);

struct GaussBonnet {
  Rational total_kappa;
  std::int64_t chi;
  bool equal;
};
GaussBonnet gauss_bonnet_check(const ValidatedDiagram& vd);

int beta_vertex(const ValidatedDiagram& vd, std::size_t vertex);
/// Path of `length` letters on a disk boundary from letter offset `begin`.
Rational beta_path(const ValidatedDiagram& vd, std::size_t disk, const BigInt& begin, const BigInt& length);
/// Path along consecutive darts (by dart id) of one disk.
Rational beta_path(const ValidatedDiagram& vd, const std::vector<std::uint64_t>& dart_ids);
Rational beta_disk(const ValidatedDiagram& vd, std::size_t disk);

struct BranchBound {
  std::size_t disk;
  Rational kappa;
  Rational beta;
  bool holds;  // -kappa >= (beta - 6) / 6
};
std::vector<BranchBound> branch_bound_check(const ValidatedDiagram& vd);

struct DiskMu {
  std::size_t disk;
  std::vector<int> endpoint_mu;      // 12m + 1 values along p_w
  std::vector<Rational> segment_mu;  // 12m values
  std::vector<Rational> segment_beta;
  Rational total;
};
/// mu on every positive family disk; throws DiagramError when the
/// presentation carries no family data.
std::vector<DiskMu> mu(const ValidatedDiagram& vd);

struct ClaimResult {
  std::string name;
  bool pass = true;
  std::size_t checked = 0;
  std::vector<std::string> failures;
};

struct ClaimsReport {
  ClaimResult c1, c2, c3, c4;
  Rational c4_degree;
  Rational c4_bound;
  /// Gluing looks non-reduced or not C'(1/6); failures are then expected.
  bool outside_hypotheses = false;
  std::vector<std::string> hypothesis_notes;
  bool all_pass() const { return c1.pass && c2.pass && c3.pass && c4.pass; }
};
ClaimsReport claims_check(const ValidatedDiagram& vd);

/// Sum of boundary exponents; throws DiagramError unless every boundary
/// dart is a positive power of `generator`.
BigInt boundary_degree(const ValidatedDiagram& vd, std::string_view generator = "t");
/// -chi^-(Sigma) / (2 n(Sigma))
Rational diagram_scl_upper(const ValidatedDiagram& vd, std::string_view generator = "t");

struct DiskReport {
  std::size_t disk;
  int sign;
  std::uint64_t relator;
  Rational kappa;
  Rational beta;
  std::optional<Rational> mu;
  std::optional<BigInt> n;  // signed: -n_i on negative disks
  std::optional<BigInt> m;
  bool branch_bound;
};

struct CurvatureReport {
  std::vector<DiskReport> disks;
  Rational total_kappa;
  std::int64_t chi;
  std::int64_t chi_minus;
  std::size_t vertices, edges, faces;
  /// Counts after merging edges through degree-2 vertices; curvature is
  /// unchanged by that merge.
  std::size_t normalized_vertices, normalized_edges;
  Rational normalized_total_kappa;
  bool gauss_bonnet;
};
CurvatureReport curvature_report(const ValidatedDiagram& vd);

/// Merges edges through degree-2 vertices (keeping one vertex per disk).
SurfaceDiagram normalized(const ValidatedDiagram& vd);

/// Disjoint union; the second diagram's dart ids are shifted past the first.
SurfaceDiagram disjoint_union(const SurfaceDiagram& a, const SurfaceDiagram& b);

// File format, '#' comments:
//   darts:
//   <id> <word>
//   pairs:
//   <id> <id>
//   disks:
//   <+1|-1> <relator index> <dart ids...> [markers: t=a..b w=a..b s=a..b]

SurfaceDiagram parse_diagram(std::string_view text, const Alphabet& alphabet);
std::string print_diagram(const SurfaceDiagram& diag, const Alphabet& alphabet);

}  // namespace sclforge
