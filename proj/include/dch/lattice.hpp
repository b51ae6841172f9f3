#pragma once

// Critical maps: planar bipartite quad-graphs whose faces are rhombi of a
// common side length.  A quad is stored as (x, y, x', y'), counterclockwise,
// with x, x' in Gamma and y, y' in Gamma*.  The Gamma diagonal (x, x') carries
// rho(x, x') = |y' - y| / |x' - x|, the dual diagonal the inverse.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dch/types.hpp"

namespace dch {

enum class Color : std::uint8_t { Gamma, GammaStar };

inline Color opposite(Color c) {
  return c == Color::Gamma ? Color::GammaStar : Color::Gamma;
}

struct Vertex {
  Complex z;
  Color color;
};

struct Quad {
  std::array<VertexId, 4> v;  // x, y, x', y'
  double rho_gamma = 0.0;     // rho(x, x')
  double rho_star = 0.0;      // rho(y, y')

  VertexId x() const { return v[0]; }
  VertexId y() const { return v[1]; }
  VertexId xp() const { return v[2]; }
  VertexId yp() const { return v[3]; }
};

// An unoriented rhombus side, a < b.
struct DiamondEdge {
  VertexId a;
  VertexId b;
  std::array<QuadId, 2> quads{};
  std::uint8_t quad_count = 0;

  bool on_boundary() const { return quad_count == 1; }
};

class CriticalMap;
using MapPtr = std::shared_ptr<const CriticalMap>;

/// Immutable critical map.
///
/// The constructor normalizes every quad to the (x, y, x', y')
/// counterclockwise convention and derives adjacency and boundary data.  It
/// rejects structurally unusable input (ids out of range, quads that do not
/// alternate colors) with ValidationError; geometric criticality is checked
/// separately by validate_criticality().  When `rho` is empty the ratios are
/// taken from the embedding.
class CriticalMap {
 public:
  CriticalMap(double delta, std::vector<Vertex> vertices,
              std::vector<std::array<VertexId, 4>> quads, VertexId origin,
              std::vector<std::array<double, 2>> rho = {});

  double delta() const { return delta_; }
  VertexId origin() const { return origin_; }
  double eta() const { return eta_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t quad_count() const { return quads_.size(); }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Quad>& quads() const { return quads_; }
  const std::vector<DiamondEdge>& edges() const { return edges_; }

  Complex z(VertexId v) const { return vertices_.at(v).z; }
  Color color(VertexId v) const { return vertices_.at(v).color; }
  const Quad& quad(QuadId q) const;

  /// Rhombus-side neighbors, sorted by id.
  std::span<const VertexId> neighbors(VertexId v) const;
  /// Quads containing `v`, sorted by id.
  std::span<const QuadId> incident_quads(VertexId v) const;

  bool are_neighbors(VertexId a, VertexId b) const;
  /// The quad having {a, b} as one of its diagonals.
  std::optional<QuadId> quad_with_diagonal(VertexId a, VertexId b) const;

  bool is_boundary_vertex(VertexId v) const { return boundary_.at(v); }
  std::vector<VertexId> boundary_vertices() const;
  std::size_t boundary_size() const;

  /// Index of `v` inside quad `q` (0..3).
  int corner_of(QuadId q, VertexId v) const;

 private:
  double delta_;
  std::vector<Vertex> vertices_;
  std::vector<Quad> quads_;
  VertexId origin_;
  double eta_ = 0.0;

  std::vector<DiamondEdge> edges_;
  std::vector<std::vector<VertexId>> neighbors_;
  std::vector<std::vector<QuadId>> incident_;
  std::vector<bool> boundary_;
};

/// A chain of rhombus sides.
struct PathRef {
  std::vector<VertexId> vertices;
};

/// Throws ValidationError unless consecutive path vertices are rhombus-side
/// neighbors of `map`.
void validate_path(const CriticalMap& map, const PathRef& path);

/// Position of lattice point (m, n) of delta (Z e^{i theta} + Z e^{-i theta}).
Complex lattice_point(double delta, double theta, long m, long n);

/// Patch of rows x cols rhombi spanned by delta e^{i theta} (cols) and
/// delta e^{-i theta} (rows), with lattice point (0, 0) at the plane origin.
/// `origin_at` must be one of the generated vertices.
MapPtr build_rect_lattice(double delta, double theta, int rows, int cols,
                          Complex origin_at = {});

/// One-row strip of n squares of side 1/n above [0, 1]; the real-axis
/// vertices l/n form a rhombus-side path.  Origin at 0.
MapPtr build_chain(int n);

/// Id of the vertex at position `z` (within tol * delta), if any.
std::optional<VertexId> find_vertex(const CriticalMap& map, Complex z,
                                    double tol = 1e-9);

struct Violation {
  std::string kind;   // "side", "orientation", "diagonal", "rho", ...
  std::string where;  // "quad 3", "edge 4-7", ...
  double measured = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kCriticalityTolerance = 1e-12;
inline constexpr double kDefaultEtaFloor = kPi / 12.0;

ValidationReport validate_criticality(const CriticalMap& map);

std::string to_string(const Violation& v);

}  // namespace dch
