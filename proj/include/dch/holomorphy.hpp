#pragma once

// Discrete Cauchy-Riemann equation on critical maps:
//   f(y') - f(y) = i rho(x, x') (f(x') - f(x))   on every quad (x, y, x', y').

#include <cstdint>
#include <map>
#include <vector>

#include "dch/vertex_function.hpp"

namespace dch {

/// f(y') - f(y) - i rho(x, x') (f(x') - f(x)).
Complex cr_residual(const VertexFunction& f, QuadId q);

struct HolomorphyCheck {
  bool holomorphic = false;
  double max_residual = 0.0;
  double scale = 1.0;  // max(1, |f|_inf)
};

HolomorphyCheck is_holomorphic(const VertexFunction& f, double tol);

/// The biconstant: +1 on Gamma, -1 on Gamma*.
VertexFunction epsilon(const MapPtr& map);

/// Prescribed values keyed by vertex id.
using BoundarySpec = std::map<VertexId, Complex>;

/// Vertices parametrizing the holomorphic functions of `map`: the Gamma*
/// boundary vertices plus one Gamma vertex (the origin when it is in Gamma,
/// else the smallest Gamma id).
std::vector<VertexId> boundary_parameter_vertices(const CriticalMap& map);

/// The values of f on boundary_parameter_vertices().
BoundarySpec restrict_to_boundary(const VertexFunction& f);

struct ConstrainedSolution {
  VertexFunction f;
  double residual = 0.0;  // max of CR residuals and constraint mismatch
  bool least_squares = false;
};

/// Holomorphic function matching arbitrary prescribed values.  Square
/// systems go through a sparse LU; anything else (or a singular square
/// system) falls back to sparse least squares.  The residual is reported,
/// never thrown.
ConstrainedSolution solve_constrained(const MapPtr& map, const BoundarySpec& values);

inline constexpr double kSolveTolerance = 1e-10;

/// Holomorphic function with the given Gamma* boundary values and one Gamma
/// value.  Throws ValidationError when `spec` does not index exactly
/// boundary_parameter_vertices(), NumericalError (carrying the residual)
/// when the system turns out inconsistent.
VertexFunction solve_boundary(const MapPtr& map, const BoundarySpec& spec);

struct DimensionCount {
  std::size_t boundary_points = 0;   // |dU|
  std::size_t expected = 0;          // |dU|/2 + 1
  std::size_t rank = 0;              // rank of the CR constraint matrix
  std::size_t nullity = 0;           // dimension of the holomorphic space
};

inline constexpr double kRankTolerance = 1e-9;

/// Nullity of the CR system by rank-revealing QR (relative threshold 1e-9).
DimensionCount dimension_of_solution_space(const CriticalMap& map);

/// Holomorphic function from uniformly random boundary data in the unit box.
VertexFunction random_holomorphic(const MapPtr& map, std::uint64_t seed);

}  // namespace dch
