#pragma once

// Discrete integration, monomials, the discrete exponential, duality and the
// two derivations (Duffin's vertex derivative and the face derivative).

#include <optional>
#include <string>
#include <vector>

#include "dch/holomorphy.hpp"

namespace dch {

/// One complex value per quad.
class FaceFunction {
 public:
  FaceFunction(MapPtr map, std::vector<Complex> values);

  const CriticalMap& map() const { return *map_; }
  const MapPtr& map_ptr() const { return map_; }
  std::size_t size() const { return values_.size(); }
  std::span<const Complex> values() const { return values_; }
  Complex operator[](QuadId q) const { return values_[q]; }

 private:
  MapPtr map_;
  std::vector<Complex> values_;
};

// ---------------------------------------------------------------------------
// Integration

/// (f(a) + f(b)) / 2 * (Z(b) - Z(a)) along the rhombus side (a, b).
Complex integrate_edge(const VertexFunction& f, VertexId a, VertexId b);

Complex integrate_path(const VertexFunction& f, const PathRef& path);

/// Integral along the diagonal (a, b) of a quad: the mean of f over the quad
/// times (Z(b) - Z(a)).
Complex integrate_lambda_edge(const VertexFunction& f, VertexId a, VertexId b);

/// Breadth-first propagation of F(b) = F(a) + integrate_edge(f, a, b) from
/// the origin, neighbors visited by increasing id.  No holomorphy check: for
/// non-holomorphic f the result depends on the spanning tree.
VertexFunction bfs_primitive(const VertexFunction& f);

/// max over rhombus sides of |F(b) - F(a) - integrate_edge(f, a, b)|.
double max_edge_defect(const VertexFunction& primitive_of_f, const VertexFunction& f);

inline constexpr double kPrimitiveTolerance = 1e-9;

/// Primitive of f dZ vanishing at the origin.  Throws NumericalError
/// (carrying the max loop residual) unless f is holomorphic at 1e-9.
VertexFunction primitive(const VertexFunction& f);

// ---------------------------------------------------------------------------
// Monomials and the exponential

/// Z^{:k:} based at the map origin: Z^{:0:} = 1, Z^{:k:} = k * primitive(Z^{:k-1:}).
VertexFunction monomial(const MapPtr& map, int k);

/// Z^{:0:} .. Z^{:max_k:}.
std::vector<VertexFunction> monomials(const MapPtr& map, int max_k);

inline constexpr double kPoleGuard = 1e-12;

/// Product over the path from the origin of
/// (1 + lambda h / 2) / (1 - lambda h / 2), h the successive rhombus sides.
/// Throws NumericalError when some |1 -+ lambda h / 2| <= 1e-12.
VertexFunction exp_product(const MapPtr& map, Complex lambda);

/// The lambda -> infinity limit of exp_product, which is epsilon.
VertexFunction exp_infinity(const MapPtr& map);

struct SeriesResult {
  VertexFunction values;
  std::optional<std::string> warning;
};

/// sum_{k=0}^{N} lambda^k Z^{:k:} / k!.  Warns when |lambda| >= 2 / delta.
SeriesResult exp_series_partial(const MapPtr& map, Complex lambda, int terms);

/// The parameter mu with dual(exp_product(lambda)) == exp_product(mu):
/// mu = 4 / (delta^2 conj(lambda)).  Equals 1 / conj(lambda) when delta = 2.
Complex dual_exp_parameter(const CriticalMap& map, Complex lambda);

// ---------------------------------------------------------------------------
// Duality and derivation

/// f^dag = epsilon * conj(f).
VertexFunction dual(const VertexFunction& f);

/// Mean of the face derivatives around the origin, weighted by the rho of
/// the diagonal through the origin.  This is the value of the derivative at
/// the origin.
Complex face_mean_lambda(const VertexFunction& f);

/// f' = (4 / delta^2) (integral_O f^dag dZ)^dag + lambda epsilon with lambda
/// fixed by face_mean_lambda.  Throws NumericalError for non-holomorphic f and
/// ValidationError when no quad touches the origin.
VertexFunction derive_duffin(const VertexFunction& f);

/// max over rhombus sides of |f(b) - f(a) - (f'(a) + f'(b)) / 2 (Z(b) - Z(a))|.
double derivative_edge_defect(const VertexFunction& f, const VertexFunction& fprime);

inline constexpr double kFaceDerivativeTolerance = 1e-10;

/// (f(x') - f(x)) / (Z(x') - Z(x)) per quad.  Throws NumericalError when the
/// dual diagonal gives a different ratio beyond 1e-10 max(1, |f|_inf).
FaceFunction face_derivative(const VertexFunction& f);

/// Contour sum of a dZ around the interior vertex v: over the quads incident
/// to v, a(q) times the counterclockwise diagonal opposite to v.  Throws
/// ValidationError for boundary vertices.
Complex morera_residual(const FaceFunction& a, VertexId v);

}  // namespace dch
