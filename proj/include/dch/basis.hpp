#pragma once

// Change of base point for discrete monomials through Young-diagram
// polynomials B^k, and the minimal polynomial of a finite map.

#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dch/calculus.hpp"

namespace dch {

using BigInt = boost::multiprecision::cpp_int;

/// A pointwise product of monomials, coded by its column heights
/// k_1 >= k_2 >= ... >= 1: parts (3, 3, 2) stands for (Z^{:3:})^2 Z^{:2:}.
struct YoungDiagram {
  std::vector<int> parts;

  int degree() const;
  int length() const { return static_cast<int>(parts.size()); }
  /// Distinct parts with multiplicities, largest part first.
  std::vector<std::pair<int, int>> groups() const;

  auto operator<=>(const YoungDiagram&) const = default;
};

std::string to_string(const YoungDiagram& y);

/// All partitions of k, in decreasing lexicographic order ((k) first).
std::vector<YoungDiagram> partitions(int k);

/// (-1)^{k+l} k! / prod (k_j!)^{l_j} * l! / prod l_j!.
BigInt young_coefficient(const YoungDiagram& y);

struct BPolynomial {
  int degree = 0;
  /// Nonzero terms, diagrams in decreasing lexicographic order.
  std::vector<std::pair<YoungDiagram, BigInt>> terms;

  BigInt coefficient_sum() const;
  bool operator==(const BPolynomial&) const = default;
};

/// B^k from the closed-form coefficients.
BPolynomial b_polynomial(int k);

/// B^0 .. B^max_k from B^k = sum_{j<k} C(k, j) (-1)^{k+j+1} Z^{:k-j:} B^j,
/// expanded as formal products of monomials.
std::vector<BPolynomial> b_polynomials_recursive(int max_k);

/// Y(b) given the values Z^{:0:}(b) .. Z^{:m:}(b), m >= largest part.
Complex evaluate_diagram(const YoungDiagram& y, std::span<const Complex> monomials_at_b);

/// B^k(b) with monomials based at the map origin.
Complex evaluate_b(int k, const MapPtr& map, VertexId b);

/// zeta^{:k:} for zeta = a (Z - Z(b)) based at b, expressed through the
/// origin-based monomials: a^k sum_j C(k, j) (-1)^j Z^{:k-j:} B^j(b).
VertexFunction translate_monomial(int k, Complex a, VertexId b, const MapPtr& map);

struct MinimalPolynomial {
  int n = 0;
  std::vector<Complex> a;  // a[0] = a_1 = 1, ..., a[n-1] = a_n
  /// max_k |a_k - (n+1-k)! / (n! k!) conj(a_{n+1-k}) / conj(a_n) (4/delta^2)^{k-1}|
  /// divided by the natural magnitude (4/delta^2)^{(k-1)/2} / k!.
  double symmetry_defect = 0.0;
  /// | |a_n| - (4/delta^2)^{(n-1)/2} / n! | relative to the latter.
  double modulus_defect = 0.0;
  /// |sum a_k Z^{:k:}|_inf / max_k |a_k Z^{:k:}|_inf.
  double residual = 0.0;
  /// |sum k a_k Z^{:k-1:} - epsilon|_inf / |epsilon|_inf.
  double normalization_residual = 0.0;
  /// sigma_min / sigma_max of the column-scaled evaluation matrix, per n.
  std::vector<double> singular_ratio_trace;
};

inline constexpr double kDependenceThreshold = 1e-8;

/// Smallest n such that Z^{:1:} .. Z^{:n:} are dependent, with a_1 = 1.
/// Throws ValidationError for maps without quads or max_degree below the
/// dimension bound, NumericalError when no dependence is found.
MinimalPolynomial minimal_polynomial(const MapPtr& map, int max_degree);

}  // namespace dch
