#include "dch/holomorphy.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dch {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

void append_cr_row(std::vector<Triplet>& t, int row, const Quad& q) {
  const Complex irho = kI * q.rho_gamma;
  t.emplace_back(row, static_cast<int>(q.yp()), Complex{1.0, 0.0});
  t.emplace_back(row, static_cast<int>(q.y()), Complex{-1.0, 0.0});
  t.emplace_back(row, static_cast<int>(q.xp()), -irho);
  t.emplace_back(row, static_cast<int>(q.x()), irho);
}

double solution_residual(const VertexFunction& f, const BoundarySpec& values) {
  double r = 0.0;
  for (QuadId q = 0; q < f.map().quad_count(); ++q) r = std::max(r, std::abs(cr_residual(f, q)));
  for (const auto& [v, value] : values) r = std::max(r, std::abs(f[v] - value));
  return r;
}

}  // namespace

Complex cr_residual(const VertexFunction& f, QuadId q) {
  const Quad& quad = f.map().quad(q);
  return (f[quad.yp()] - f[quad.y()]) - kI * quad.rho_gamma * (f[quad.xp()] - f[quad.x()]);
}

HolomorphyCheck is_holomorphic(const VertexFunction& f, double tol) {
  HolomorphyCheck check;
  check.scale = f.scale();
  for (QuadId q = 0; q < f.map().quad_count(); ++q)
    check.max_residual = std::max(check.max_residual, std::abs(cr_residual(f, q)));
  check.holomorphic = check.max_residual <= tol * check.scale;
  return check;
}

VertexFunction epsilon(const MapPtr& map) {
  std::vector<Complex> values;
  values.reserve(map->vertex_count());
  for (const Vertex& v : map->vertices()) values.emplace_back(v.color == Color::Gamma ? 1.0 : -1.0);
  return VertexFunction(map, std::move(values));
}

std::vector<VertexId> boundary_parameter_vertices(const CriticalMap& map) {
  std::vector<VertexId> out;
  for (VertexId v : map.boundary_vertices())
    if (map.color(v) == Color::GammaStar) out.push_back(v);
  if (map.color(map.origin()) == Color::Gamma) {
    out.push_back(map.origin());
  } else {
    for (VertexId v = 0; v < map.vertex_count(); ++v)
      if (map.color(v) == Color::Gamma) {
        out.push_back(v);
        break;
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BoundarySpec restrict_to_boundary(const VertexFunction& f) {
  BoundarySpec spec;
  for (VertexId v : boundary_parameter_vertices(f.map())) spec[v] = f[v];
  return spec;
}

ConstrainedSolution solve_constrained(const MapPtr& map, const BoundarySpec& values) {
  const int n = static_cast<int>(map->vertex_count());
  const int quads = static_cast<int>(map->quad_count());
  const int rows = quads + static_cast<int>(values.size());

  std::vector<Triplet> triplets;
  triplets.reserve(4 * static_cast<std::size_t>(quads) + values.size());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows);
  for (int q = 0; q < quads; ++q) append_cr_row(triplets, q, map->quad(static_cast<QuadId>(q)));
  int row = quads;
  for (const auto& [v, value] : values) {
    if (v >= map->vertex_count())
      throw ValidationError("boundary value for unknown vertex " + std::to_string(v));
    triplets.emplace_back(row, static_cast<int>(v), Complex{1.0, 0.0});
    rhs[row] = value;
    ++row;
  }
  SparseMatrix m(rows, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();

  double value_scale = 1.0;
  for (const auto& [v, value] : values) value_scale = std::max(value_scale, std::abs(value));

  auto to_function = [&](const Eigen::VectorXcd& x) {
    return VertexFunction(map, std::vector<Complex>(x.data(), x.data() + x.size()));
  };

  if (rows == n) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() == Eigen::Success) {
      VertexFunction f = to_function(lu.solve(rhs));
      const double r = solution_residual(f, values);
      if (r <= kSolveTolerance * value_scale) return {std::move(f), r, false};
    }
  }

  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(m);
  if (qr.info() != Eigen::Success)
    throw NumericalError("least-squares factorization of the Cauchy-Riemann system failed");
  VertexFunction f = to_function(qr.solve(rhs));
  const double r = solution_residual(f, values);
  return {std::move(f), r, true};
}

VertexFunction solve_boundary(const MapPtr& map, const BoundarySpec& spec) {
  const std::vector<VertexId> expected = boundary_parameter_vertices(*map);
  std::vector<VertexId> given;
  given.reserve(spec.size());
  for (const auto& [v, value] : spec) given.push_back(v);
  if (given != expected) {
    std::ostringstream msg;
    msg << "boundary data must index exactly the " << expected.size()
        << " Gamma* boundary vertices plus one Gamma vertex (got " << given.size() << " ids)";
    throw ValidationError(msg.str());
  }
  ConstrainedSolution s = solve_constrained(map, spec);
  double value_scale = 1.0;
  for (const auto& [v, value] : spec) value_scale = std::max(value_scale, std::abs(value));
  if (s.residual > kSolveTolerance * value_scale) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "boundary data is inconsistent: least-squares residual " << s.residual;
    throw NumericalError(msg.str(), s.residual);
  }
  return std::move(s.f);
}

DimensionCount dimension_of_solution_space(const CriticalMap& map) {
  DimensionCount d;
  d.boundary_points = map.boundary_size();
  d.expected = d.boundary_points / 2 + 1;

  const int n = static_cast<int>(map.vertex_count());
  const int quads = static_cast<int>(map.quad_count());
  if (quads == 0) {
    d.rank = 0;
    d.nullity = static_cast<std::size_t>(n);
    return d;
  }

  if (n <= 2500) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(quads, n);
    for (int q = 0; q < quads; ++q) {
      const Quad& quad = map.quad(static_cast<QuadId>(q));
      const Complex irho = kI * quad.rho_gamma;
      m(q, quad.yp()) += 1.0;
      m(q, quad.y()) -= 1.0;
      m(q, quad.xp()) -= irho;
      m(q, quad.x()) += irho;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    qr.setThreshold(kRankTolerance);
    d.rank = static_cast<std::size_t>(qr.rank());
  } else {
    std::vector<Triplet> triplets;
    for (int q = 0; q < quads; ++q) append_cr_row(triplets, q, map.quad(static_cast<QuadId>(q)));
    SparseMatrix m(quads, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    double col_norm = 0.0;
    for (int c = 0; c < m.outerSize(); ++c) col_norm = std::max(col_norm, m.col(c).norm());
    Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(kRankTolerance * col_norm);
    qr.compute(m);
    d.rank = static_cast<std::size_t>(qr.rank());
  }
  d.nullity = static_cast<std::size_t>(n) - d.rank;
  return d;
}

VertexFunction random_holomorphic(const MapPtr& map, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  BoundarySpec spec;
  for (VertexId v : boundary_parameter_vertices(*map)) {
    const double re = unit(rng);
    const double im = unit(rng);
    spec[v] = Complex{re, im};
  }
  return solve_boundary(map, spec);
}

}  // namespace dch
