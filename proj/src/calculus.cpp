#include "dch/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace dch {

FaceFunction::FaceFunction(MapPtr map, std::vector<Complex> values)
    : map_(std::move(map)), values_(std::move(values)) {
  if (!map_) throw ValidationError("face function without a map");
  if (values_.size() != map_->quad_count())
    throw ValidationError("face function has " + std::to_string(values_.size()) +
                          " values for " + std::to_string(map_->quad_count()) + " quads");
}

namespace {

// Visits vertices breadth-first from the origin; `step(parent, child)` is
// called once per tree edge.  Unreachable vertices are reported.
template <typename Step>
void bfs_from_origin(const CriticalMap& map, Step&& step) {
  std::vector<bool> seen(map.vertex_count(), false);
  std::deque<VertexId> todo{map.origin()};
  seen[map.origin()] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const VertexId a = todo.front();
    todo.pop_front();
    for (VertexId b : map.neighbors(a)) {
      if (seen[b]) continue;
      seen[b] = true;
      ++reached;
      step(a, b);
      todo.push_back(b);
    }
  }
  if (reached != map.vertex_count())
    throw ValidationError("map is not connected: " + std::to_string(map.vertex_count() - reached) +
                          " vertices unreachable from the origin");
}

}  // namespace

Complex integrate_edge(const VertexFunction& f, VertexId a, VertexId b) {
  const CriticalMap& map = f.map();
  if (!map.are_neighbors(a, b))
    throw ValidationError(std::to_string(a) + " -> " + std::to_string(b) + " is not a rhombus side");
  return 0.5 * (f[a] + f[b]) * (map.z(b) - map.z(a));
}

Complex integrate_path(const VertexFunction& f, const PathRef& path) {
  validate_path(f.map(), path);
  Complex sum{};
  for (std::size_t i = 1; i < path.vertices.size(); ++i)
    sum += integrate_edge(f, path.vertices[i - 1], path.vertices[i]);
  return sum;
}

Complex integrate_lambda_edge(const VertexFunction& f, VertexId a, VertexId b) {
  const CriticalMap& map = f.map();
  const auto q = map.quad_with_diagonal(a, b);
  if (!q) throw ValidationError(std::to_string(a) + " -> " + std::to_string(b) + " is not a quad diagonal");
  const Quad& quad = map.quad(*q);
  const Complex mean = 0.25 * (f[quad.v[0]] + f[quad.v[1]] + f[quad.v[2]] + f[quad.v[3]]);
  return mean * (map.z(b) - map.z(a));
}

VertexFunction bfs_primitive(const VertexFunction& f) {
  std::vector<Complex> F(f.size(), Complex{});
  const CriticalMap& map = f.map();
  bfs_from_origin(map, [&](VertexId a, VertexId b) {
    F[b] = F[a] + 0.5 * (f[a] + f[b]) * (map.z(b) - map.z(a));
  });
  return VertexFunction(f.map_ptr(), std::move(F));
}

double max_edge_defect(const VertexFunction& F, const VertexFunction& f) {
  const CriticalMap& map = f.map();
  double defect = 0.0;
  for (const DiamondEdge& e : map.edges()) {
    const Complex step = 0.5 * (f[e.a] + f[e.b]) * (map.z(e.b) - map.z(e.a));
    defect = std::max(defect, std::abs(F[e.b] - F[e.a] - step));
  }
  return defect;
}

VertexFunction primitive(const VertexFunction& f) {
  VertexFunction F = bfs_primitive(f);
  const HolomorphyCheck check = is_holomorphic(f, kPrimitiveTolerance);
  if (!check.holomorphic) {
    const double loop = max_edge_defect(F, f);
    std::ostringstream msg;
    msg.precision(3);
    msg << "f dZ is not closed (max CR residual " << check.max_residual
        << ", max loop residual " << loop << ")";
    throw NumericalError(msg.str(), loop);
  }
  return F;
}

std::vector<VertexFunction> monomials(const MapPtr& map, int max_k) {
  if (max_k < 0) throw ValidationError("monomial degree must be >= 0");
  std::vector<VertexFunction> out;
  out.reserve(static_cast<std::size_t>(max_k) + 1);
  out.push_back(VertexFunction::constant(map, 1.0));
  for (int k = 1; k <= max_k; ++k) out.push_back(static_cast<double>(k) * bfs_primitive(out.back()));
  return out;
}

VertexFunction monomial(const MapPtr& map, int k) { return std::move(monomials(map, k).back()); }

VertexFunction exp_product(const MapPtr& map, Complex lambda) {
  for (const DiamondEdge& e : map->edges()) {
    const Complex half = 0.5 * lambda * (map->z(e.b) - map->z(e.a));
    for (const Complex den : {1.0 - half, 1.0 + half}) {
      if (std::abs(den) <= kPoleGuard) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "lambda is at a pole of the discrete exponential: edge direction "
            << std::arg((den == 1.0 - half ? 1.0 : -1.0) * (map->z(e.b) - map->z(e.a)))
            << " rad";
        throw NumericalError(msg.str(), std::abs(den));
      }
    }
  }
  std::vector<Complex> values(map->vertex_count(), Complex{});
  values[map->origin()] = 1.0;
  bfs_from_origin(*map, [&](VertexId a, VertexId b) {
    const Complex half = 0.5 * lambda * (map->z(b) - map->z(a));
    values[b] = values[a] * (1.0 + half) / (1.0 - half);
  });
  return VertexFunction(map, std::move(values));
}

VertexFunction exp_infinity(const MapPtr& map) {
  VertexFunction e = epsilon(map);
  if (map->color(map->origin()) == Color::GammaStar) e *= -1.0;
  return e;
}

SeriesResult exp_series_partial(const MapPtr& map, Complex lambda, int terms) {
  if (terms < 0) throw ValidationError("series length must be >= 0");
  VertexFunction term = VertexFunction::constant(map, 1.0);
  VertexFunction sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = lambda * bfs_primitive(term);
    sum += term;
  }
  SeriesResult result{std::move(sum), std::nullopt};
  if (std::abs(lambda) >= 2.0 / map->delta())
    result.warning = "|lambda| >= 2/delta: the discrete exponential series need not converge";
  return result;
}

Complex dual_exp_parameter(const CriticalMap& map, Complex lambda) {
  if (lambda == Complex{}) throw ValidationError("dual of the lambda = 0 exponential is exp_infinity");
  return 4.0 / (map.delta() * map.delta() * std::conj(lambda));
}

VertexFunction dual(const VertexFunction& f) {
  std::vector<Complex> values(f.size());
  const CriticalMap& map = f.map();
  for (VertexId v = 0; v < f.size(); ++v)
    values[v] = (map.color(v) == Color::Gamma ? 1.0 : -1.0) * std::conj(f[v]);
  return VertexFunction(f.map_ptr(), std::move(values));
}

Complex face_mean_lambda(const VertexFunction& f) {
  const CriticalMap& map = f.map();
  const VertexId o = map.origin();
  const auto quads = map.incident_quads(o);
  if (quads.empty()) throw ValidationError("the origin belongs to no quad");
  Complex weighted{};
  double weights = 0.0;
  for (QuadId qi : quads) {
    const Quad& q = map.quad(qi);
    const int c = map.corner_of(qi, o);
    const double rho = (c % 2 == 0) ? q.rho_gamma : q.rho_star;
    const VertexId prev = q.v[(c + 1) % 4];
    const VertexId next = q.v[(c + 3) % 4];
    weighted += rho * (f[next] - f[prev]) / (map.z(next) - map.z(prev));
    weights += rho;
  }
  return weighted / weights;
}

VertexFunction derive_duffin(const VertexFunction& f) {
  const HolomorphyCheck check = is_holomorphic(f, kPrimitiveTolerance);
  if (!check.holomorphic)
    throw NumericalError("derive_duffin needs a holomorphic function", check.max_residual);
  const CriticalMap& map = f.map();
  const double delta = map.delta();
  const Complex mean = face_mean_lambda(f);

  VertexFunction fprime = dual(bfs_primitive(dual(f)));
  fprime *= 4.0 / (delta * delta);
  const double origin_sign = map.color(map.origin()) == Color::Gamma ? 1.0 : -1.0;
  fprime += (mean * origin_sign) * epsilon(f.map_ptr());
  return fprime;
}

double derivative_edge_defect(const VertexFunction& f, const VertexFunction& fprime) {
  const CriticalMap& map = f.map();
  double defect = 0.0;
  for (const DiamondEdge& e : map.edges()) {
    const Complex rhs = 0.5 * (fprime[e.a] + fprime[e.b]) * (map.z(e.b) - map.z(e.a));
    defect = std::max(defect, std::abs(f[e.b] - f[e.a] - rhs));
  }
  return defect;
}

FaceFunction face_derivative(const VertexFunction& f) {
  const CriticalMap& map = f.map();
  const double tol = kFaceDerivativeTolerance * f.scale();
  std::vector<Complex> values(map.quad_count());
  for (QuadId qi = 0; qi < map.quad_count(); ++qi) {
    const Quad& q = map.quad(qi);
    const Complex along_gamma = (f[q.xp()] - f[q.x()]) / (map.z(q.xp()) - map.z(q.x()));
    const Complex along_star = (f[q.yp()] - f[q.y()]) / (map.z(q.yp()) - map.z(q.y()));
    const double gap = std::abs(along_gamma - along_star);
    if (gap > tol) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "diagonal difference quotients disagree on quad " << qi << " by " << gap;
      throw NumericalError(msg.str(), gap);
    }
    values[qi] = along_gamma;
  }
  return FaceFunction(f.map_ptr(), std::move(values));
}

Complex morera_residual(const FaceFunction& a, VertexId v) {
  const CriticalMap& map = a.map();
  if (v >= map.vertex_count()) throw ValidationError("unknown vertex " + std::to_string(v));
  if (map.is_boundary_vertex(v))
    throw ValidationError("vertex " + std::to_string(v) + " is on the boundary");
  Complex sum{};
  for (QuadId qi : map.incident_quads(v)) {
    const Quad& q = map.quad(qi);
    const int c = map.corner_of(qi, v);
    const VertexId from = q.v[(c + 1) % 4];
    const VertexId to = q.v[(c + 3) % 4];
    sum += a[qi] * (map.z(to) - map.z(from));
  }
  return sum;
}

}  // namespace dch
