#include <doctest.h>

#include <cmath>

#include "dch/holomorphy.hpp"

using namespace dch;

namespace {

VertexFunction conj_embedding(const MapPtr& map) {
  std::vector<Complex> v;
  for (const Vertex& x : map->vertices()) v.push_back(std::conj(x.z));
  return VertexFunction(map, v);
}

}  // namespace

TEST_CASE("cr residual on a single rhombus") {
  const double theta = 0.5;
  const MapPtr map = build_rect_lattice(1.0, theta, 1, 1);
  const Quad& q = map->quad(0);
  // Oracle: f = conj(Z) gives conj(y' - y) - i rho conj(x' - x).
  const VertexFunction f = conj_embedding(map);
  const Complex dy = map->z(q.yp()) - map->z(q.y());
  const Complex dx = map->z(q.xp()) - map->z(q.x());
  const Complex expected = std::conj(dy) - kI * (std::abs(dy) / std::abs(dx)) * std::conj(dx);
  CHECK(std::abs(cr_residual(f, 0) - expected) < 1e-15);
  CHECK(std::abs(cr_residual(VertexFunction::embedding(map), 0)) < 1e-15);
}

TEST_CASE("holomorphy of simple functions") {
  const MapPtr map = build_rect_lattice(0.5, 1.0, 4, 3, lattice_point(0.5, 1.0, 1, 2));
  CHECK(is_holomorphic(VertexFunction::constant(map, {2, -1}), 1e-12).holomorphic);
  CHECK(is_holomorphic(VertexFunction::embedding(map), 1e-12).holomorphic);
  CHECK(is_holomorphic(epsilon(map), 1e-12).holomorphic);
  const HolomorphyCheck bar = is_holomorphic(conj_embedding(map), 1e-9);
  CHECK_FALSE(bar.holomorphic);
  CHECK(bar.max_residual > 0.1);
}

TEST_CASE("tolerance is relative to max(1, |f|)") {
  const MapPtr map = build_chain(3);
  VertexFunction tiny = conj_embedding(map);
  tiny *= 1e-11;
  const HolomorphyCheck c = is_holomorphic(tiny, 1e-9);
  CHECK(c.scale == 1.0);
  CHECK(c.holomorphic);
  VertexFunction big = conj_embedding(map);
  big *= 1e6;
  CHECK(is_holomorphic(big, 1e-9).scale == doctest::Approx(1e6 * std::sqrt(1.0 + 1.0 / 9)));
}

TEST_CASE("epsilon") {
  const MapPtr map = build_chain(2);
  const VertexFunction e = epsilon(map);
  for (VertexId v = 0; v < map->vertex_count(); ++v)
    CHECK(e[v] == (map->color(v) == Color::Gamma ? 1.0 : -1.0));
}

TEST_CASE("dimension of the solution space") {
  SUBCASE("single quad") {
    const DimensionCount d = dimension_of_solution_space(*build_rect_lattice(1.0, 0.7, 1, 1));
    CHECK(d.boundary_points == 4);
    CHECK(d.expected == 3);
    CHECK(d.nullity == 3);
    CHECK(d.rank == 1);
  }
  SUBCASE("chains") {
    for (int n = 1; n <= 6; ++n) {
      const DimensionCount d = dimension_of_solution_space(*build_chain(n));
      CHECK(d.nullity == static_cast<std::size_t>(n + 2));
    }
  }
  SUBCASE("rectangle") {
    const DimensionCount d = dimension_of_solution_space(*build_rect_lattice(1.0, 0.9, 3, 5));
    CHECK(d.boundary_points == 16);
    CHECK(d.nullity == 9);
  }
}

TEST_CASE("boundary parametrization") {
  const MapPtr map = build_rect_lattice(1.0, kPi / 4, 3, 3, lattice_point(1.0, kPi / 4, 1, 1));
  const auto ids = boundary_parameter_vertices(*map);
  std::size_t star = 0;
  bool origin_included = false;
  for (VertexId v : ids) {
    if (v == map->origin()) origin_included = true;
    else CHECK(map->color(v) == Color::GammaStar);
    if (map->color(v) == Color::GammaStar) ++star;
  }
  CHECK(origin_included);
  CHECK(ids.size() == map->boundary_size() / 2 + 1);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("solve_boundary reconstructs holomorphic functions") {
  const MapPtr map = build_rect_lattice(0.25, 1.1, 5, 4, lattice_point(0.25, 1.1, 2, 2));
  const VertexFunction z = VertexFunction::embedding(map);
  const VertexFunction back = solve_boundary(map, restrict_to_boundary(z));
  CHECK(sup_distance(back, z) < 1e-12);

  const VertexFunction r1 = random_holomorphic(map, 42);
  const VertexFunction r2 = random_holomorphic(map, 42);
  CHECK(sup_distance(r1, r2) == 0.0);
  CHECK(sup_distance(r1, random_holomorphic(map, 43)) > 0.0);
  CHECK(is_holomorphic(r1, 1e-10).holomorphic);
}

TEST_CASE("solve_boundary errors") {
  const MapPtr map = build_chain(3);
  BoundarySpec spec = restrict_to_boundary(VertexFunction::embedding(map));
  BoundarySpec missing = spec;
  missing.erase(missing.begin());
  CHECK_THROWS_AS(solve_boundary(map, missing), ValidationError);
  BoundarySpec extra = spec;
  for (VertexId v = 0; v < map->vertex_count(); ++v)
    if (!extra.count(v)) {
      extra[v] = 0.0;
      break;
    }
  CHECK_THROWS_AS(solve_boundary(map, extra), ValidationError);
}

TEST_CASE("overdetermined data falls back to least squares") {
  const MapPtr map = build_rect_lattice(1.0, kPi / 4, 2, 2);
  BoundarySpec all;
  for (VertexId v = 0; v < map->vertex_count(); ++v) all[v] = std::conj(map->z(v));
  const ConstrainedSolution s = solve_constrained(map, all);
  CHECK(s.least_squares);
  CHECK(s.residual > 1e-3);
  BoundarySpec consistent;
  for (VertexId v = 0; v < map->vertex_count(); ++v) consistent[v] = map->z(v);
  CHECK(solve_constrained(map, consistent).residual < 1e-12);
  BoundarySpec bad{{99, 1.0}};
  CHECK_THROWS_AS(solve_constrained(map, bad), ValidationError);
}
