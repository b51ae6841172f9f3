#include <doctest.h>

#include <cmath>
#include <random>

#include "dch/basis.hpp"
#include "dch/calculus.hpp"

using namespace dch;

namespace {

constexpr int kTrials = 200;

struct Sample {
  MapPtr map;
  double theta;
};

Sample random_map(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(kPi / 12, 5 * kPi / 12), dl(0.05, 1.0);
  std::uniform_int_distribution<int> size(1, 5);
  const double theta = th(rng), delta = dl(rng);
  const int rows = size(rng), cols = size(rng);
  std::uniform_int_distribution<int> om(0, cols), on(0, rows);
  return {build_rect_lattice(delta, theta, rows, cols, lattice_point(delta, theta, om(rng), on(rng))), theta};
}

Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

PathRef random_walk(const CriticalMap& map, VertexId start, int steps, std::mt19937_64& rng) {
  PathRef p{{start}};
  for (int s = 0; s < steps; ++s) {
    const auto& nb = map.neighbors(p.vertices.back());
    p.vertices.push_back(nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)]);
  }
  return p;
}

}  // namespace

TEST_CASE("holomorphic functions form a linear space closed under duality") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const VertexFunction f = random_holomorphic(map, rng());
    const VertexFunction g = random_holomorphic(map, rng());
    const VertexFunction h = random_complex(rng) * f + random_complex(rng) * g;
    CHECK(is_holomorphic(h, 1e-9).holomorphic);
    CHECK(is_holomorphic(dual(f), 1e-9).holomorphic);
    CHECK(sup_distance(dual(dual(f)), f) == 0.0);
  }
}

TEST_CASE("integrals of holomorphic functions are path independent") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const VertexFunction f = random_holomorphic(map, rng());
    const double tol = 1e-10 * std::max(1.0, f.sup_norm());
    const PathRef p = random_walk(*map, map->origin(), 12, rng);
    PathRef back{{p.vertices.rbegin(), p.vertices.rend()}};
    CHECK(std::abs(integrate_path(f, p) + integrate_path(f, back)) <= tol);
    const VertexFunction F = primitive(f);
    CHECK(std::abs(integrate_path(f, p) - (F[p.vertices.back()] - F[p.vertices.front()])) <= tol * 10);
  }
}

TEST_CASE("primitives agree with the edge relation and kill epsilon") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const VertexFunction f = random_holomorphic(map, rng());
    CHECK(max_edge_defect(primitive(f), f) <= 1e-10 * std::max(1.0, f.sup_norm()));
    CHECK(primitive(epsilon(map)).sup_norm() == 0.0);
  }
}

TEST_CASE("derivatives of exponentials and monomials differ by epsilon") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    std::uniform_real_distribution<double> r(0.0, 1.0 / map->delta()), arg(0.0, 2 * kPi);
    const Complex lambda = std::polar(r(rng), arg(rng));
    const VertexFunction e = exp_product(map, lambda);
    const VertexFunction ge = derive_duffin(e) - lambda * e;
    const double tol = 1e-10 * std::max(1.0, e.sup_norm());
    CHECK(sup_distance(ge, ge[map->origin()] * epsilon(map)) <= tol);

    const int k = 1 + t % 6;
    const auto zs = monomials(map, k);
    const VertexFunction gz = derive_duffin(zs[k]) - double(k) * zs[k - 1];
    CHECK(sup_distance(gz, gz[map->origin()] * epsilon(map)) <= 1e-10 * std::max(1.0, zs[k].sup_norm()));
  }
}

TEST_CASE("monomials on random maps") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const auto zs = monomials(map, 4);
    const Complex o = map->z(map->origin());
    for (VertexId v = 0; v < map->vertex_count(); ++v) {
      const Complex x = map->z(v) - o;
      CHECK(std::abs(zs[1][v] - x) < 1e-14);
      CHECK(std::abs(zs[2][v] - x * x) < 1e-13);
    }
    for (VertexId nb : map->neighbors(map->origin())) {
      const Complex x = map->z(nb) - o;
      CHECK(std::abs(zs[3][nb] - 1.5 * x * x * x) < 1e-13);
      CHECK(std::abs(zs[4][nb] - 3.0 * std::pow(x, 4)) < 1e-13);
    }
    for (int k = 0; k <= 4; ++k) CHECK(is_holomorphic(zs[k], 1e-10).holomorphic);
  }
}

TEST_CASE("solution space dimension is half the boundary plus one") {
  std::mt19937_64 rng(16);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const DimensionCount d = dimension_of_solution_space(*map);
    CHECK(d.nullity == d.expected);
    CHECK(d.expected == map->boundary_size() / 2 + 1);
  }
}

TEST_CASE("B polynomial identities") {
  const auto rec = b_polynomials_recursive(12);
  for (int k = 0; k <= 12; ++k) {
    CHECK(rec[k].coefficient_sum() == 1);
    CHECK(rec[k] == b_polynomial(k));
  }
}

TEST_CASE("Morera on face derivatives") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < kTrials; ++t) {
    const auto [map, theta] = random_map(rng);
    const VertexFunction f = random_holomorphic(map, rng());
    const FaceFunction a = face_derivative(f);
    for (VertexId v = 0; v < map->vertex_count(); ++v)
      if (!map->is_boundary_vertex(v))
        CHECK(std::abs(morera_residual(a, v)) <= 1e-9 * std::max(1.0, f.sup_norm()) / map->delta());
  }
}
