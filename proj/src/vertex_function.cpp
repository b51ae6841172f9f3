#include "dch/vertex_function.hpp"

#include <algorithm>
#include <cmath>

namespace dch {

VertexFunction::VertexFunction(MapPtr map, std::vector<Complex> values)
    : map_(std::move(map)), values_(std::move(values)) {
  if (!map_) throw ValidationError("vertex function without a map");
  if (values_.size() != map_->vertex_count())
    throw ValidationError("vertex function has " + std::to_string(values_.size()) +
                          " values for " + std::to_string(map_->vertex_count()) + " vertices");
}

VertexFunction VertexFunction::constant(MapPtr map, Complex c) {
  const std::size_t n = map->vertex_count();
  return VertexFunction(std::move(map), std::vector<Complex>(n, c));
}

VertexFunction VertexFunction::embedding(MapPtr map) {
  std::vector<Complex> z;
  z.reserve(map->vertex_count());
  for (const Vertex& v : map->vertices()) z.push_back(v.z);
  return VertexFunction(std::move(map), std::move(z));
}

double VertexFunction::sup_norm() const {
  double m = 0.0;
  for (const Complex& c : values_) m = std::max(m, std::abs(c));
  return m;
}

double VertexFunction::scale() const { return std::max(1.0, sup_norm()); }

void VertexFunction::require_same_map(const VertexFunction& other) const {
  if (map_ != other.map_)
    throw ValidationError("vertex functions live on different maps");
}

VertexFunction& VertexFunction::operator+=(const VertexFunction& other) {
  require_same_map(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

VertexFunction& VertexFunction::operator-=(const VertexFunction& other) {
  require_same_map(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

VertexFunction& VertexFunction::operator*=(Complex c) {
  for (Complex& v : values_) v *= c;
  return *this;
}

VertexFunction& VertexFunction::operator*=(const VertexFunction& other) {
  require_same_map(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

VertexFunction operator+(VertexFunction a, const VertexFunction& b) { return a += b; }
VertexFunction operator-(VertexFunction a, const VertexFunction& b) { return a -= b; }
VertexFunction operator*(VertexFunction a, Complex c) { return a *= c; }
VertexFunction operator*(Complex c, VertexFunction a) { return a *= c; }
VertexFunction operator*(VertexFunction a, const VertexFunction& b) { return a *= b; }

double sup_distance(const VertexFunction& f, const VertexFunction& g) {
  if (f.size() != g.size()) throw ValidationError("vertex functions live on different maps");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f.values()[i] - g.values()[i]));
  return m;
}

}  // namespace dch
