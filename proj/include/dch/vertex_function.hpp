#pragma once

#include <span>
#include <vector>

#include "dch/lattice.hpp"

namespace dch {

/// One complex value per vertex of a critical map.
class VertexFunction {
 public:
  VertexFunction(MapPtr map, std::vector<Complex> values);

  static VertexFunction constant(MapPtr map, Complex c);
  /// The embedding Z itself.
  static VertexFunction embedding(MapPtr map);

  const CriticalMap& map() const { return *map_; }
  const MapPtr& map_ptr() const { return map_; }

  std::size_t size() const { return values_.size(); }
  std::span<const Complex> values() const { return values_; }
  Complex operator[](VertexId v) const { return values_[v]; }
  Complex& operator[](VertexId v) { return values_[v]; }

  double sup_norm() const;
  /// max(1, sup_norm): the scale used by relative tolerances.
  double scale() const;

  VertexFunction& operator+=(const VertexFunction& other);
  VertexFunction& operator-=(const VertexFunction& other);
  VertexFunction& operator*=(Complex c);
  /// Pointwise product (not holomorphic in general).
  VertexFunction& operator*=(const VertexFunction& other);

 private:
  void require_same_map(const VertexFunction& other) const;

  MapPtr map_;
  std::vector<Complex> values_;
};

VertexFunction operator+(VertexFunction a, const VertexFunction& b);
VertexFunction operator-(VertexFunction a, const VertexFunction& b);
VertexFunction operator*(VertexFunction a, Complex c);
VertexFunction operator*(Complex c, VertexFunction a);
VertexFunction operator*(VertexFunction a, const VertexFunction& b);

/// max_v |f(v) - g(v)|.
double sup_distance(const VertexFunction& f, const VertexFunction& g);

}  // namespace dch
