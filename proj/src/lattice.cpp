#include "dch/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace dch {

namespace {

double signed_area(const std::vector<Vertex>& vs, const std::array<VertexId, 4>& q) {
  double area = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Complex a = vs[q[i]].z;
    const Complex b = vs[q[(i + 1) % 4]].z;
    area += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * area;
}

// Half of the interior angle at corner i.
double half_angle(const CriticalMap& map, const Quad& q, int i) {
  const Complex c = map.z(q.v[i]);
  const Complex prev = map.z(q.v[(i + 3) % 4]) - c;
  const Complex next = map.z(q.v[(i + 1) % 4]) - c;
  const double cross = prev.real() * next.imag() - prev.imag() * next.real();
  const double dot = prev.real() * next.real() + prev.imag() * next.imag();
  return 0.5 * std::atan2(std::abs(cross), dot);
}

std::string quad_label(QuadId q) { return "quad " + std::to_string(q); }

}  // namespace

CriticalMap::CriticalMap(double delta, std::vector<Vertex> vertices,
                         std::vector<std::array<VertexId, 4>> quads, VertexId origin,
                         std::vector<std::array<double, 2>> rho)
    : delta_(delta), vertices_(std::move(vertices)), origin_(origin) {
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    throw ValidationError("delta must be a positive finite number");
  if (vertices_.empty()) throw ValidationError("map has no vertices");
  if (origin_ >= vertices_.size())
    throw ValidationError("origin " + std::to_string(origin_) + " is not a vertex");
  if (!rho.empty() && rho.size() != quads.size())
    throw ValidationError("rho table size does not match quad count");

  const auto n = static_cast<VertexId>(vertices_.size());
  quads_.reserve(quads.size());
  for (std::size_t qi = 0; qi < quads.size(); ++qi) {
    auto ids = quads[qi];
    for (VertexId id : ids)
      if (id >= n)
        throw ValidationError(quad_label(qi) + " references unknown vertex " +
                              std::to_string(id));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (ids[i] == ids[j])
          throw ValidationError(quad_label(qi) + " repeats vertex " + std::to_string(ids[i]));

    // Rotate so that the first corner is in Gamma.
    if (vertices_[ids[0]].color != Color::Gamma) std::rotate(ids.begin(), ids.begin() + 1, ids.end());
    for (int i = 0; i < 4; ++i) {
      const Color expected = (i % 2 == 0) ? Color::Gamma : Color::GammaStar;
      if (vertices_[ids[i]].color != expected)
        throw ValidationError(quad_label(qi) + " does not alternate Gamma / Gamma* colors");
    }
    if (signed_area(vertices_, ids) < 0.0) std::swap(ids[1], ids[3]);

    Quad q;
    q.v = ids;
    if (rho.empty()) {
      const double dg = std::abs(vertices_[ids[2]].z - vertices_[ids[0]].z);
      const double ds = std::abs(vertices_[ids[3]].z - vertices_[ids[1]].z);
      q.rho_gamma = ds / dg;
      q.rho_star = dg / ds;
    } else {
      q.rho_gamma = rho[qi][0];
      q.rho_star = rho[qi][1];
    }
    quads_.push_back(q);
  }

  neighbors_.assign(n, {});
  incident_.assign(n, {});
  boundary_.assign(n, false);

  std::map<std::pair<VertexId, VertexId>, std::size_t> edge_index;
  for (QuadId qi = 0; qi < quads_.size(); ++qi) {
    const Quad& q = quads_[qi];
    for (int i = 0; i < 4; ++i) {
      incident_[q.v[i]].push_back(qi);
      VertexId a = q.v[i];
      VertexId b = q.v[(i + 1) % 4];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.try_emplace({a, b}, edges_.size());
      if (inserted) {
        edges_.push_back(DiamondEdge{a, b, {}, 0});
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
      }
      DiamondEdge& e = edges_[it->second];
      if (e.quad_count < 2) e.quads[e.quad_count] = qi;
      if (e.quad_count < std::numeric_limits<std::uint8_t>::max()) ++e.quad_count;
    }
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
  for (auto& inc : incident_) {
    std::sort(inc.begin(), inc.end());
    inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
  }
  for (const DiamondEdge& e : edges_) {
    if (e.quad_count == 1) {
      boundary_[e.a] = true;
      boundary_[e.b] = true;
    }
  }

  eta_ = quads_.empty() ? 0.0 : kPi;
  for (const Quad& q : quads_)
    for (int i = 0; i < 4; ++i) eta_ = std::min(eta_, half_angle(*this, q, i));
}

const Quad& CriticalMap::quad(QuadId q) const {
  if (q >= quads_.size()) throw ValidationError("unknown quad " + std::to_string(q));
  return quads_[q];
}

std::span<const VertexId> CriticalMap::neighbors(VertexId v) const {
  return neighbors_.at(v);
}

std::span<const QuadId> CriticalMap::incident_quads(VertexId v) const {
  return incident_.at(v);
}

bool CriticalMap::are_neighbors(VertexId a, VertexId b) const {
  if (a >= vertices_.size() || b >= vertices_.size()) return false;
  const auto& nb = neighbors_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::optional<QuadId> CriticalMap::quad_with_diagonal(VertexId a, VertexId b) const {
  if (a >= vertices_.size() || b >= vertices_.size()) return std::nullopt;
  for (QuadId qi : incident_[a]) {
    const int c = corner_of(qi, a);
    if (quads_[qi].v[(c + 2) % 4] == b) return qi;
  }
  return std::nullopt;
}

std::vector<VertexId> CriticalMap::boundary_vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < vertices_.size(); ++v)
    if (boundary_[v]) out.push_back(v);
  return out;
}

std::size_t CriticalMap::boundary_size() const {
  return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), true));
}

int CriticalMap::corner_of(QuadId q, VertexId v) const {
  const Quad& quad = this->quad(q);
  for (int i = 0; i < 4; ++i)
    if (quad.v[i] == v) return i;
  throw ValidationError("vertex " + std::to_string(v) + " is not a corner of " + quad_label(q));
}

void validate_path(const CriticalMap& map, const PathRef& path) {
  for (VertexId v : path.vertices)
    if (v >= map.vertex_count())
      throw ValidationError("path references unknown vertex " + std::to_string(v));
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    if (!map.are_neighbors(path.vertices[i - 1], path.vertices[i]))
      throw ValidationError("path step " + std::to_string(path.vertices[i - 1]) + " -> " +
                            std::to_string(path.vertices[i]) + " is not a rhombus side");
  }
}

Complex lattice_point(double delta, double theta, long m, long n) {
  const Complex up = std::polar(1.0, theta);
  const Complex down = std::polar(1.0, -theta);
  return delta * (static_cast<double>(m) * up + static_cast<double>(n) * down);
}

MapPtr build_rect_lattice(double delta, double theta, int rows, int cols, Complex origin_at) {
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  if (!(theta > 0.0 && theta < kPi / 2)) throw ValidationError("theta must lie in (0, pi/2)");
  if (rows < 1 || cols < 1) throw ValidationError("rows and cols must be >= 1");

  const auto id_of = [cols](int m, int n) {
    return static_cast<VertexId>(n * (cols + 1) + m);
  };

  // Locate the origin in lattice coordinates first; colors are relative to it.
  int om = -1, on = -1;
  double best = std::numeric_limits<double>::infinity();
  int bm = 0, bn = 0;
  for (int n = 0; n <= rows; ++n)
    for (int m = 0; m <= cols; ++m) {
      const double d = std::abs(lattice_point(delta, theta, m, n) - origin_at);
      if (d < best) {
        best = d;
        bm = m;
        bn = n;
      }
    }
  if (best <= 1e-9 * delta) {
    om = bm;
    on = bn;
  } else {
    const Complex p = lattice_point(delta, theta, bm, bn);
    std::ostringstream msg;
    msg.precision(17);
    msg << "origin (" << origin_at.real() << ", " << origin_at.imag()
        << ") is not a lattice vertex; nearest vertex is id " << id_of(bm, bn) << " at ("
        << p.real() << ", " << p.imag() << ")";
    throw ValidationError(msg.str());
  }

  std::vector<Vertex> vertices;
  vertices.reserve(static_cast<std::size_t>(rows + 1) * (cols + 1));
  for (int n = 0; n <= rows; ++n)
    for (int m = 0; m <= cols; ++m) {
      const bool even = ((m - om) + (n - on)) % 2 == 0;
      vertices.push_back({lattice_point(delta, theta, m, n), even ? Color::Gamma : Color::GammaStar});
    }

  std::vector<std::array<VertexId, 4>> quads;
  quads.reserve(static_cast<std::size_t>(rows) * cols);
  for (int n = 0; n < rows; ++n)
    for (int m = 0; m < cols; ++m)
      quads.push_back({id_of(m, n), id_of(m + 1, n), id_of(m + 1, n + 1), id_of(m, n + 1)});

  return std::make_shared<const CriticalMap>(delta, std::move(vertices), std::move(quads),
                                             id_of(om, on));
}

MapPtr build_chain(int n) {
  if (n < 1) throw ValidationError("chain length must be >= 1");
  const double h = 1.0 / n;
  const auto bottom = [](int l) { return static_cast<VertexId>(l); };
  const auto top = [n](int l) { return static_cast<VertexId>(n + 1 + l); };

  std::vector<Vertex> vertices(2 * static_cast<std::size_t>(n + 1));
  for (int l = 0; l <= n; ++l) {
    const double x = static_cast<double>(l) / n;
    vertices[bottom(l)] = {Complex{x, 0.0}, l % 2 == 0 ? Color::Gamma : Color::GammaStar};
    vertices[top(l)] = {Complex{x, h}, l % 2 == 0 ? Color::GammaStar : Color::Gamma};
  }
  std::vector<std::array<VertexId, 4>> quads;
  for (int l = 0; l < n; ++l) quads.push_back({bottom(l), bottom(l + 1), top(l + 1), top(l)});
  return std::make_shared<const CriticalMap>(h, std::move(vertices), std::move(quads), bottom(0));
}

std::optional<VertexId> find_vertex(const CriticalMap& map, Complex z, double tol) {
  std::optional<VertexId> best;
  double best_d = tol * map.delta();
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    const double d = std::abs(map.z(v) - z);
    if (d <= best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

ValidationReport validate_criticality(const CriticalMap& map) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string where, double measured, std::string detail) {
    report.violations.push_back({std::move(kind), std::move(where), measured, std::move(detail)});
  };

  const double delta = map.delta();
  const double side_tol = kCriticalityTolerance * delta;
  for (QuadId qi = 0; qi < map.quad_count(); ++qi) {
    const Quad& q = map.quad(qi);
    for (int i = 0; i < 4; ++i) {
      const double len = std::abs(map.z(q.v[(i + 1) % 4]) - map.z(q.v[i]));
      if (!(std::abs(len - delta) <= side_tol))
        add("side", quad_label(qi) + " side " + std::to_string(q.v[i]) + "-" +
                        std::to_string(q.v[(i + 1) % 4]),
            len, "side length differs from delta");
    }

    std::array<VertexId, 4> ids = q.v;
    double area = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Complex a = map.z(ids[i]);
      const Complex b = map.z(ids[(i + 1) % 4]);
      area += 0.5 * (a.real() * b.imag() - b.real() * a.imag());
    }
    if (!(area > 0.0)) add("orientation", quad_label(qi), area, "quad is degenerate");

    const Complex dg = map.z(q.xp()) - map.z(q.x());
    const Complex ds = map.z(q.yp()) - map.z(q.y());
    const Complex w = ds / (kI * dg);
    if (!std::isfinite(std::abs(w)) || !(w.real() > 0.0) ||
        std::abs(w.imag()) > 1e-11 * std::abs(w))
      add("diagonal", quad_label(qi), std::arg(w),
          "(y' - y) is not a positive multiple of i (x' - x)");

    const double geometric = std::abs(ds) / std::abs(dg);
    if (!(q.rho_gamma > 0.0) || !std::isfinite(q.rho_gamma) || !(q.rho_star > 0.0) ||
        !std::isfinite(q.rho_star)) {
      add("rho", quad_label(qi), q.rho_gamma, "rho must be finite and positive");
    } else {
      if (std::abs(q.rho_gamma * q.rho_star - 1.0) > kCriticalityTolerance)
        add("duality", quad_label(qi), q.rho_gamma * q.rho_star, "rho(e) * rho(e*) != 1");
      if (std::abs(q.rho_gamma - geometric) > kCriticalityTolerance * geometric)
        add("rho", quad_label(qi), q.rho_gamma, "rho(x, x') differs from the diagonal ratio");
    }

    double min_half = kPi;
    for (int i = 0; i < 4; ++i) min_half = std::min(min_half, half_angle(map, q, i));
    if (!(min_half > 1e-9)) add("collapse", quad_label(qi), min_half, "lozenge angle collapses");
  }

  // Combinatorics: every side on one or two quads, traversed oppositely.
  std::map<std::pair<VertexId, VertexId>, int> direction;
  for (QuadId qi = 0; qi < map.quad_count(); ++qi) {
    const Quad& q = map.quad(qi);
    for (int i = 0; i < 4; ++i) ++direction[{q.v[i], q.v[(i + 1) % 4]}];
  }
  for (const DiamondEdge& e : map.edges()) {
    const std::string where = "edge " + std::to_string(e.a) + "-" + std::to_string(e.b);
    if (e.quad_count > 2) {
      add("manifold", where, e.quad_count, "side shared by more than two quads");
      continue;
    }
    if (e.quad_count == 2 && (direction[{e.a, e.b}] != 1 || direction[{e.b, e.a}] != 1))
      add("orientation", where, 0.0, "adjacent quads are not consistently oriented");
  }

  for (VertexId v = 0; v < map.vertex_count(); ++v)
    if (map.incident_quads(v).empty())
      add("isolated", "vertex " + std::to_string(v), 0.0, "vertex belongs to no quad");

  if (map.quad_count() > 0) {
    std::vector<bool> seen(map.quad_count(), false);
    std::queue<QuadId> todo;
    todo.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!todo.empty()) {
      const QuadId q = todo.front();
      todo.pop();
      const Quad& quad = map.quad(q);
      for (int i = 0; i < 4; ++i) {
        const VertexId a = quad.v[i];
        const VertexId b = quad.v[(i + 1) % 4];
        for (QuadId other : map.incident_quads(a)) {
          if (seen[other]) continue;
          const auto& ov = map.quad(other).v;
          if (std::find(ov.begin(), ov.end(), b) != ov.end()) {
            seen[other] = true;
            ++reached;
            todo.push(other);
          }
        }
      }
    }
    if (reached != map.quad_count())
      add("connectivity", "map", static_cast<double>(reached), "quad adjacency graph is disconnected");

    const long chi = static_cast<long>(map.vertex_count()) - static_cast<long>(map.edges().size()) +
                     static_cast<long>(map.quad_count());
    if (chi != 1)
      add("topology", "map", static_cast<double>(chi), "Euler characteristic != 1 (not a disc)");
  } else {
    add("empty", "map", 0.0, "map has no quads");
  }

  return report;
}

std::string to_string(const Violation& v) {
  std::ostringstream out;
  out.precision(17);
  out << v.kind << ": " << v.where << ": " << v.detail << " (measured " << v.measured << ")";
  return out.str();
}

}  // namespace dch
