#include "dch/map_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dch {

using nlohmann::json;

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

VertexId parse_id(std::string_view text, std::size_t limit, const char* what) {
  long long id = -1;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), id);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || id < 0 ||
      static_cast<unsigned long long>(id) >= limit)
    throw ValidationError(std::string("bad ") + what + " '" + std::string(text) + "'");
  return static_cast<VertexId>(id);
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
    throw ValidationError("not a number: '" + std::string(text) + "'");
  return x;
}

Complex parse_complex(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ValidationError("empty complex number");
  if (const auto comma = text.find(','); comma != std::string_view::npos)
    return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
  if (text.back() != 'i' && text.back() != 'j') return {parse_double(text), 0.0};
  std::string_view body = text.substr(0, text.size() - 1);
  // The imaginary part starts at the last sign that is not an exponent sign.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  auto imag_of = [](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s);
  };
  if (split_at == std::string_view::npos) return {0.0, imag_of(body)};
  return {parse_double(body.substr(0, split_at)), imag_of(body.substr(split_at))};
}

std::string map_to_json(const CriticalMap& map) {
  // Built by hand so that doubles keep 17 significant digits.
  std::ostringstream out;
  out << "{\"delta\": " << format_double(map.delta()) << ", \"origin\": " << map.origin()
      << ", \"vertices\": [";
  for (VertexId v = 0; v < map.vertex_count(); ++v) {
    if (v) out << ", ";
    out << "{\"id\": " << v << ", \"z\": [" << format_double(map.z(v).real()) << ", "
        << format_double(map.z(v).imag()) << "], \"color\": \""
        << (map.color(v) == Color::Gamma ? "gamma" : "gamma_star") << "\"}";
  }
  out << "], \"quads\": [";
  bool custom_rho = false;
  for (QuadId qi = 0; qi < map.quad_count(); ++qi) {
    const Quad& q = map.quad(qi);
    if (qi) out << ", ";
    out << '[' << q.v[0] << ", " << q.v[1] << ", " << q.v[2] << ", " << q.v[3] << ']';
    const double geometric =
        std::abs(map.z(q.yp()) - map.z(q.y())) / std::abs(map.z(q.xp()) - map.z(q.x()));
    if (q.rho_gamma != geometric) custom_rho = true;
  }
  out << ']';
  if (custom_rho) {
    out << ", \"rho\": [";
    for (QuadId qi = 0; qi < map.quad_count(); ++qi) {
      if (qi) out << ", ";
      out << '[' << format_double(map.quad(qi).rho_gamma) << ", "
          << format_double(map.quad(qi).rho_star) << ']';
    }
    out << ']';
  }
  out << "}\n";
  return out.str();
}

MapPtr map_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("map file is not valid JSON: ") + e.what());
  }
  try {
    const double delta = doc.at("delta").get<double>();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be positive");
    const auto& vs = doc.at("vertices");
    std::vector<Vertex> vertices(vs.size());
    std::vector<bool> seen(vs.size(), false);
    for (const auto& v : vs) {
      const long long id = v.at("id").get<long long>();
      if (id < 0 || static_cast<std::size_t>(id) >= vs.size() || seen[id])
        throw ValidationError("vertex ids must be dense, unique and 0-based (bad id " +
                              std::to_string(id) + ")");
      seen[id] = true;
      const auto& z = v.at("z");
      if (!z.is_array() || z.size() != 2) throw ValidationError("vertex z must be [re, im]");
      const std::string color = v.at("color").get<std::string>();
      Color c;
      if (color == "gamma")
        c = Color::Gamma;
      else if (color == "gamma_star")
        c = Color::GammaStar;
      else
        throw ValidationError("unknown color '" + color + "'");
      vertices[id] = Vertex{{z[0].get<double>(), z[1].get<double>()}, c};
    }
    std::vector<std::array<VertexId, 4>> quads;
    for (const auto& q : doc.at("quads")) {
      if (!q.is_array() || q.size() != 4) throw ValidationError("a quad must list 4 vertex ids");
      std::array<VertexId, 4> ids{};
      for (int i = 0; i < 4; ++i) {
        const long long id = q[i].get<long long>();
        if (id < 0 || static_cast<std::size_t>(id) >= vertices.size())
          throw ValidationError("quad refers to unknown vertex " + std::to_string(id));
        ids[i] = static_cast<VertexId>(id);
      }
      quads.push_back(ids);
    }
    std::vector<std::array<double, 2>> rho;
    if (doc.contains("rho"))
      for (const auto& r : doc.at("rho")) rho.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    const long long origin = doc.at("origin").get<long long>();
    if (origin < 0 || static_cast<std::size_t>(origin) >= vertices.size())
      throw ValidationError("origin " + std::to_string(origin) + " is not a vertex");
    return std::make_shared<CriticalMap>(delta, std::move(vertices), std::move(quads),
                                         static_cast<VertexId>(origin), std::move(rho));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed map file: ") + e.what());
  }
}

std::string function_to_csv(const VertexFunction& f) {
  std::string out = "vertex_id,re,im\n";
  for (VertexId v = 0; v < f.size(); ++v)
    out += std::to_string(v) + "," + format_double(f[v].real()) + "," + format_double(f[v].imag()) + "\n";
  return out;
}

namespace {

std::vector<std::pair<VertexId, Complex>> read_rows(std::string_view text, std::size_t limit,
                                                   const char* what) {
  const auto rows = lines(text);
  if (rows.empty()) throw ValidationError("CSV file is empty");
  std::vector<std::pair<VertexId, Complex>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i], ',');
    if (cells.size() != 3)
      throw ValidationError("CSV row " + std::to_string(i + 1) + " must have 3 columns");
    out.emplace_back(parse_id(cells[0], limit, what),
                     Complex{parse_double(cells[1]), parse_double(cells[2])});
  }
  return out;
}

}  // namespace

VertexFunction function_from_csv(const MapPtr& map, std::string_view text) {
  std::vector<Complex> values(map->vertex_count());
  std::vector<bool> seen(map->vertex_count(), false);
  for (const auto& [v, value] : read_rows(text, map->vertex_count(), "vertex id")) {
    if (seen[v]) throw ValidationError("vertex " + std::to_string(v) + " listed twice");
    seen[v] = true;
    values[v] = value;
  }
  for (VertexId v = 0; v < map->vertex_count(); ++v)
    if (!seen[v]) throw ValidationError("no value for vertex " + std::to_string(v));
  return VertexFunction(map, std::move(values));
}

BoundarySpec boundary_from_csv(const CriticalMap& map, std::string_view text) {
  BoundarySpec spec;
  for (const auto& [v, value] : read_rows(text, map.vertex_count(), "vertex id"))
    if (!spec.emplace(v, value).second)
      throw ValidationError("vertex " + std::to_string(v) + " listed twice");
  return spec;
}

std::string faces_to_csv(const FaceFunction& a) {
  std::string out = "quad_index,re,im\n";
  for (QuadId q = 0; q < a.size(); ++q)
    out += std::to_string(q) + "," + format_double(a[q].real()) + "," + format_double(a[q].imag()) + "\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ValidationError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("cannot move output into place at " + path.string());
  }
}

MapPtr load_map(const std::filesystem::path& path) { return map_from_json(read_file(path)); }

}  // namespace dch
