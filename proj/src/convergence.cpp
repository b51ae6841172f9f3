#include "dch/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "dch/map_io.hpp"

namespace dch {

RefiningFamily RefiningFamily::rect(double theta) {
  RefiningFamily f;
  f.kind = FamilyKind::Rect;
  f.theta = theta;
  return f;
}

RefiningFamily RefiningFamily::chain() {
  RefiningFamily f;
  f.kind = FamilyKind::Chain;
  f.max_level = 16;
  return f;
}

double RefiningFamily::delta(int level) const {
  return kind == FamilyKind::Chain ? 1.0 / std::ldexp(1.0, level) : std::ldexp(delta0, -level);
}

MapPtr refine(const RefiningFamily& family, int level) {
  if (level < 0 || level > family.max_level)
    throw ValidationError("refinement level " + std::to_string(level) + " outside [0, " +
                          std::to_string(family.max_level) + "]");
  MapPtr map;
  if (family.kind == FamilyKind::Chain) {
    map = build_chain(1 << level);
  } else {
    const int scale = 1 << level;
    map = build_rect_lattice(family.delta(level), family.theta, family.rows0 * scale,
                             family.cols0 * scale, family.origin);
  }
  if (map->eta() < family.eta_floor) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "lozenge half-angle " << map->eta() << " is below the floor " << family.eta_floor;
    throw ValidationError(msg.str());
  }
  return map;
}

Complex PowerSeries::operator()(Complex z) const {
  Complex s{};
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) s = s * z + *it;
  return s;
}

PowerSeries PowerSeries::primitive() const {
  PowerSeries p;
  p.label = "primitive of " + label;
  p.coefficients.assign(coefficients.size() + 1, Complex{});
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    p.coefficients[k + 1] = coefficients[k] / static_cast<double>(k + 1);
  return p;
}

double PowerSeries::radius_estimate() const {
  if (coefficients.size() < 16) return std::numeric_limits<double>::infinity();
  double root = 0.0;
  for (std::size_t k = coefficients.size() / 2; k < coefficients.size(); ++k) {
    const double m = std::abs(coefficients[k]);
    if (m > 0.0) root = std::max(root, std::pow(m, 1.0 / static_cast<double>(k)));
  }
  return root > 0.0 ? 1.0 / root : std::numeric_limits<double>::infinity();
}

PowerSeries PowerSeries::exponential(Complex lambda, int terms) {
  PowerSeries s;
  std::ostringstream label;
  label << "exp(" << lambda.real() << (lambda.imag() < 0 ? "" : "+") << lambda.imag() << "i z)";
  s.label = label.str();
  Complex c{1.0, 0.0};
  for (int k = 0; k < terms; ++k) {
    s.coefficients.push_back(c);
    c *= lambda / static_cast<double>(k + 1);
  }
  return s;
}

OrderFit fit_order(std::span<const ConvergenceRow> rows, std::size_t finest) {
  OrderFit fit;
  if (rows.empty()) return fit;
  fit.exact = std::all_of(rows.begin(), rows.end(),
                          [](const ConvergenceRow& r) { return r.sup_error <= kExactThreshold; });
  if (fit.exact) return fit;
  const std::size_t count = std::min(finest, rows.size());
  const auto used = rows.subspan(rows.size() - count);
  if (count < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ConvergenceRow& r : used) {
    if (!(r.sup_error > 0.0)) return fit;
    const double x = std::log10(r.delta);
    const double y = std::log10(r.sup_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(count);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double resid = 0.0;
  for (const ConvergenceRow& r : used)
    resid = std::max(resid, std::abs(std::log10(r.sup_error) - (slope * std::log10(r.delta) + intercept)));
  fit.order = slope;
  fit.residual = resid;
  return fit;
}

bool ConvergenceReport::monotone() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].sup_error < rows[i - 1].sup_error)) return false;
  return true;
}

namespace {

struct LevelMaps {
  std::vector<MapPtr> maps;                  // one per level
  std::vector<std::vector<VertexId>> samples;  // per level, ids of the common sample points
  std::vector<Complex> sample_points;        // local coordinates z - O
};

// Sample points: vertices of the coarsest level that are vertices at every level.
LevelMaps build_levels(const RefiningFamily& family, LevelRange levels) {
  if (levels.first > levels.last) throw ValidationError("empty level range");
  LevelMaps lm;
  for (int l = levels.first; l <= levels.last; ++l) lm.maps.push_back(refine(family, l));
  const CriticalMap& coarse = *lm.maps.front();
  const Complex origin = coarse.z(coarse.origin());
  lm.samples.resize(lm.maps.size());
  for (VertexId v = 0; v < coarse.vertex_count(); ++v) {
    const Complex p = coarse.z(v);
    std::vector<VertexId> ids;
    for (const MapPtr& m : lm.maps) {
      const auto id = find_vertex(*m, p);
      if (!id) break;
      ids.push_back(*id);
    }
    if (ids.size() != lm.maps.size()) continue;
    for (std::size_t i = 0; i < ids.size(); ++i) lm.samples[i].push_back(ids[i]);
    lm.sample_points.push_back(p - origin);
  }
  for (const MapPtr& m : lm.maps)
    if (std::abs(m->z(m->origin()) - origin) > 1e-9 * m->delta())
      throw ValidationError("refinement levels do not share the origin");
  return lm;
}

template <typename Fn>
void for_each_level(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double sup_error_at(const VertexFunction& f, const std::vector<VertexId>& ids,
                    const std::vector<Complex>& points, const PowerSeries& exact) {
  double err = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) err = std::max(err, std::abs(f[ids[i]] - exact(points[i])));
  return err;
}

double domain_radius(const CriticalMap& map) {
  double r = 0.0;
  const Complex o = map.z(map.origin());
  for (const Vertex& v : map.vertices()) r = std::max(r, std::abs(v.z - o));
  return r;
}

VertexFunction restrict_series(const MapPtr& map, const PowerSeries& f) {
  const Complex o = map->z(map->origin());
  std::vector<Complex> values;
  values.reserve(map->vertex_count());
  for (const Vertex& v : map->vertices()) values.push_back(f(v.z - o));
  return VertexFunction(map, std::move(values));
}

ConvergenceReport finish(ConvergenceReport r) {
  r.fit = fit_order(r.rows);
  if (!r.raw_rows.empty()) r.raw_fit = fit_order(r.raw_rows);
  return r;
}

std::string family_label(const RefiningFamily& family) {
  std::ostringstream s;
  s.precision(17);
  if (family.kind == FamilyKind::Chain)
    s << "chain";
  else
    s << "rect theta=" << family.theta;
  return s.str();
}

}  // namespace

ConvergenceReport monomial_convergence(const RefiningFamily& family, int k, LevelRange levels,
                                       StudyOptions options) {
  if (k < 0 || k > 8) throw ValidationError("monomial degree must lie in [0, 8]");
  const LevelMaps lm = build_levels(family, levels);
  PowerSeries exact;
  exact.coefficients.assign(static_cast<std::size_t>(k) + 1, Complex{});
  exact.coefficients[k] = 1.0;

  ConvergenceReport report;
  report.target = "poly:" + std::to_string(k) + " on " + family_label(family);
  report.rows.resize(lm.maps.size());
  std::vector<double> bounds(lm.maps.size(), 0.0);
  for_each_level(lm.maps.size(), options.threads, [&](std::size_t i) {
    const MapPtr& map = lm.maps[i];
    const VertexFunction zk = monomial(map, k);
    const double delta = map->delta();
    report.rows[i] = {levels.first + static_cast<int>(i), delta,
                      sup_error_at(zk, lm.samples[i], lm.sample_points, exact)};
    for (std::size_t s = 0; s < lm.samples[i].size(); ++s) {
      const Complex x = lm.sample_points[s];
      if (std::abs(x) == 0.0) continue;
      const double err = std::abs(zk[lm.samples[i][s]] - exact(x));
      bounds[i] = std::max(bounds[i], err / (std::pow(std::abs(x), k - 2) * delta * delta));
    }
  });
  report.lambda_bound = *std::max_element(bounds.begin(), bounds.end());
  std::ostringstream note;
  note.precision(6);
  note << "lambda_k bound=" << report.lambda_bound;
  report.notes.push_back(note.str());
  return finish(std::move(report));
}

ConvergenceReport primitive_convergence(const RefiningFamily& family, const PowerSeries& f,
                                        LevelRange levels, StudyOptions options) {
  const LevelMaps lm = build_levels(family, levels);
  const double radius = domain_radius(*lm.maps.back());
  if (f.radius_estimate() <= radius) {
    std::ostringstream msg;
    msg << "series radius " << f.radius_estimate() << " does not cover the domain radius " << radius;
    throw ValidationError(msg.str());
  }
  const PowerSeries exact = f.primitive();

  ConvergenceReport report;
  report.target = "primitive of " + f.label + " on " + family_label(family);
  report.rows.resize(lm.maps.size());
  report.raw_rows.resize(lm.maps.size());
  for_each_level(lm.maps.size(), options.threads, [&](std::size_t i) {
    const MapPtr& map = lm.maps[i];
    const int level = levels.first + static_cast<int>(i);
    const VertexFunction raw = restrict_series(map, f);
    const VertexFunction raw_primitive = bfs_primitive(raw);
    report.raw_rows[i] = {level, map->delta(),
                          sup_error_at(raw_primitive, lm.samples[i], lm.sample_points, exact)};
    const VertexFunction projected = solve_boundary(map, restrict_to_boundary(raw));
    const VertexFunction F = primitive(projected);
    report.rows[i] = {level, map->delta(), sup_error_at(F, lm.samples[i], lm.sample_points, exact)};
  });
  std::ostringstream raw;
  raw.precision(6);
  raw << "raw restriction errors:";
  for (const ConvergenceRow& r : report.raw_rows) raw << ' ' << r.sup_error;
  report.notes.push_back(raw.str());
  report = finish(std::move(report));
  std::ostringstream fit;
  fit.precision(6);
  fit << "raw restriction order=" << report.raw_fit.order;
  report.notes.push_back(fit.str());
  return report;
}

int truncation_degree(const PowerSeries& f, int level, double delta, double domain_radius) {
  const int available = static_cast<int>(f.coefficients.size()) - 1;
  if (available < 0) throw ValidationError("empty series");
  auto mag = [&](int k) { return k <= available ? std::abs(f.coefficients[k]) : 0.0; };
  // At least level + 2 terms, more while the tail of the continuous series
  // is above 1% of delta^2.
  int n = level + 2;
  while (n < available && mag(n + 1) * std::pow(domain_radius, n + 1) > 1e-2 * delta * delta) ++n;
  return std::min(n, available);
}

ConvergenceReport series_approximation(const RefiningFamily& family, const PowerSeries& f,
                                       LevelRange levels, StudyOptions options) {
  const LevelMaps lm = build_levels(family, levels);
  ConvergenceReport report;
  report.target = "series " + f.label + " on " + family_label(family);
  report.rows.resize(lm.maps.size());
  report.truncation.resize(lm.maps.size());
  std::vector<char> warnings(lm.maps.size(), 0);
  for_each_level(lm.maps.size(), options.threads, [&](std::size_t i) {
    const MapPtr& map = lm.maps[i];
    const int level = levels.first + static_cast<int>(i);
    int n = truncation_degree(f, level, map->delta(), domain_radius(*map));
    const auto zs = monomials(map, n);
    // Stop where |a_k| |Z^{:k:}|_inf stops decaying: past that point the
    // discrete terms diverge.
    std::vector<double> size(n + 1);
    for (int k = 0; k <= n; ++k) size[k] = std::abs(f.coefficients[k]) * zs[k].sup_norm();
    for (int k = level + 3; k <= n; ++k) {
      if (size[k - 1] > 0.0 && size[k] >= size[k - 1]) {
        n = k - 1;
        warnings[i] = 1;
        break;
      }
    }
    VertexFunction sum = VertexFunction::constant(map, 0.0);
    for (int k = 0; k <= n; ++k) sum += f.coefficients[k] * zs[k];
    report.truncation[i] = n;
    report.rows[i] = {level, map->delta(), sup_error_at(sum, lm.samples[i], lm.sample_points, f)};
  });
  report.warning = std::any_of(warnings.begin(), warnings.end(), [](char w) { return w != 0; });
  std::ostringstream note;
  note << "truncation N(level):";
  for (std::size_t i = 0; i < report.truncation.size(); ++i)
    note << ' ' << (levels.first + static_cast<int>(i)) << ':' << report.truncation[i];
  report.notes.push_back(note.str());
  if (report.warning)
    report.notes.push_back("warning: |a_k| |Z^{:k:}|_inf does not decay over the used range");
  return finish(std::move(report));
}

ConvergenceReport exp_convergence(const RefiningFamily& family, Complex lambda, LevelRange levels,
                                  StudyOptions options) {
  const LevelMaps lm = build_levels(family, levels);
  if (!(std::abs(lambda) < 2.0 / lm.maps.front()->delta()))
    throw ValidationError("|lambda| must stay below 2/delta at every level");
  const PowerSeries exact = PowerSeries::exponential(lambda, 120);
  ConvergenceReport report;
  report.target = "exp " + exact.label + " on " + family_label(family);
  report.rows.resize(lm.maps.size());
  for_each_level(lm.maps.size(), options.threads, [&](std::size_t i) {
    const MapPtr& map = lm.maps[i];
    const VertexFunction e = exp_product(map, lambda);
    double err = 0.0;
    for (std::size_t s = 0; s < lm.samples[i].size(); ++s)
      err = std::max(err, std::abs(e[lm.samples[i][s]] - std::exp(lambda * lm.sample_points[s])));
    report.rows[i] = {levels.first + static_cast<int>(i), map->delta(), err};
  });
  return finish(std::move(report));
}

std::string to_csv(const ConvergenceReport& report) {
  std::string out = "level,delta,sup_error\n";
  for (const ConvergenceRow& r : report.rows)
    out += std::to_string(r.level) + "," + format_double(r.delta) + "," + format_double(r.sup_error) + "\n";
  out += "# target=" + report.target + "\n";
  for (const std::string& n : report.notes) out += "# " + n + "\n";
  if (report.fit.exact)
    out += "# order=exact,resid=0\n";
  else
    out += "# order=" + format_double(report.fit.order) + ",resid=" + format_double(report.fit.residual) + "\n";
  return out;
}

}  // namespace dch
