#include "dch/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>

#include "dch/basis.hpp"
#include "dch/convergence.hpp"
#include "dch/map_io.hpp"

namespace dch {

namespace {

const char* const kToleranceFooter =
    "Fixed tolerances:\n"
    "  criticality          1e-12 (relative to delta)\n"
    "  lozenge angle floor  pi/12 (refinement families)\n"
    "  rank threshold       1e-9 (relative)\n"
    "  solve residual       1e-10 (relative to max(1, |values|))\n"
    "  primitive closure    1e-9 (relative to max(1, |f|))\n"
    "  face derivative      1e-10 (relative to max(1, |f|))\n"
    "  exp pole guard       1e-12\n"
    "  dependence threshold 1e-8 (sigma_min / sigma_max)\n"
    "  exact convergence    1e-12";

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::shared_ptr<spdlog::logger> log;
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

std::string error_json(const std::string& message, const char* kind) {
  nlohmann::json j;
  j["error"] = message;
  j["kind"] = kind;
  return j.dump();
}

MapPtr load_critical_map(const std::string& path, const Context& ctx) {
  MapPtr map = load_map(path);
  const ValidationReport report = validate_criticality(*map);
  if (!report.ok())
    throw ValidationError(path + " is not a critical map: " + to_string(report.violations.front()));
  ctx.log->debug("loaded {}: {} vertices, {} quads, delta {}", path, map->vertex_count(),
                 map->quad_count(), map->delta());
  return map;
}

VertexFunction load_function(const MapPtr& map, const std::string& path) {
  return function_from_csv(map, read_file(path));
}

void emit(const Context& ctx, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    ctx.out << content;
  } else {
    write_file_atomic(path, content);
    ctx.log->info("wrote {}", path);
  }
}

LevelRange parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ValidationError("levels must read A..B, got '" + text + "'");
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw ValidationError("levels must read A..B, got '" + text + "'");
    return v;
  };
  const std::string_view all = text;
  LevelRange r{to_int(all.substr(0, dots)), to_int(all.substr(dots + 2))};
  if (r.first > r.last) throw ValidationError("empty level range " + text);
  return r;
}

PowerSeries load_series(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + " is not valid JSON: " + e.what());
  }
  const nlohmann::json& list = doc.is_object() && doc.contains("a") ? doc["a"] : doc;
  if (!list.is_array() || list.empty()) throw ValidationError(path + ": expected a coefficient list");
  PowerSeries s;
  s.label = path;
  try {
    for (const auto& c : list) {
      if (c.is_number())
        s.coefficients.emplace_back(c.get<double>(), 0.0);
      else
        s.coefficients.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": coefficients must be numbers or [re, im] pairs");
  }
  return s;
}

std::string complex_json(Complex z) {
  return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
}

// ---------------------------------------------------------------------------

void add_lattice(CLI::App& app, Context& ctx) {
  auto* lattice = app.add_subcommand("lattice", "Generate or check critical maps");
  lattice->require_subcommand(1);

  auto* gen = lattice->add_subcommand("gen", "Generate a rectangular rhombic patch or a chain");
  auto kind = std::make_shared<std::string>();
  auto delta = std::make_shared<double>(1.0);
  auto theta = std::make_shared<double>(kPi / 4);
  auto rows = std::make_shared<int>(4);
  auto cols = std::make_shared<int>(4);
  auto n = std::make_shared<int>(8);
  auto origin = std::make_shared<std::string>("0,0");
  auto output = std::make_shared<std::string>();
  gen->add_option("--kind", *kind, "rect or chain")->required()->check(CLI::IsMember({"rect", "chain"}));
  gen->add_option("--delta", *delta, "rhombus side (rect)")->capture_default_str();
  gen->add_option("--theta", *theta, "half-angle in radians (rect)")->capture_default_str();
  gen->add_option("--rows", *rows, "rhombi along e^{-i theta} (rect)")->capture_default_str();
  gen->add_option("--cols", *cols, "rhombi along e^{i theta} (rect)")->capture_default_str();
  gen->add_option("--n", *n, "number of squares (chain)")->capture_default_str();
  gen->add_option("--origin", *origin, "origin position, RE,IM (rect)")->capture_default_str();
  gen->add_option("-o,--output", *output, "map JSON path")->required();
  gen->footer(kToleranceFooter);
  gen->callback([=, &ctx] {
    MapPtr map;
    if (*kind == "chain") {
      map = build_chain(*n);
    } else {
      map = build_rect_lattice(*delta, *theta, *rows, *cols, parse_complex(*origin));
    }
    emit(ctx, *output, map_to_json(*map));
  });

  auto* check = lattice->add_subcommand("check", "Validate a map; exit 0 iff no violation");
  auto path = std::make_shared<std::string>();
  check->add_option("map", *path, "map JSON path")->required();
  check->footer(kToleranceFooter);
  check->callback([=, &ctx] {
    const MapPtr map = load_map(*path);
    const ValidationReport report = validate_criticality(*map);
    for (const Violation& v : report.violations) ctx.out << to_string(v) << '\n';
    if (!report.ok())
      throw ValidationError(std::to_string(report.violations.size()) + " criticality violations");
    ctx.out << "ok: " << map->vertex_count() << " vertices, " << map->quad_count()
            << " quads, eta " << format_double(map->eta()) << '\n';
  });
}

void add_holomorphy(CLI::App& app, Context& ctx) {
  {
    auto* cmd = app.add_subcommand("check", "Test the discrete Cauchy-Riemann equation");
    auto map = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto tol = std::make_shared<double>(1e-9);
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--input", *input, "vertex function CSV")->required();
    cmd->add_option("--tol", *tol, "residual tolerance relative to max(1, |f|)")->capture_default_str();
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      const HolomorphyCheck c = is_holomorphic(load_function(m, *input), *tol);
      ctx.out << "{\"holomorphic\": " << (c.holomorphic ? "true" : "false")
              << ", \"max_residual\": " << format_double(c.max_residual)
              << ", \"scale\": " << format_double(c.scale) << "}\n";
      if (!c.holomorphic) throw NumericalError("function is not holomorphic", c.max_residual);
    });
  }
  {
    auto* cmd = app.add_subcommand("solve", "Holomorphic function from boundary values");
    auto map = std::make_shared<std::string>();
    auto boundary = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--boundary", *boundary,
                    "CSV vertex_id,re,im over the Gamma* boundary plus one Gamma vertex")
        ->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      const VertexFunction f = solve_boundary(m, boundary_from_csv(*m, read_file(*boundary)));
      emit(ctx, *output, function_to_csv(f));
    });
  }
  {
    auto* cmd = app.add_subcommand("dim", "Dimension of the holomorphic function space");
    auto map = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      const DimensionCount d = dimension_of_solution_space(*m);
      ctx.out << "{\"boundary_points\": " << d.boundary_points << ", \"expected\": " << d.expected
              << ", \"rank\": " << d.rank << ", \"nullity\": " << d.nullity << "}\n";
    });
  }
  {
    auto* cmd = app.add_subcommand("random", "Random holomorphic function (seeded by --seed)");
    auto map = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      emit(ctx, *output, function_to_csv(random_holomorphic(m, ctx.seed)));
    });
  }
}

void add_calculus(CLI::App& app, Context& ctx) {
  {
    auto* poly = app.add_subcommand("poly", "Discrete monomials");
    poly->require_subcommand(1);
    auto* cmd = poly->add_subcommand("eval", "Z^{:k:} based at the map origin");
    auto map = std::make_shared<std::string>();
    auto degree = std::make_shared<int>(1);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--degree", *degree, "k >= 0")->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      emit(ctx, *output, function_to_csv(monomial(m, *degree)));
    });
  }
  {
    auto* e = app.add_subcommand("exp", "Discrete exponential");
    e->require_subcommand(1);
    auto* cmd = e->add_subcommand("eval", "Exp(:lambda:) by the product formula or the series");
    auto map = std::make_shared<std::string>();
    auto lambda = std::make_shared<std::string>("1,0");
    auto series = std::make_shared<int>(-1);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--lambda", *lambda, "RE,IM or a+bi")->capture_default_str();
    cmd->add_option("--series", *series, "use the partial series up to this degree");
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      const Complex l = parse_complex(*lambda);
      if (*series >= 0) {
        SeriesResult r = exp_series_partial(m, l, *series);
        if (r.warning) ctx.log->warn("{}", *r.warning);
        emit(ctx, *output, function_to_csv(r.values));
      } else {
        emit(ctx, *output, function_to_csv(exp_product(m, l)));
      }
    });
  }
  {
    auto* cmd = app.add_subcommand("derive", "Duffin derivative of a holomorphic function");
    auto map = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--input", *input, "vertex function CSV")->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      emit(ctx, *output, function_to_csv(derive_duffin(load_function(m, *input))));
    });
  }
  {
    auto* cmd = app.add_subcommand("facederiv", "Derivative of a holomorphic function on faces");
    auto map = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--input", *input, "vertex function CSV")->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      emit(ctx, *output, faces_to_csv(face_derivative(load_function(m, *input))));
    });
  }
  {
    auto* cmd = app.add_subcommand("integrate", "Integral of f dZ along a path of rhombus sides");
    auto map = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto path = std::make_shared<std::vector<VertexId>>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--input", *input, "vertex function CSV")->required();
    cmd->add_option("--path", *path, "vertex ids id1,id2,...")->required()->delimiter(',');
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      for (VertexId v : *path)
        if (v >= m->vertex_count()) throw ValidationError("unknown vertex " + std::to_string(v));
      const Complex s = integrate_path(load_function(m, *input), PathRef{*path});
      ctx.out << "{\"integral\": " << complex_json(s) << "}\n";
    });
  }
}

void add_basis(CLI::App& app, Context& ctx) {
  {
    auto* b = app.add_subcommand("basis", "Young-diagram change-of-basis polynomials");
    b->require_subcommand(1);
    auto* cmd = b->add_subcommand("table", "Print B^0 .. B^K as `degree; partition; coefficient`");
    auto degree = std::make_shared<int>(6);
    cmd->add_option("--max-degree", *degree, "K >= 0")->capture_default_str();
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      for (const BPolynomial& p : b_polynomials_recursive(*degree))
        for (const auto& [y, c] : p.terms) ctx.out << p.degree << "; " << to_string(y) << "; " << c << '\n';
    });
  }
  {
    auto* cmd = app.add_subcommand("translate", "Monomial based at another vertex, via B^k");
    auto map = std::make_shared<std::string>();
    auto degree = std::make_shared<int>(1);
    auto a = std::make_shared<std::string>("1,0");
    auto b = std::make_shared<VertexId>(0);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--degree", *degree, "k >= 0")->required();
    cmd->add_option("--a", *a, "scale factor RE,IM")->capture_default_str();
    cmd->add_option("--b", *b, "new base vertex id")->required();
    cmd->add_option("-o,--output", *output, "output CSV (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      emit(ctx, *output, function_to_csv(translate_monomial(*degree, parse_complex(*a), *b, m)));
    });
  }
  {
    auto* cmd = app.add_subcommand("minpoly", "Minimal polynomial of a finite critical map");
    auto map = std::make_shared<std::string>();
    auto degree = std::make_shared<int>(12);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--map", *map, "map JSON path")->required();
    cmd->add_option("--max-degree", *degree, "largest degree searched")->capture_default_str();
    cmd->add_option("-o,--output", *output, "coefficient JSON (stdout when omitted)");
    cmd->footer(kToleranceFooter);
    cmd->callback([=, &ctx] {
      const MapPtr m = load_critical_map(*map, ctx);
      const MinimalPolynomial p = minimal_polynomial(m, *degree);
      std::ostringstream s;
      s << "{\"n\": " << p.n << ", \"a\": [";
      for (std::size_t k = 0; k < p.a.size(); ++k) s << (k ? ", " : "") << complex_json(p.a[k]);
      s << "], \"symmetry_defect\": " << format_double(p.symmetry_defect)
        << ", \"modulus_defect\": " << format_double(p.modulus_defect)
        << ", \"residual\": " << format_double(p.residual) << ", \"singular_ratios\": [";
      for (std::size_t k = 0; k < p.singular_ratio_trace.size(); ++k)
        s << (k ? ", " : "") << format_double(p.singular_ratio_trace[k]);
      s << "]}\n";
      emit(ctx, *output, s.str());
    });
  }
}

void add_convergence(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("convergence", "Refinement study with fitted order");
  auto family = std::make_shared<std::string>("rect");
  auto theta = std::make_shared<double>(kPi / 4);
  auto delta0 = std::make_shared<double>(1.0);
  auto levels = std::make_shared<std::string>("3..6");
  auto target = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  cmd->add_option("--family", *family, "rect or chain")
      ->check(CLI::IsMember({"rect", "chain"}))
      ->capture_default_str();
  cmd->add_option("--theta", *theta, "half-angle in radians (rect)")->capture_default_str();
  cmd->add_option("--delta0", *delta0, "level-0 side length (rect)")->capture_default_str();
  cmd->add_option("--levels", *levels, "A..B")->capture_default_str();
  cmd->add_option("--target", *target,
                  "poly:K | exp:RE,IM | series:coeffs.json | primitive:exp | primitive:coeffs.json")
      ->required();
  cmd->add_option("-o,--output", *output, "report CSV (stdout when omitted)");
  cmd->footer(kToleranceFooter);
  cmd->callback([=, &ctx] {
    RefiningFamily fam = *family == "chain" ? RefiningFamily::chain() : RefiningFamily::rect(*theta);
    fam.delta0 = *delta0;
    const LevelRange range = parse_levels(*levels);
    const StudyOptions options{ctx.threads};
    const auto colon = target->find(':');
    if (colon == std::string::npos) throw ValidationError("target must read KIND:VALUE");
    const std::string kind = target->substr(0, colon);
    const std::string value = target->substr(colon + 1);
    ConvergenceReport report;
    if (kind == "poly") {
      int k = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), k);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw ValidationError("poly target needs an integer degree");
      report = monomial_convergence(fam, k, range, options);
    } else if (kind == "exp") {
      report = exp_convergence(fam, parse_complex(value), range, options);
    } else if (kind == "series") {
      report = series_approximation(fam, load_series(value), range, options);
    } else if (kind == "primitive") {
      const PowerSeries f = value == "exp" ? PowerSeries::exponential() : load_series(value);
      report = primitive_convergence(fam, f, range, options);
    } else {
      throw ValidationError("unknown target kind '" + kind + "'");
    }
    if (report.warning) ctx.log->warn("{}: truncation terms do not decay", report.target);
    ctx.log->info("{}: order {} residual {}", report.target, report.fit.order, report.fit.residual);
    emit(ctx, *output, to_csv(report));
  });
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("dch", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* level = std::getenv("DCH_LOG")) {
    const std::string_view l = level;
    if (l == "debug")
      log->set_level(spdlog::level::debug);
    else if (l == "info")
      log->set_level(spdlog::level::info);
  }
  return log;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, make_logger(err)};

  CLI::App app{"Discrete holomorphy on critical rhombic maps", "dch"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(kToleranceFooter);
  app.add_option("--threads", ctx.threads, "worker threads for refinement studies")
      ->capture_default_str()
      ->check(CLI::Range(1u, 256u));
  app.add_option("--seed", ctx.seed, "seed for random test data")->capture_default_str();

  add_lattice(app, ctx);
  add_holomorphy(app, ctx);
  add_calculus(app, ctx);
  add_basis(app, ctx);
  add_convergence(app, ctx);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json(e.what(), "usage") << '\n';
    return 1;
  } catch (const ValidationError& e) {
    err << error_json(e.what(), "validation") << '\n';
    return 1;
  } catch (const NumericalError& e) {
    nlohmann::json j;
    j["error"] = e.what();
    j["kind"] = "numerical";
    j["measured"] = e.measured();
    err << j.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << error_json(e.what(), "internal") << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dch
