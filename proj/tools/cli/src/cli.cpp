#include "mixed_spectra_cli/cli.hpp"

#include <mixed_spectra/error.hpp>
#include <mixed_spectra/geometry_io.hpp>
#include <mixed_spectra/mesh.hpp>
#include <mixed_spectra/report.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mixed_spectra::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"solve",         "verify-split",    "verify-corollary",
                                            "verify-right",  "verify-voila",    "verify-grisvard",
                                            "sweep",         "convergence"};

struct Geometry {
  LabeledPolygon polygon;
  std::optional<TriangleSpec> triangle;
};

LabeledPolygon unit_square() {
  return make_polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)},
                      std::vector<SideLabel>(4, SideLabel::Dirichlet));
}

bool is_index_list(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || c == ',' || c == ' ' || c == '+';
         });
}

std::vector<std::size_t> parse_index_list(const std::string& s, std::size_t sides) {
  std::vector<std::size_t> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const auto k = static_cast<std::size_t>(std::stoul(token));
    if (k >= sides)
      throw Error(ErrorCode::ConfigError,
                  "side " + token + " out of range (polygon has " + std::to_string(sides) + " sides)");
    out.push_back(k);
    token.clear();
  };
  for (char c : s) {
    if (c >= '0' && c <= '9') token += c;
    else flush();
  }
  flush();
  return out;
}

Geometry apply_dirichlet(Geometry g, const std::string& spec) {
  if (spec.empty()) return g;
  if (spec == "all") {
    g.polygon = g.polygon.with_labels(std::vector<SideLabel>(g.polygon.size(), SideLabel::Dirichlet));
  } else if (is_index_list(spec)) {
    const auto sides = parse_index_list(spec, g.polygon.size());
    g.polygon = g.polygon.with_dirichlet_sides(sides);
  } else {
    if (!g.triangle) throw Error(ErrorCode::ConfigError, "side roles in --dirichlet need a triangle");
    g.polygon = g.triangle->polygon(RoleSet::parse(spec));
  }
  return g;
}

Geometry resolve_geometry(const RunConfig& c) {
  const int sources = (c.square ? 1 : 0) + (c.angles ? 1 : 0) + (c.geometry.empty() ? 0 : 1);
  if (sources > 1) throw Error(ErrorCode::ConfigError, "give only one of --geometry, --square, --angles");
  if (sources == 0) throw Error(ErrorCode::ConfigError, "no geometry: use --geometry, --square or --angles");
  if (c.square) return apply_dirichlet({unit_square(), std::nullopt}, c.dirichlet);
  if (c.angles) {
    if (c.angles->size() != 2) throw Error(ErrorCode::ConfigError, "--angles takes two values");
    auto tri = TriangleSpec::from_angles((*c.angles)[0], (*c.angles)[1]);
    return apply_dirichlet({tri.polygon({SideRole::L}), tri}, c.dirichlet);
  }
  auto in = geometry_from_argument(c.geometry);
  return apply_dirichlet({std::move(in.polygon), std::move(in.triangle)}, c.dirichlet);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, std::string(name) + " must be > 0");
}

VerifyConfig verify_config(const RunConfig& c, unsigned assembly_threads) {
  require_positive(c.tol, "--tol");
  require_positive(c.eps_verdict, "--eps-verdict");
  require_positive(c.eps_angle, "--eps-angle");
  require_positive(c.right_angle_tol, "--right-angle-tol");
  if (c.max_iter < 1) throw Error(ErrorCode::ConfigError, "--max-iter must be >= 1");
  if (c.threads < 1) throw Error(ErrorCode::ConfigError, "--threads must be >= 1");

  VerifyConfig v;
  v.levels = LevelRange::parse(c.levels);
  v.order = parse_order(c.order);
  v.solver.tol = c.tol;
  v.solver.max_iter = c.max_iter;
  v.solver.max_level = c.max_level;
  v.eps_verdict = c.eps_verdict;
  v.eps_angle = c.eps_angle;
  v.right_angle_tol = c.right_angle_tol;
  v.assembly.threads = assembly_threads;
  const int cap = effective_level_cap(c.max_level);
  if (v.levels.last > cap)
    throw Error(ErrorCode::LevelCapExceeded,
                "level " + std::to_string(v.levels.last) + " exceeds the cap " + std::to_string(cap));
  return v;
}

std::size_t single_neumann_side(const RunConfig& c, const LabeledPolygon& p, const char* command) {
  if (c.neumann_side) {
    if (*c.neumann_side >= p.size()) throw Error(ErrorCode::ConfigError, "--neumann-side out of range");
    return *c.neumann_side;
  }
  const auto cond = angle_condition(p);
  if (cond.neumann_side) return *cond.neumann_side;
  throw Error(ErrorCode::ConfigError,
              std::string(command) + " needs --neumann-side or labels with exactly one Neumann side");
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::string fmt(double v, int digits = 10) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// Collected by each command, written once at the end.
struct Artifacts {
  std::string csv;
  json result;
  int exit_code = kExitOk;
};

std::string resolved_format(const RunConfig& c) {
  if (!c.format.empty()) {
    if (c.format != "csv" && c.format != "json")
      throw Error(ErrorCode::ConfigError, "--format must be csv or json");
    return c.format;
  }
  const auto ext = std::filesystem::path(c.output).extension().string();
  return ext == ".json" ? "json" : "csv";
}

void write_outputs(const RunConfig& c, const Artifacts& a) {
  if (c.output.empty()) return;
  if (resolved_format(c) == "csv") {
    write_file_atomic(c.output, a.csv);
    return;
  }
  json doc = {{"tool", "mixed_spectra"},
              {"config", json::parse(config_to_json(c))},
              {"generated_at", timestamp()},
              {"result", a.result}};
  write_file_atomic(c.output, doc.dump(2) + "\n");
}

void print_reports(std::ostream& out, const std::vector<VerificationReport>& reports) {
  // Dirichlet sets on polygons ("D{1,2,3,4}") can be wider than triangle roles.
  int lw = 9;
  for (const auto& r : reports)
    lw = std::max({lw, static_cast<int>(r.lhs.label.size()) + 2, static_cast<int>(r.rhs.label.size()) + 2});
  out << std::left << std::setw(15) << "check" << std::setw(lw) << "lhs" << std::setw(16) << "lambda_lhs"
      << std::setw(lw) << "rhs" << std::setw(16) << "lambda_rhs" << std::setw(13) << "margin"
      << std::setw(13) << "budget" << std::setw(8) << "hyp" << "verdict\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(15) << r.check << std::setw(lw) << r.lhs.label << std::setw(16)
        << fmt(r.lhs.extrapolation.value) << std::setw(lw) << r.rhs.label << std::setw(16)
        << fmt(r.rhs.extrapolation.value) << std::setw(13) << fmt(r.margin, 4) << std::setw(13)
        << fmt(r.error_budget, 4) << std::setw(8) << (r.hypothesis.met ? "Met" : "NotMet")
        << to_string(r.verdict) << '\n';
    if (!r.hypothesis.met) out << "  hypothesis not met: " << r.hypothesis.reason << '\n';
  }
}

Artifacts report_artifacts(const std::vector<VerificationReport>& reports, const std::string& task) {
  Artifacts a;
  std::ostringstream csv;
  write_verification_csv(csv, reports, task);
  a.csv = csv.str();
  a.result = json::array();
  for (const auto& r : reports) {
    a.result.push_back(json::parse(to_json(r)));
    if (r.is_counterexample()) a.exit_code = kExitViolation;
  }
  return a;
}

void print_geometry(std::ostream& out, const LabeledPolygon& p) {
  out << "geometry:";
  for (const auto& v : p.vertices()) out << " (" << fmt(v.x()) << ", " << fmt(v.y()) << ")";
  out << "  labels: ";
  for (auto l : p.labels()) out << to_char(l);
  out << '\n';
}

Artifacts cmd_solve(const RunConfig& c, std::ostream& out, bool study) {
  const auto g = resolve_geometry(c);
  const auto v = verify_config(c, c.threads);
  if (study && v.levels.count() < 3)
    throw Error(ErrorCode::ConfigError, "convergence needs at least three levels");
  if (c.num_eigs < 1 || c.num_eigs > 5) throw Error(ErrorCode::ConfigError, "--num-eigs must be in 1..5");

  const auto levels = build_levels(g.polygon, v.levels, v.order, v.solver, v.assembly);
  std::vector<ConvergencePoint> points;
  std::vector<double> spectrum;
  for (const auto& d : levels) {
    const auto sys = d.system(g.polygon.labels());
    const auto pairs = smallest_eigenpairs(sys, &d == &levels.back() ? c.num_eigs : 1, v.solver);
    const auto& r = pairs.front();
    points.push_back({d.level, d.h, r.eigenvalue, r.residual, r.iterations, sys.num_free()});
    if (&d == &levels.back())
      for (const auto& p : pairs) spectrum.push_back(p.eigenvalue);
  }
  std::optional<Extrapolation> ex;
  if (points.size() >= 3) ex = richardson_extrapolate(points);

  print_geometry(out, g.polygon);
  out << "order " << to_string(v.order) << ", levels " << v.levels.to_string() << '\n';
  out << std::left << std::setw(7) << "level" << std::setw(14) << "h" << std::setw(10) << "free"
      << std::setw(20) << "lambda_1" << std::setw(12) << "residual" << "iter\n";
  for (const auto& p : points)
    out << std::left << std::setw(7) << p.level << std::setw(14) << fmt(p.h, 6) << std::setw(10)
        << p.free_dofs << std::setw(20) << fmt(p.eigenvalue, 14) << std::setw(12) << fmt(p.residual, 3)
        << p.iterations << '\n';
  if (study) {
    for (std::size_t k = 2; k < points.size(); ++k) {
      const double d1 = points[k - 1].eigenvalue - points[k - 2].eigenvalue;
      const double d2 = points[k].eigenvalue - points[k - 1].eigenvalue;
      if (d2 != 0.0 && d1 / d2 > 0.0)
        out << "observed order at level " << points[k].level << ": " << fmt(std::log2(d1 / d2), 4) << '\n';
    }
  }
  out << "lambda_1 = " << fmt(points.back().eigenvalue, 12) << '\n';
  if (ex) {
    out << "extrapolated = " << fmt(ex->value, 12) << "  error estimate " << fmt(ex->error_estimate, 3);
    if (ex->order) out << "  order " << fmt(*ex->order, 4);
    if (ex->degraded) out << "  (degraded)";
    out << '\n';
  }
  if (spectrum.size() > 1) {
    out << "lowest eigenvalues at level " << points.back().level << ":";
    for (double s : spectrum) out << ' ' << fmt(s, 12);
    out << '\n';
  }

  if (!c.dump_mesh.empty()) write_file_atomic(c.dump_mesh, mesh_to_json(levels.back().operators->space->mesh()));

  Artifacts a;
  std::ostringstream csv;
  write_convergence_csv(csv, points, ex);
  a.csv = csv.str();
  a.result = json::parse(to_json(points, ex));
  a.result["spectrum"] = spectrum;
  a.result["polygon"] = json::parse(polygon_to_json(g.polygon));
  return a;
}

Artifacts cmd_verify_split(const RunConfig& c, std::ostream& out) {
  const auto g = resolve_geometry(c);
  const auto v = verify_config(c, c.threads);
  const auto side = single_neumann_side(c, g.polygon, "verify-split");
  std::vector<VerificationReport> reports{verify_split(g.polygon, side, v)};
  print_geometry(out, g.polygon);
  print_reports(out, reports);
  return report_artifacts(reports, "verify-split");
}

Artifacts cmd_verify_corollary(const RunConfig& c, std::ostream& out) {
  const auto g = resolve_geometry(c);
  if (!g.triangle) throw Error(ErrorCode::ConfigError, "verify-corollary needs a triangle");
  const auto v = verify_config(c, c.threads);
  std::vector<CorollaryItem> items;
  if (c.which.empty() || c.which == "all") items = {CorollaryItem::I, CorollaryItem::II, CorollaryItem::III};
  else items = {parse_corollary_item(c.which)};
  std::vector<VerificationReport> reports;
  for (auto item : items) reports.push_back(verify_triangle_corollary(*g.triangle, item, v));
  print_geometry(out, g.polygon);
  print_reports(out, reports);
  return report_artifacts(reports, "verify-corollary");
}

Artifacts cmd_verify_right(const RunConfig& c, std::ostream& out) {
  const auto g = resolve_geometry(c);
  if (!g.triangle) throw Error(ErrorCode::ConfigError, "verify-right needs a triangle");
  const auto v = verify_config(c, c.threads);
  auto pair = verify_right_triangle(*g.triangle, v);
  std::vector<VerificationReport> reports{pair[0], pair[1]};
  print_geometry(out, g.polygon);
  print_reports(out, reports);
  return report_artifacts(reports, "verify-right");
}

Artifacts cmd_verify_voila(const RunConfig& c, std::ostream& out) {
  const auto g = resolve_geometry(c);
  const auto v = verify_config(c, c.threads);
  std::optional<VoilaReport> r;
  if (c.which == "S" || c.which == "M") {
    if (!g.triangle) throw Error(ErrorCode::ConfigError, "--which S|M needs a triangle");
    r = verify_voila_right_triangle(*g.triangle, c.which == "S" ? SideRole::S : SideRole::M, v);
  } else if (!c.which.empty()) {
    throw Error(ErrorCode::ConfigError, "verify-voila --which takes S or M");
  } else {
    r = verify_voila_identity(g.polygon, single_neumann_side(c, g.polygon, "verify-voila"), v);
  }

  print_geometry(out, g.polygon);
  out << "u for " << r->gamma_label << ", test function for " << r->target_label << '\n';
  out << std::left << std::setw(7) << "level" << std::setw(18) << "lambda_gamma" << std::setw(18)
      << "lambda_target" << std::setw(18) << "rayleigh" << "gap\n";
  for (const auto& l : r->levels)
    out << std::left << std::setw(7) << l.level << std::setw(18) << fmt(l.lambda_gamma, 12) << std::setw(18)
        << fmt(l.lambda_complement, 12) << std::setw(18) << fmt(l.rayleigh, 12) << fmt(l.relative_gap, 4)
        << '\n';
  out << "hypothesis " << (r->hypothesis.met ? "Met" : "NotMet: " + r->hypothesis.reason) << '\n';
  out << "chain lambda_target <= rayleigh: " << (r->chain_holds ? "holds" : "FAILS") << '\n';
  out << "gap decreasing over the last three levels: " << (r->gap_decreasing ? "yes" : "no")
      << " (trend thresholds are engineering choices)\n";

  Artifacts a;
  std::ostringstream csv;
  write_voila_csv(csv, std::span<const VoilaReport>(&*r, 1));
  a.csv = csv.str();
  a.result = json::parse(to_json(*r));
  if (r->hypothesis.met && !r->chain_holds) a.exit_code = kExitViolation;
  return a;
}

Artifacts cmd_verify_grisvard(const RunConfig& c, std::ostream& out) {
  std::vector<GrisvardReport> reports;
  if (c.which == "controls") {
    const auto v = verify_config(c, c.threads);
    reports = grisvard_negative_controls(v.levels);
  } else {
    const auto g = resolve_geometry(c);
    const auto v = verify_config(c, c.threads);
    std::optional<std::size_t> side = c.neumann_side;
    if (!side) side = angle_condition(g.polygon).neumann_side;
    print_geometry(out, g.polygon);
    reports.push_back(verify_grisvard(g.polygon, side, v));
  }
  for (const auto& r : reports) {
    out << r.check << " (" << r.gamma_label << "), hypothesis "
        << (r.hypothesis.met ? "Met" : "NotMet: " + r.hypothesis.reason) << '\n';
    for (const auto& l : r.levels)
      out << "  level " << l.level << "  residual " << fmt(l.residual, 6) << '\n';
    out << "  reduction " << fmt(r.reduction, 6) << '\n';
  }
  Artifacts a;
  std::ostringstream csv;
  write_grisvard_csv(csv, reports);
  a.csv = csv.str();
  a.result = json::array();
  for (const auto& r : reports) a.result.push_back(json::parse(to_json(r)));
  return a;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no x");
    std::size_t used = 0;
    const auto a = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing");
    const auto rest = text.substr(x + 1);
    const auto b = std::stoul(rest, &used);
    if (used != rest.size() || a == 0 || b == 0) throw std::invalid_argument("bad");
    return {a, b};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "--grid must look like 20x20, got '" + text + "'");
  }
}

Artifacts cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto task = parse_sweep_task(c.task);
  const auto v = verify_config(c, 1);
  std::vector<SweepPoint> points;
  switch (task) {
    case SweepTask::CorollaryI:
    case SweepTask::CorollaryII:
    case SweepTask::CorollaryIII:
    case SweepTask::Split: {
      const auto [na, nb] = parse_grid(c.grid);
      points = angle_grid(na, nb);
      break;
    }
    case SweepTask::RightTriangle:
      points = c.which == "angles" ? right_triangle_angle_family(c.count.value_or(50))
                                   : right_triangle_leg_family(c.count.value_or(50));
      break;
    case SweepTask::Polygons: points = random_split_polygons(c.count.value_or(100), c.seed); break;
  }

  const auto data = run_sweep(points, task, v, c.threads);
  const auto& s = data.summary;
  out << "sweep " << to_string(task) << ": " << s.rows << " points, " << s.evaluated << " evaluated, "
      << s.skipped << " skipped, " << s.errors << " errors\n";
  out << "hypothesis met: " << s.confirmed << " ConfirmedWithMargin, " << s.consistent
      << " ConsistentWithinError, " << s.violations << " Violation\n";
  if (s.unmet_reports > 0)
    out << "hypothesis not met: " << s.unmet_reports << " reports, " << s.unmet_violations
        << " with lhs > rhs beyond the error budget (no verdict implied)\n";
  if (s.min_margin) out << "smallest margin: " << fmt(*s.min_margin, 6) << '\n';
  for (const auto& row : data.rows)
    if (row.status == "error") err << "point " << row.point.index << ": " << row.message << '\n';

  if (!c.plot_data.empty()) {
    std::ostringstream plot;
    write_plot_csv(plot, data);
    write_file_atomic(c.plot_data, plot.str());
  }

  Artifacts a;
  std::ostringstream csv;
  write_sweep_csv(csv, data);
  a.csv = csv.str();
  a.result = json::parse(to_json(data));
  if (s.violations > 0) a.exit_code = kExitViolation;
  if (data.aborted) {
    const std::string dump = c.output.empty() ? "mixed_spectra_violation.json" : c.output + ".violation.json";
    json doc = {{"config", json::parse(config_to_json(c))}, {"generated_at", timestamp()}, {"state", a.result}};
    write_file_atomic(dump, doc.dump(2) + "\n");
    err << "Violation with the hypothesis met; sweep aborted, state written to " << dump << '\n';
  }
  return a;
}

template <typename T>
void read(const json& j, const char* key, T& value) {
  if (j.contains(key) && !j.at(key).is_null()) value = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j = {{"command", c.command},
            {"geometry", c.geometry},
            {"square", c.square},
            {"angles", c.angles ? json(*c.angles) : json(nullptr)},
            {"dirichlet", c.dirichlet},
            {"neumann_side", c.neumann_side ? json(*c.neumann_side) : json(nullptr)},
            {"which", c.which},
            {"order", c.order},
            {"levels", c.levels},
            {"tol", c.tol},
            {"max_iter", c.max_iter},
            {"max_level", c.max_level},
            {"eps_verdict", c.eps_verdict},
            {"eps_angle", c.eps_angle},
            {"right_angle_tol", c.right_angle_tol},
            {"num_eigs", c.num_eigs},
            {"task", c.task},
            {"grid", c.grid},
            {"count", c.count ? json(*c.count) : json(nullptr)},
            {"seed", c.seed},
            {"threads", c.threads},
            {"output", c.output},
            {"format", c.format},
            {"dump_mesh", c.dump_mesh},
            {"plot_data", c.plot_data}};
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    read(j, "command", c.command);
    read(j, "geometry", c.geometry);
    read(j, "square", c.square);
    if (j.contains("angles") && !j["angles"].is_null()) c.angles = j["angles"].get<std::vector<double>>();
    read(j, "dirichlet", c.dirichlet);
    if (j.contains("neumann_side") && !j["neumann_side"].is_null())
      c.neumann_side = j["neumann_side"].get<std::size_t>();
    read(j, "which", c.which);
    read(j, "order", c.order);
    read(j, "levels", c.levels);
    read(j, "tol", c.tol);
    read(j, "max_iter", c.max_iter);
    read(j, "max_level", c.max_level);
    read(j, "eps_verdict", c.eps_verdict);
    read(j, "eps_angle", c.eps_angle);
    read(j, "right_angle_tol", c.right_angle_tol);
    read(j, "num_eigs", c.num_eigs);
    read(j, "task", c.task);
    read(j, "grid", c.grid);
    if (j.contains("count") && !j["count"].is_null()) c.count = j["count"].get<std::size_t>();
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    read(j, "output", c.output);
    read(j, "format", c.format);
    read(j, "dump_mesh", c.dump_mesh);
    read(j, "plot_data", c.plot_data);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad config field: ") + e.what());
  }
  return c;
}

RunConfig config_from_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + " is not valid JSON: " + e.what());
  }
  if (!doc.contains("config")) throw Error(ErrorCode::ParseError, path + " has no config block");
  return config_from_json(doc.at("config").dump());
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Artifacts a;
    if (c.command == "solve") a = cmd_solve(c, out, false);
    else if (c.command == "convergence") a = cmd_solve(c, out, true);
    else if (c.command == "verify-split") a = cmd_verify_split(c, out);
    else if (c.command == "verify-corollary") a = cmd_verify_corollary(c, out);
    else if (c.command == "verify-right") a = cmd_verify_right(c, out);
    else if (c.command == "verify-voila") a = cmd_verify_voila(c, out);
    else if (c.command == "verify-grisvard") a = cmd_verify_grisvard(c, out);
    else if (c.command == "sweep") a = cmd_sweep(c, out, err);
    else throw Error(ErrorCode::ConfigError, "unknown command '" + c.command + "'");
    write_outputs(c, a);
    return a.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lowest mixed Dirichlet-Neumann Laplace eigenvalues on convex polygons: "
               "solves, inequality verifications and parameter sweeps."};
  app.footer(
      "Commands:\n"
      "  solve             lambda_1 for the given labels (with --num-eigs, up to 5 eigenvalues)\n"
      "  convergence       per-level eigenvalues, observed order and extrapolation\n"
      "  verify-split      Dirichlet on one side vs Dirichlet on all the others\n"
      "  verify-corollary  triangle inequalities i, ii, iii (--which, default all)\n"
      "  verify-right      lambda^S, lambda^M <= lambda^L on a right triangle\n"
      "  verify-voila      Rayleigh quotient of the derivative test function\n"
      "  verify-grisvard   second-derivative identity residual (--which controls for controls)\n"
      "  sweep             parameter sweep (--task)\n"
      "Exit codes: 0 no Violation, 2 Violation with the hypothesis met, 1 operational error.\n"
      "MIXED_SPECTRA_MAX_LEVEL overrides the refinement level cap.");

  RunConfig c;
  std::vector<double> angles;
  std::size_t neumann_side = 0;
  std::size_t count = 0;
  std::string replay;

  app.add_option("command", c.command, "Command to run")->check(CLI::IsMember(kCommands));
  app.add_option("--geometry", c.geometry, "Geometry JSON, inline or a file path");
  app.add_flag("--square", c.square, "Unit square (sides 0 bottom, 1 right, 2 top, 3 left)");
  app.add_option("--angles", angles, "Triangle from two angles in radians")->expected(2);
  app.add_option("--dirichlet", c.dirichlet, "Dirichlet sides: indices \"0,2\", roles \"M+S\", or \"all\"");
  app.add_option("--neumann-side", neumann_side, "Side index carrying the Neumann condition");
  app.add_option("--which", c.which,
                 "Corollary item i|ii|iii|all, cathetus S|M for verify-voila, 'controls' for "
                 "verify-grisvard, 'angles' for the right-triangle sweep family");
  app.add_option("--order", c.order, "Element order P1|P2")->capture_default_str();
  app.add_option("--levels", c.levels, "Refinement levels, \"3..6\" or \"5\"")->capture_default_str();
  app.add_option("--tol", c.tol, "Eigensolver relative residual tolerance")->capture_default_str();
  app.add_option("--max-iter", c.max_iter, "Eigensolver iteration limit")->capture_default_str();
  app.add_option("--max-level", c.max_level, "Refinement level cap")->capture_default_str();
  app.add_option("--eps-verdict", c.eps_verdict, "Verdict slack added to the error budget")
      ->capture_default_str();
  app.add_option("--eps-angle", c.eps_angle, "Strictness slack for acute-angle tests")->capture_default_str();
  app.add_option("--right-angle-tol", c.right_angle_tol, "Tolerance for recognizing a right angle")
      ->capture_default_str();
  app.add_option("--num-eigs", c.num_eigs, "Eigenvalues to compute for solve (1..5)")->capture_default_str();
  app.add_option("--task", c.task,
                 "Sweep task: corollary-i|corollary-ii|corollary-iii|right-triangle|split|polygons")
      ->capture_default_str();
  app.add_option("--grid", c.grid, "Angle grid for triangle sweeps, e.g. 20x20")->capture_default_str();
  app.add_option("--count", count, "Points for the right-triangle (50) and polygons (100) sweeps");
  app.add_option("--seed", c.seed, "Seed for randomized sweeps")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  app.add_option("--output", c.output, "Report file");
  app.add_option("--format", c.format, "Report format csv|json (default from the output extension)");
  app.add_option("--dump-mesh", c.dump_mesh, "Write the finest mesh as JSON (solve, convergence)");
  app.add_option("--plot-data", c.plot_data, "Write alpha,beta,margin,verdict CSV (sweep)");
  app.add_option("--replay", replay, "Rerun the configuration embedded in a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  if (!replay.empty()) {
    RunConfig r;
    try {
      r = config_from_report(replay);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitError;
    }
    // Only artifact destinations may be redirected on replay.
    if (app.count("--output")) r.output = c.output;
    if (app.count("--format")) r.format = c.format;
    if (app.count("--plot-data")) r.plot_data = c.plot_data;
    if (app.count("--dump-mesh")) r.dump_mesh = c.dump_mesh;
    return run(r, out, err);
  }
  if (c.command.empty()) {
    err << "error: a command is required (see --help)\n";
    return kExitError;
  }
  if (app.count("--angles")) c.angles = angles;
  if (app.count("--neumann-side")) c.neumann_side = neumann_side;
  if (app.count("--count")) c.count = count;
  return run(c, out, err);
}

}  // namespace mixed_spectra::cli
