#include "mixed_spectra/report.hpp"

#include "mixed_spectra/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mixed_spectra {

namespace {

using nlohmann::json;

// Fields never contain a double quote; quote anything holding a separator.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

std::string optional_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string join_levels(const EigenEstimate& e, double ConvergencePoint::*field) {
  std::string out;
  for (const auto& p : e.levels) {
    if (!out.empty()) out += ';';
    out += format_double(p.*field);
  }
  return out;
}

std::string join_level_numbers(const EigenEstimate& e) {
  std::string out;
  for (const auto& p : e.levels) {
    if (!out.empty()) out += ';';
    out += std::to_string(p.level);
  }
  return out;
}

std::string vertices_field(const std::vector<Point>& v) {
  std::string out;
  for (const auto& p : v) {
    if (!out.empty()) out += ';';
    out += format_double(p.x()) + ' ' + format_double(p.y());
  }
  return out;
}

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

json vertices_json(const std::vector<Point>& v) {
  json out = json::array();
  for (const auto& p : v) out.push_back(point_json(p));
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json extrapolation_json(const Extrapolation& e) {
  return {{"value", e.value},
          {"order", optional_json(e.order)},
          {"error_estimate", e.error_estimate},
          {"degraded", e.degraded}};
}

json convergence_json(const ConvergencePoint& p) {
  return {{"level", p.level},         {"h", p.h},
          {"eigenvalue", p.eigenvalue}, {"residual", p.residual},
          {"iterations", p.iterations}, {"free_dofs", p.free_dofs}};
}

json estimate_json(const EigenEstimate& e) {
  json labels = json::array();
  for (auto l : e.labels) labels.push_back(std::string(1, to_char(l)));
  json levels = json::array();
  for (const auto& p : e.levels) levels.push_back(convergence_json(p));
  return {{"label", e.label},
          {"labels", labels},
          {"levels", levels},
          {"extrapolation", extrapolation_json(e.extrapolation)}};
}

json hypothesis_json(const Hypothesis& h) {
  return {{"status", h.met ? "Met" : "NotMet"}, {"reason", h.reason}};
}

json report_json(const VerificationReport& r) {
  return {{"check", r.check},
          {"vertices", vertices_json(r.vertices)},
          {"hypothesis", hypothesis_json(r.hypothesis)},
          {"lhs", estimate_json(r.lhs)},
          {"rhs", estimate_json(r.rhs)},
          {"margin", r.margin},
          {"error_budget", r.error_budget},
          {"verdict", to_string(r.verdict)},
          {"error_model", "Richardson error estimates; not a rigorous enclosure"}};
}

void write_report_row(std::ostream& out, const std::string& task, std::size_t row, const SweepPoint* point,
                      const std::string& status, const VerificationReport& r) {
  out << csv_field(task) << ',' << row << ',';
  if (point) {
    out << point->i << ',' << point->j << ',' << format_double(point->alpha) << ','
        << format_double(point->beta);
  } else {
    out << ",,,";
  }
  const auto& le = r.lhs.extrapolation;
  const auto& re = r.rhs.extrapolation;
  out << ',' << csv_field(r.check) << ',' << status << ',' << csv_field(vertices_field(r.vertices)) << ','
      << (r.hypothesis.met ? "Met" : "NotMet") << ',' << csv_field(r.hypothesis.reason) << ','
      << csv_field(r.lhs.label) << ',' << csv_field(r.rhs.label) << ',' << join_level_numbers(r.lhs) << ','
      << join_levels(r.lhs, &ConvergencePoint::h) << ',' << join_levels(r.lhs, &ConvergencePoint::eigenvalue)
      << ',' << join_levels(r.rhs, &ConvergencePoint::eigenvalue) << ',' << format_double(le.value) << ','
      << format_double(le.error_estimate) << ',' << optional_double(le.order) << ','
      << format_double(re.value) << ',' << format_double(re.error_estimate) << ','
      << optional_double(re.order) << ',' << format_double(r.margin) << ','
      << format_double(r.error_budget) << ',' << to_string(r.verdict) << '\n';
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "double formatting failed");
  return std::string(buf, ptr);
}

std::string verification_csv_header() {
  return "task,row,grid_i,grid_j,param_a,param_b,check,status,vertices,hypothesis,hypothesis_reason,"
         "lhs_label,rhs_label,levels,h,lhs_levels,rhs_levels,lhs_extrapolated,lhs_error,lhs_order,"
         "rhs_extrapolated,rhs_error,rhs_order,margin,error_budget,verdict";
}

void write_verification_csv(std::ostream& out, std::span<const VerificationReport> reports,
                            const std::string& task) {
  out << verification_csv_header() << '\n';
  for (std::size_t k = 0; k < reports.size(); ++k)
    write_report_row(out, task.empty() ? reports[k].check : task, k, nullptr, "ok", reports[k]);
}

void write_sweep_csv(std::ostream& out, const SweepDataset& data) {
  out << verification_csv_header() << '\n';
  const std::string task = to_string(data.task);
  for (const auto& row : data.rows) {
    if (row.status == "skipped") continue;
    if (row.reports.empty()) {
      out << task << ',' << row.point.index << ',' << row.point.i << ',' << row.point.j << ','
          << format_double(row.point.alpha) << ',' << format_double(row.point.beta) << ",," << row.status
          << ",," << ',' << csv_field(row.message) << std::string(15, ',') << '\n';
      continue;
    }
    for (const auto& r : row.reports) write_report_row(out, task, row.point.index, &row.point, row.status, r);
  }
}

void write_plot_csv(std::ostream& out, const SweepDataset& data) {
  out << "alpha,beta,margin,verdict\n";
  for (const auto& row : data.rows) {
    out << format_double(row.point.alpha) << ',' << format_double(row.point.beta) << ','
        << optional_double(row.status == "ok" ? row.margin() : std::nullopt) << ',' << row.verdict() << '\n';
  }
}

void write_voila_csv(std::ostream& out, std::span<const VoilaReport> reports) {
  out << "check,vertices,hypothesis,gamma,target,level,h,lambda_gamma,lambda_complement,rayleigh,"
         "relative_gap,chain_holds,gap_decreasing\n";
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      out << r.check << ',' << csv_field(vertices_field(r.vertices)) << ','
          << (r.hypothesis.met ? "Met" : "NotMet") << ',' << csv_field(r.gamma_label) << ','
          << csv_field(r.target_label) << ',' << l.level << ',' << format_double(l.h) << ','
          << format_double(l.lambda_gamma) << ',' << format_double(l.lambda_complement) << ','
          << format_double(l.rayleigh) << ',' << format_double(l.relative_gap) << ','
          << (r.chain_holds ? "true" : "false") << ',' << (r.gap_decreasing ? "true" : "false") << '\n';
    }
  }
}

void write_grisvard_csv(std::ostream& out, std::span<const GrisvardReport> reports) {
  out << "check,vertices,hypothesis,gamma,level,h,eigenvalue,residual,reduction\n";
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      out << csv_field(r.check) << ',' << csv_field(vertices_field(r.vertices)) << ','
          << (r.hypothesis.met ? "Met" : "NotMet") << ',' << csv_field(r.gamma_label) << ',' << l.level
          << ',' << format_double(l.h) << ',' << format_double(l.eigenvalue) << ','
          << format_double(l.residual) << ',' << format_double(r.reduction) << '\n';
    }
  }
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> points,
                           const std::optional<Extrapolation>& e) {
  out << "level,h,eigenvalue,residual,iterations,free_dofs\n";
  for (const auto& p : points) {
    out << p.level << ',' << format_double(p.h) << ',' << format_double(p.eigenvalue) << ','
        << format_double(p.residual) << ',' << p.iterations << ',' << p.free_dofs << '\n';
  }
  if (e) {
    out << "extrapolated,0," << format_double(e->value) << ',' << format_double(e->error_estimate) << ','
        << optional_double(e->order) << ',' << (e->degraded ? "degraded" : "") << '\n';
  }
}

std::string to_json(const VerificationReport& r) { return report_json(r).dump(); }

std::string to_json(const VoilaReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"level", l.level},
                      {"h", l.h},
                      {"lambda_gamma", l.lambda_gamma},
                      {"lambda_complement", l.lambda_complement},
                      {"rayleigh", l.rayleigh},
                      {"relative_gap", l.relative_gap}});
  json doc = {{"check", r.check},
              {"vertices", vertices_json(r.vertices)},
              {"hypothesis", hypothesis_json(r.hypothesis)},
              {"gamma", r.gamma_label},
              {"target", r.target_label},
              {"levels", levels},
              {"chain_holds", r.chain_holds},
              {"chain_tolerance", r.chain_tolerance},
              {"gap_decreasing", r.gap_decreasing},
              {"trend_thresholds", "engineering choices"}};
  return doc.dump();
}

std::string to_json(const GrisvardReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"level", l.level}, {"h", l.h}, {"eigenvalue", l.eigenvalue}, {"residual", l.residual}});
  json doc = {{"check", r.check},
              {"vertices", vertices_json(r.vertices)},
              {"hypothesis", hypothesis_json(r.hypothesis)},
              {"gamma", r.gamma_label},
              {"levels", levels},
              {"reduction", r.reduction}};
  return doc.dump();
}

std::string to_json(const SweepDataset& data) {
  json rows = json::array();
  for (const auto& row : data.rows) {
    json reports = json::array();
    for (const auto& r : row.reports) reports.push_back(report_json(r));
    rows.push_back({{"index", row.point.index},
                    {"grid", {row.point.i, row.point.j}},
                    {"params", {row.point.alpha, row.point.beta}},
                    {"status", row.status},
                    {"message", row.message},
                    {"margin", optional_json(row.margin())},
                    {"verdict", row.verdict()},
                    {"reports", reports}});
  }
  const auto& s = data.summary;
  json summary = {{"rows", s.rows},
                  {"evaluated", s.evaluated},
                  {"skipped", s.skipped},
                  {"errors", s.errors},
                  {"aborted", s.aborted},
                  {"confirmed", s.confirmed},
                  {"consistent", s.consistent},
                  {"violations", s.violations},
                  {"unmet_reports", s.unmet_reports},
                  {"unmet_violations", s.unmet_violations},
                  {"min_margin", optional_json(s.min_margin)}};
  json doc = {{"task", to_string(data.task)}, {"aborted", data.aborted}, {"summary", summary}, {"rows", rows}};
  return doc.dump();
}

std::string to_json(std::span<const ConvergencePoint> points, const std::optional<Extrapolation>& e) {
  json levels = json::array();
  for (const auto& p : points) levels.push_back(convergence_json(p));
  json doc = {{"levels", levels}, {"extrapolation", e ? extrapolation_json(*e) : json(nullptr)}};
  return doc.dump();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace mixed_spectra
