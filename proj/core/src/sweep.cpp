#include "mixed_spectra/sweep.hpp"

#include "mixed_spectra/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace mixed_spectra {

namespace {

constexpr double kPi = std::numbers::pi;

// mt19937_64 output is specified by the standard; the distributions are not.
class UnitRandom {
 public:
  explicit UnitRandom(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

int severity(Verdict v) {
  switch (v) {
    case Verdict::ConfirmedWithMargin: return 0;
    case Verdict::ConsistentWithinError: return 1;
    case Verdict::Violation: return 2;
  }
  return 2;
}

std::vector<VerificationReport> evaluate(const SweepPoint& p, SweepTask task, const VerifyConfig& config) {
  std::vector<VerificationReport> out;
  if (task == SweepTask::Polygons) {
    if (!p.polygon) throw Error(ErrorCode::ConfigError, "polygon sweep point without a polygon");
    out.push_back(verify_split(*p.polygon, p.neumann_side, config));
    return out;
  }
  if (!p.triangle) throw Error(ErrorCode::ConfigError, "triangle sweep point without a triangle");
  const TriangleSpec& t = *p.triangle;
  switch (task) {
    case SweepTask::CorollaryI: out.push_back(verify_triangle_corollary(t, CorollaryItem::I, config)); break;
    case SweepTask::CorollaryII: out.push_back(verify_triangle_corollary(t, CorollaryItem::II, config)); break;
    case SweepTask::CorollaryIII: out.push_back(verify_triangle_corollary(t, CorollaryItem::III, config)); break;
    case SweepTask::RightTriangle: {
      auto pair = verify_right_triangle(t, config);
      out.push_back(std::move(pair[0]));
      out.push_back(std::move(pair[1]));
      break;
    }
    case SweepTask::Split: {
      const auto poly = t.polygon({SideRole::S, SideRole::M, SideRole::L});
      for (std::size_t s = 0; s < 3; ++s) out.push_back(verify_split(poly, s, config));
      break;
    }
    case SweepTask::Polygons: break;
  }
  return out;
}

}  // namespace

const char* to_string(SweepTask task) noexcept {
  switch (task) {
    case SweepTask::CorollaryI: return "corollary-i";
    case SweepTask::CorollaryII: return "corollary-ii";
    case SweepTask::CorollaryIII: return "corollary-iii";
    case SweepTask::RightTriangle: return "right-triangle";
    case SweepTask::Split: return "split";
    case SweepTask::Polygons: return "polygons";
  }
  return "?";
}

SweepTask parse_sweep_task(std::string_view text) {
  for (auto t : {SweepTask::CorollaryI, SweepTask::CorollaryII, SweepTask::CorollaryIII,
                 SweepTask::RightTriangle, SweepTask::Split, SweepTask::Polygons})
    if (text == to_string(t)) return t;
  throw Error(ErrorCode::ParseError, "unknown sweep task '" + std::string(text) + "'");
}

std::vector<SweepPoint> angle_grid(std::size_t n_alpha, std::size_t n_beta, double lo, double hi,
                                   double min_gamma) {
  std::vector<SweepPoint> out;
  out.reserve(n_alpha * n_beta);
  for (std::size_t i = 0; i < n_alpha; ++i) {
    for (std::size_t j = 0; j < n_beta; ++j) {
      SweepPoint p;
      p.index = out.size();
      p.i = i;
      p.j = j;
      p.alpha = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n_alpha);
      p.beta = lo + (hi - lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(n_beta);
      if (!(kPi - p.alpha - p.beta > min_gamma)) {
        p.skip_reason = "alpha + beta >= pi - " + std::to_string(min_gamma);
      } else {
        p.triangle = TriangleSpec::from_angles(p.alpha, p.beta);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<SweepPoint> right_triangle_angle_family(std::size_t count, double beta_lo, double beta_hi) {
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < count; ++k) {
    SweepPoint p;
    p.index = p.i = k;
    p.alpha = kPi / 2;
    p.beta = beta_lo + (beta_hi - beta_lo) * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
    p.triangle = TriangleSpec::from_angles(p.alpha, p.beta);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SweepPoint> right_triangle_leg_family(std::size_t count, double ratio_lo, double ratio_hi) {
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < count; ++k) {
    SweepPoint p;
    p.index = p.i = k;
    p.alpha = count > 1 ? ratio_lo + (ratio_hi - ratio_lo) * static_cast<double>(k) /
                                         static_cast<double>(count - 1)
                        : ratio_lo;
    p.triangle = TriangleSpec::from_vertices(Point(0, 0), Point(1, 0), Point(0, p.alpha));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SweepPoint> random_split_polygons(std::size_t count, std::uint64_t seed,
                                              const RandomPolygonOptions& options) {
  UnitRandom uniform(seed);
  std::vector<SweepPoint> out;
  const std::size_t span = options.max_vertices - options.min_vertices + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = options.min_vertices + k % span;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100000) throw Error(ErrorCode::Internal, "random polygon generation stalled");
      std::vector<double> theta(n);
      for (auto& t : theta) t = 2.0 * kPi * uniform();
      std::sort(theta.begin(), theta.end());
      std::vector<Point> pts;
      for (const double t : theta) {
        const double r = 1.0 + 0.25 * (2.0 * uniform() - 1.0);
        pts.emplace_back(r * std::cos(t), r * std::sin(t));
      }
      const double pick = uniform();

      std::optional<LabeledPolygon> poly;
      try {
        poly = make_polygon(pts, std::vector<SideLabel>(n, SideLabel::Dirichlet));
      } catch (const Error&) {
        continue;
      }
      bool ok = true;
      double shortest = INFINITY;
      double longest = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        ok = ok && poly->interior_angle(v) >= options.min_interior_angle;
        shortest = std::min(shortest, poly->side_length(v));
        longest = std::max(longest, poly->side_length(v));
      }
      if (!ok || shortest < options.min_side_ratio * longest) continue;

      std::vector<std::size_t> candidates;
      for (std::size_t s = 0; s < n; ++s) {
        const double limit = kPi / 2 - options.junction_margin;
        if (poly->interior_angle(s) < limit && poly->interior_angle(s + 1) < limit)
          candidates.push_back(s);
      }
      if (candidates.empty()) continue;
      const std::size_t side =
          candidates[std::min(candidates.size() - 1, static_cast<std::size_t>(pick * static_cast<double>(candidates.size())))];

      std::vector<SideLabel> labels(n, SideLabel::Dirichlet);
      labels[side] = SideLabel::Neumann;
      SweepPoint p;
      p.index = p.i = k;
      p.alpha = static_cast<double>(n);
      p.beta = static_cast<double>(side);
      p.polygon = poly->with_labels(std::move(labels));
      p.neumann_side = side;
      out.push_back(std::move(p));
      break;
    }
  }
  return out;
}

std::optional<double> SweepRow::margin() const {
  std::optional<double> met;
  std::optional<double> any;
  for (const auto& r : reports) {
    any = any ? std::min(*any, r.margin) : r.margin;
    if (r.hypothesis.met) met = met ? std::min(*met, r.margin) : r.margin;
  }
  return met ? met : any;
}

std::string SweepRow::verdict() const {
  if (status != "ok") return status;
  std::optional<Verdict> worst;
  for (const auto& r : reports) {
    if (!r.hypothesis.met) continue;
    if (!worst || severity(r.verdict) > severity(*worst)) worst = r.verdict;
  }
  return worst ? to_string(*worst) : "NotMet";
}

SweepSummary summarize(std::span<const SweepRow> rows) {
  SweepSummary s;
  s.rows = rows.size();
  for (const auto& row : rows) {
    if (row.status == "skipped") ++s.skipped;
    else if (row.status == "error") ++s.errors;
    else if (row.status == "aborted") ++s.aborted;
    else ++s.evaluated;
    for (const auto& r : row.reports) {
      if (!r.hypothesis.met) {
        ++s.unmet_reports;
        if (r.verdict == Verdict::Violation) ++s.unmet_violations;
        continue;
      }
      switch (r.verdict) {
        case Verdict::ConfirmedWithMargin: ++s.confirmed; break;
        case Verdict::ConsistentWithinError: ++s.consistent; break;
        case Verdict::Violation: ++s.violations; break;
      }
      s.min_margin = s.min_margin ? std::min(*s.min_margin, r.margin) : r.margin;
    }
  }
  return s;
}

SweepDataset run_sweep(std::span<const SweepPoint> points, SweepTask task, const VerifyConfig& config,
                       unsigned threads) {
  SweepDataset data;
  data.task = task;
  data.rows.resize(points.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= points.size()) return;
      SweepRow& row = data.rows[k];
      row.point = points[k];
      if (!points[k].skip_reason.empty()) {
        row.status = "skipped";
        row.message = points[k].skip_reason;
        continue;
      }
      if (stop.load()) {
        row.status = "aborted";
        continue;
      }
      try {
        row.reports = evaluate(points[k], task, config);
        row.status = "ok";
        for (const auto& r : row.reports)
          if (r.is_counterexample()) stop.store(true);
      } catch (const Error& e) {
        row.status = "error";
        row.message = e.what();
      }
    }
  };

  const unsigned n = std::max(1U, threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  data.aborted = stop.load();
  data.summary = summarize(data.rows);
  return data;
}

}  // namespace mixed_spectra
