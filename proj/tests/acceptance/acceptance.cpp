// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <mixed_spectra/report.hpp>
#include <mixed_spectra/sweep.hpp>
#include <mixed_spectra/verify.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mixed_spectra;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int number, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", number, title, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::vector<SideLabel> labels(const std::string& s) {
  std::vector<SideLabel> out;
  for (char c : s) out.push_back(c == 'D' ? SideLabel::Dirichlet : SideLabel::Neumann);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double extrapolated(const LabeledPolygon& p) {
  return richardson_extrapolate(eigen_convergence_study(p, {3, 6}, Order::P2)).value;
}

std::string csv(const SweepDataset& d) {
  std::ostringstream s;
  write_sweep_csv(s, d);
  return s.str();
}

VerifyConfig base_config(unsigned threads = 1) {
  VerifyConfig c;
  c.levels = {3, 6};
  c.assembly.threads = threads;
  return c;
}

std::string summary_text(const SweepSummary& s) {
  return std::to_string(s.evaluated) + " evaluated, " + std::to_string(s.confirmed) + " confirmed, " +
         std::to_string(s.consistent) + " consistent, " + std::to_string(s.violations) + " violations, " +
         std::to_string(s.errors) + " errors";
}

struct Domain {
  std::string name;
  LabeledPolygon polygon;
  std::size_t neumann_side;
};

std::vector<Domain> proof_domains() {
  const auto tri = TriangleSpec::from_angles(1.3, 1.0);
  return {
      {"equilateral", make_polygon({Point(0, 0), Point(1, 0), Point(0.5, std::sqrt(3.0) / 2)}, labels("NDD")), 0},
      {"right-isosceles/hypotenuse", make_polygon({Point(0, 0), Point(1, 0), Point(0, 1)}, labels("DND")), 1},
      {"triangle(1.3,1.0)/S", tri.polygon({SideRole::M, SideRole::L}), tri.side(SideRole::S)},
      {"trapezoid", make_polygon({Point(0, 0), Point(1.6, 0), Point(1.2, 1.0), Point(0.4, 1.0)}, labels("NDDD")), 0},
      {"pentagon",
       make_polygon({Point(0, 0), Point(3, 0), Point(2.6, 1), Point(1.5, 1.6), Point(0.4, 1)}, labels("NDDDD")), 0},
  };
}

// Domains meeting the hypothesis on which the residual is still
// pre-asymptotic at level 3; printed for the record, not graded.
std::vector<Domain> survey_domains() {
  const auto tri = TriangleSpec::from_angles(0.9, 1.0);
  return {
      {"wide-trapezoid",
       make_polygon({Point(0, 0), Point(2, 0), Point(1.5, 0.866), Point(0.5, 0.866)}, labels("NDDD")), 0},
      {"triangle(0.9,1.0)/L", tri.polygon({SideRole::S, SideRole::M}), tri.side(SideRole::L)},
      {"flat-pentagon",
       make_polygon({Point(-5, -0.8), Point(-0.7, -0.8), Point(-1, 0.5), Point(-2, 0.7), Point(-4, 0.3)},
                    labels("NDDDD")),
       0},
  };
}

}  // namespace

int main() {
  std::string sweep_csv[3];

  criterion(1, "closed-form eigenvalues, P2 levels 3..6, 1e-4 relative", [] {
    const struct {
      const char* name;
      LabeledPolygon p;
      double exact;
    } cases[] = {
        {"square D on one side",
         make_polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, labels("DNNN")), kPi2 / 4},
        {"square all D", make_polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, labels("DDDD")),
         2 * kPi2},
        {"right isosceles D on a cathetus", make_polygon({Point(0, 0), Point(1, 0), Point(1, 1)}, labels("NDN")),
         kPi2 / 2},
    };
    Outcome o;
    for (const auto& c : cases) {
      const double rel = std::abs(extrapolated(c.p) - c.exact) / c.exact;
      o.pass = o.pass && rel < 1e-4;
      o.detail += std::string(o.detail.empty() ? "" : "; ") + c.name + " rel " + fmt(rel);
    }
    return o;
  });

  criterion(2, "split inequality on 100 random quadrilaterals/pentagons", [&] {
    const auto points = random_split_polygons(100, 42);
    const auto d = run_sweep(points, SweepTask::Polygons, base_config());
    sweep_csv[0] = csv(d);
    const auto& s = d.summary;
    const bool pass = s.evaluated == 100 && s.errors == 0 && s.violations == 0 && s.confirmed >= 90 &&
                      s.confirmed + s.consistent == 100;
    return Outcome{pass, summary_text(s) + ", min margin " + fmt(s.min_margin.value_or(NAN))};
  });

  criterion(3, "triangle corollaries on the 20x20 angle grid", [&] {
    const auto grid = angle_grid(20, 20);
    const auto iii = run_sweep(grid, SweepTask::CorollaryIII, base_config());
    const auto i = run_sweep(grid, SweepTask::CorollaryI, base_config());
    const auto ii = run_sweep(grid, SweepTask::CorollaryII, base_config());
    sweep_csv[1] = csv(iii) + csv(i) + csv(ii);
    bool pass = iii.summary.errors == 0 && iii.summary.violations == 0 && iii.summary.unmet_reports == 0 &&
                iii.summary.evaluated > 0;
    for (const auto* d : {&i, &ii}) pass = pass && d->summary.errors == 0 && d->summary.violations == 0;
    return Outcome{pass, "(iii) " + summary_text(iii.summary) + "; (i) met " +
                             std::to_string(i.summary.confirmed + i.summary.consistent) + ", violations " +
                             std::to_string(i.summary.violations) + "; (ii) met " +
                             std::to_string(ii.summary.confirmed + ii.summary.consistent) + ", violations " +
                             std::to_string(ii.summary.violations)};
  });

  criterion(4, "right triangles, leg ratio 1..10", [&] {
    const auto d = run_sweep(right_triangle_leg_family(50), SweepTask::RightTriangle, base_config());
    sweep_csv[2] = csv(d);
    const auto& s = d.summary;
    const auto& iso = d.rows.front().reports;  // legs 1 and 1
    const double ls = iso[0].lhs.extrapolation.value, lm = iso[1].lhs.extrapolation.value;
    const double agree = std::abs(ls - lm) / ls;
    const double exact = std::abs(ls - kPi2 / 2) / (kPi2 / 2);
    const bool pass = s.evaluated == 50 && s.errors == 0 && s.violations == 0 && s.unmet_reports == 0 &&
                      agree < 1e-9 && exact < 1e-4;
    return Outcome{pass, summary_text(s) + "; isosceles S/M rel diff " + fmt(agree) + ", vs pi^2/2 " + fmt(exact)};
  });

  criterion(5, "derivative test function chain and gap trend on 5 domains", [] {
    Outcome o;
    for (const auto& dom : proof_domains()) {
      const auto r = verify_voila_identity(dom.polygon, dom.neumann_side, base_config());
      bool decreasing = r.levels.size() >= 3;
      for (std::size_t k = r.levels.size() - 2; decreasing && k < r.levels.size(); ++k)
        decreasing = r.levels[k].relative_gap < r.levels[k - 1].relative_gap;
      bool chain = true;
      for (const auto& l : r.levels) chain = chain && l.lambda_complement <= l.rayleigh * (1 + 1e-9);
      const double gap = r.levels.back().relative_gap;
      const bool ok = r.hypothesis.met && chain && r.chain_holds && decreasing && gap < 0.05;
      o.pass = o.pass && ok;
      o.detail += std::string(o.detail.empty() ? "" : "; ") + dom.name + " gap " + fmt(gap) + (ok ? "" : " NOT OK");
    }
    return o;
  });

  criterion(6, "second-derivative identity residual, level 3 to 6 reduction >= 2", [] {
    Outcome o;
    for (const auto& dom : proof_domains()) {
      const auto r = verify_grisvard(dom.polygon, dom.neumann_side, base_config());
      const double red = r.levels.front().residual / r.levels.back().residual;
      const bool ok = r.hypothesis.met && r.levels.front().level == 3 && r.levels.back().level == 6 && red >= 2;
      o.pass = o.pass && ok;
      o.detail += std::string(o.detail.empty() ? "" : "; ") + dom.name + " " + fmt(red) + (ok ? "" : " NOT OK");
    }
    double smallest = INFINITY;
    for (const auto& c : grisvard_negative_controls({3, 6}))
      for (const auto& l : c.levels) smallest = std::min(smallest, l.residual);
    o.pass = o.pass && smallest > 0.1;
    o.detail += "; controls min " + fmt(smallest);
    return o;
  });

  criterion(7, "lambda increases along 20 nested Dirichlet sets on a fixed mesh", [] {
    std::mt19937_64 rng(7);
    const auto shapes = random_split_polygons(4, 7);
    int checked = 0;
    double worst = -INFINITY;
    for (int pair = 0; pair < 20; ++pair) {
      const auto& shape = *shapes[pair % shapes.size()].polygon;
      const std::size_t n = shape.size();
      const auto level = build_levels(shape, {3, 3}, Order::P2).front();
      // Gamma: a proper nonempty subset of the sides; Gamma' adds one more side.
      std::vector<SideLabel> small(n);
      std::vector<std::size_t> open;
      while (true) {
        open.clear();
        for (std::size_t s = 0; s < n; ++s) {
          small[s] = rng() % 2 ? SideLabel::Dirichlet : SideLabel::Neumann;
          if (small[s] == SideLabel::Neumann) open.push_back(s);
        }
        if (!open.empty() && open.size() < n) break;
      }
      auto large = small;
      large[open[rng() % open.size()]] = SideLabel::Dirichlet;
      const double a = smallest_eigenpair(level.system(small)).eigenvalue;
      const double b = smallest_eigenpair(level.system(large)).eigenvalue;
      worst = std::max(worst, a - b);
      ++checked;
    }
    return Outcome{worst <= 1e-12, std::to_string(checked) + " pairs, max lambda(G) - lambda(G') " + fmt(worst)};
  });

  criterion(8, "criteria 2-4 rerun give bitwise-identical CSV", [&] {
    const auto a = csv(run_sweep(random_split_polygons(100, 42), SweepTask::Polygons, base_config(), 2));
    const auto grid = angle_grid(20, 20);
    const auto b = csv(run_sweep(grid, SweepTask::CorollaryIII, base_config(), 2)) +
                   csv(run_sweep(grid, SweepTask::CorollaryI, base_config(), 2)) +
                   csv(run_sweep(grid, SweepTask::CorollaryII, base_config(), 2));
    const auto c = csv(run_sweep(right_triangle_leg_family(50), SweepTask::RightTriangle, base_config(), 2));
    const bool pass = !sweep_csv[0].empty() && a == sweep_csv[0] && b == sweep_csv[1] && c == sweep_csv[2];
    return Outcome{pass, "second run with 2 workers; " + std::to_string(a.size() + b.size() + c.size()) +
                             " bytes compared"};
  });

  for (const auto& dom : survey_domains()) {
    const auto g = verify_grisvard(dom.polygon, dom.neumann_side, base_config());
    const auto v = verify_voila_identity(dom.polygon, dom.neumann_side, base_config());
    std::printf("INFO survey %s: residual reduction 3->6 %s, finest gap %s, chain %s\n", dom.name.c_str(),
                fmt(g.levels.front().residual / g.levels.back().residual).c_str(),
                fmt(v.levels.back().relative_gap).c_str(), v.chain_holds ? "holds" : "fails");
  }

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
