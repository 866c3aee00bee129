#pragma once

#include <mixed_spectra/eigensolve.hpp>
#include <mixed_spectra/geometry.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mixed_spectra::test {

inline std::vector<SideLabel> labels_from(const std::string& s) {
  std::vector<SideLabel> out;
  for (char c : s) out.push_back(c == 'D' ? SideLabel::Dirichlet : SideLabel::Neumann);
  return out;
}

inline LabeledPolygon unit_square(const std::string& labels = "DDDD") {
  return make_polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, labels_from(labels));
}

inline LabeledPolygon polygon(std::vector<Point> v, const std::string& labels) {
  return make_polygon(std::move(v), labels_from(labels));
}

inline double lambda_at(const LabeledPolygon& p, int level, Order order = Order::P2) {
  const auto d = build_levels(p, {level, level}, order).front();
  return smallest_eigenpair(d.system(p.labels())).eigenvalue;
}

inline double extrapolated(const LabeledPolygon& p, LevelRange levels = {3, 6}) {
  const auto points = eigen_convergence_study(p, levels, Order::P2);
  return richardson_extrapolate(points).value;
}

/// [0, 1) doubles with a platform-independent bit pattern.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mixed_spectra::test
