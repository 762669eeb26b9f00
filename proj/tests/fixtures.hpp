#pragma once

#include <vector>

#include "liesys/spec_file.hpp"
#include "liesys/system.hpp"

namespace fixture {

using namespace liesys;

inline ControlRange finite1(std::vector<double> values) {
  std::vector<Vector> pts;
  for (double v : values) pts.push_back(Vector::Constant(1, v));
  return ControlRange::finite(std::move(pts));
}

inline LinearSystem heisenberg(ControlRange range = ControlRange::symmetric_box(1, 1.0)) {
  SystemSpec s = heisenberg_example_spec();
  LinearSystem sys = build_system(s);
  sys.range = std::move(range);
  return sys;
}

inline LinearSystem aff2(double a, double d, std::vector<double> h, std::vector<double> g,
                         ControlRange range = ControlRange::symmetric_box(1, 0.5)) {
  return make_aff2_system(a, d, std::move(h), std::move(g), std::move(range));
}

inline LinearSystem euclid1(double a, double b, ControlRange range) {
  return make_euclidean_system(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), std::move(range));
}

// The Heisenberg example written directly from its printed chart formula.
inline GroupElement heisenberg_step(const GroupElement& x, double u) {
  return GroupElement{x[0] + x[1] + x[1] * x[1] / 2 + u * x[1] + u * x[2] - u / 2 - u * u / 3, x[1] + u,
                      x[1] + x[2] - u / 2};
}

}  // namespace fixture
