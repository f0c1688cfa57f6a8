#pragma once

#include <cmath>

#include "fraclab/functionals.hpp"

namespace fraclab::testing {

inline Field gaussian(const SpectralGrid& g, double amplitude, double width, const Point& center = {0.0, 0.0, 0.0}) {
  const int n = g.n_dims();
  return Field::from_function(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return amplitude * std::exp(-0.5 * r2 / (width * width));
  });
}

inline ProblemContext default_context(int N = 128, double L = 40.0, double c = 0.5) {
  return ProblemContext(make_grid(2, N, L), Params{}, NonlinearityModel::asymptotically_linear(),
                        CoefficientField{2.0, c, 0.5});
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace fraclab::testing
