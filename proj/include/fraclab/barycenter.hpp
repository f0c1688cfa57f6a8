#pragma once

#include "fraclab/functionals.hpp"

namespace fraclab {

struct BarycenterReport {
  Point beta{0.0, 0.0, 0.0};
  double max_mu = 0.0;
  long support_cells = 0;
};

// Average of |u| over the unit ball around each point; the sampled ball is
// normalized by its own cell count.
Field mu(const Field& u);
Field mu(const ProblemContext& ctx, const Field& u);

// Center of mass of max(mu - max(mu)/2, 0) in the box-centered chart.
BarycenterReport beta(const Field& u);
BarycenterReport beta(const ProblemContext& ctx, const Field& u);

}  // namespace fraclab
