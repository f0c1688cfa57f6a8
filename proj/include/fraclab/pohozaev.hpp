#pragma once

#include <utility>
#include <vector>

#include "fraclab/functionals.hpp"

namespace fraclab {

struct ProjectionResult {
  double theta = 1.0;
  // |J| (or |J_inf|) of the dilated field relative to its kinetic term.
  double residual = 0.0;
  // Same quantity from the rescaled-coefficient formula, free of interpolation error.
  double analytic_residual = 0.0;
  std::pair<double, double> bracket{1.0, 1.0};
  int iterations = 0;
  bool multiple_roots_flag = false;
  bool boundary_warning = false;
  Field field;
};

ProjectionResult project_to_P_inf(const ProblemContext& ctx, const Field& u);

// int ((a + grad a . z / n)(z) F(u) - lambda u^2/2) with z = theta x + (1 - theta) center.
double h_of_theta(const ProblemContext& ctx, const Field& u, double theta, const Point& center);

ProjectionResult project_to_P(const ProblemContext& ctx, const Field& u, const Point& center);

struct ScaledField {
  double alpha = 1.0;
  double residual = 0.0;  // |int G_inf(alpha u) - 1|
  Field field;
};

// Smallest alpha > 0 with int G_inf(alpha u) = 1.
ScaledField scale_to_S_inf(const ProblemContext& ctx, const Field& u);
// Smallest alpha > 0 with int G_inf(alpha u) = level.
ScaledField scale_to_level(const ProblemContext& ctx, const Field& u, double level);
// Newton iteration started at `guess`; falls back to the scan when it fails to stay bracketed.
ScaledField scale_to_S_inf_near(const ProblemContext& ctx, const Field& u, double guess);

struct PhiImage {
  Field field;
  double predicted_energy = 0.0;
  double t_u = 1.0;
  bool support_overflow = false;
};

// Dilation carrying the constraint surface int G_inf = 1 onto the limiting Pohozaev manifold.
PhiImage phi_map(const ProblemContext& ctx, const Field& u_on_S);
double phi_energy(const Params& p, double seminorm_sq_on_S);

struct PathPoint {
  double theta = 0.0;
  double energy = 0.0;
};

// Energy of x -> u((x - center)/theta + center) from the rescaled-coefficient formula.
std::vector<PathPoint> dilation_path_energy(const ProblemContext& ctx, const Field& u,
                                            std::span<const double> thetas, bool autonomous,
                                            const Point& center = {0.0, 0.0, 0.0});
double dilation_energy(const ProblemContext& ctx, const Field& u, double theta, bool autonomous,
                       const Point& center = {0.0, 0.0, 0.0});

struct LevelReport {
  double m_estimate = 0.0;
  double c_inf_estimate = 0.0;
  double theta_at_max = 1.0;
  // smallest power of two with path energy below -m_estimate
  double path_endpoint = 0.0;
  double energy_of_w = 0.0;
  double seminorm_term_of_w = 0.0;  // (s/n) seminorm_sq(w)
  std::vector<double> p_scan;
  std::vector<std::pair<double, double>> theta_scan;
};

// m from the seminorm of the constraint-surface minimizer, c_inf from the
// autonomous dilation path of w.
LevelReport mp_level_estimate(const ProblemContext& ctx, const Field& w, double s_inf_seminorm_sq);

}  // namespace fraclab
