#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fraclab/pohozaev.hpp"

namespace fraclab {

enum class StepRule { fixed, adaptive_two_point };

struct InitSpec {
  enum class Kind { gaussian, file };
  Kind kind = Kind::gaussian;
  // Gaussian exp(-|x|^2/(2 width^2)); width <= 0 selects L/10.
  double width = 0.0;
  // amplitude <= 0 selects the amplitude with int G_inf = 2.
  double amplitude = 0.0;
  std::string path;
};

struct SolverOptions {
  int max_iters = 4000;
  // relative H^s residual of the Euler-Lagrange equation
  double grad_tol = 1e-6;
  StepRule step_rule = StepRule::adaptive_two_point;
  double fixed_step = 0.25;
  InitSpec init;
  int max_box_updates = 16;
};

struct GroundState {
  Field field;
  double energy = 0.0;
  double el_residual = 0.0;
  double pohozaev_residual = 0.0;
  double negative_mass = 0.0;
  double boundary_mass = 0.0;
  double symmetry_defect = 0.0;
  bool converged = false;
  int iterations = 0;
  int box_updates = 0;
  // Seminorm of the minimizer on int G_inf = 1 and the box it was computed on.
  double s_inf_seminorm_sq = 0.0;
  double constraint_box = 0.0;
  double multiplier = 0.0;
  LatticeShift recenter_shift{0, 0, 0};
  // Accepted seminorm values of the final constrained descent.
  std::vector<double> objective_history;
  std::string status;
};

Field initial_guess(const ProblemContext& ctx, const InitSpec& init);

GroundState solve_ground_state_limit(const ProblemContext& ctx, const SolverOptions& opts);

struct NonautonomousReport {
  Field field;
  double energy = 0.0;
  double el_residual = 0.0;
  // |J|/(n |I|)
  double pohozaev_residual = 0.0;
  double negative_mass = 0.0;
  double boundary_mass = 0.0;
  bool converged = false;
  bool above_c_inf = false;
  int iterations = 0;
  std::string outcome;
};

NonautonomousReport solve_nonautonomous(const ProblemContext& ctx, const Field& init,
                                        const SolverOptions& opts,
                                        double c_inf = std::numeric_limits<double>::quiet_NaN());

// Largest relative deviation of w from its images under axis reflections and axis swaps.
double symmetry_defect(const Field& w);
double negative_mass(const Field& w);
// ||P^{-1} grad|| in H^s divided by ||u|| in H^s, P = (-D)^s + lambda.
double relative_dual_residual(const ProblemContext& ctx, const Field& gradient, const Field& u);

}  // namespace fraclab
