#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fraclab/solver.hpp"

namespace fraclab {

struct TranslateScanRow {
  double radius = 0.0;
  double theta_y = 0.0;
  double I_of_Pi_y = 0.0;
  Point beta_of_Pi_y{0.0, 0.0, 0.0};
  // |J(Pi[y])| relative to its kinetic term, from the interpolated field
  double residual_J = 0.0;
  double analytic_residual = 0.0;
  bool multiple_roots_flag = false;
  bool boundary_warning = false;
};

struct TranslateScan {
  std::vector<TranslateScanRow> rows;
  double theta_hat = 0.0;
  // radius of {w >= max w / 10} about the box center
  double core_radius = 0.0;
};

// Pi[y](x) = w((x - y)/theta_y) with y = r e_1, projected onto the nonautonomous
// manifold by dilation about y. Radii run in parallel.
TranslateScan run_translate_scan(const ProblemContext& ctx, const Field& w, std::span<const double> radii);

struct A6Report {
  // c_inf theta_hat^{-n} ||w||_2^{-2} / C_F
  double bound = 0.0;
  double deficit = 0.0;  // sup |a_inf - a|
  bool hypothesis_met = false;
  // max I(Pi[y]) / c_inf over the scan; only meaningful when the hypothesis holds
  double max_ratio = 0.0;
  bool rows_below_two_c_inf = false;
  std::string verdict;
};

A6Report check_A6_bound(const ProblemContext& ctx, const Field& w, double theta_hat, double c_inf,
                        const TranslateScan& scan);

// Columns: radius, theta_y, I_of_Pi_y, beta_of_Pi_y (components joined by ';'), residual_J.
std::string scan_csv(const TranslateScan& scan, int n_dims);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fraclab
