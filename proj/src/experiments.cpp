#include "fraclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>

#include "fraclab/barycenter.hpp"

namespace fraclab {

namespace {

double core_radius(const Field& w) {
  const auto& g = w.grid();
  const double peak = w.max_abs();
  const auto v = w.values();
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 0.1 * peak) continue;
    const Point x = g.point(i);
    double r2 = 0.0;
    for (int a = 0; a < g.n_dims(); ++a) r2 += x[a] * x[a];
    r = std::max(r, std::sqrt(r2));
  }
  return r;
}

TranslateScanRow scan_row(const ProblemContext& ctx, const Field& w, double radius) {
  const Point y{radius, 0.0, 0.0};
  const Field moved = shift_interpolated(w, y);
  const auto proj = project_to_P(ctx, moved, y);
  TranslateScanRow row;
  row.radius = radius;
  row.theta_y = proj.theta;
  row.I_of_Pi_y = dilation_energy(ctx, moved, proj.theta, false, y);
  row.beta_of_Pi_y = beta(ctx, proj.field).beta;
  row.residual_J = proj.residual;
  row.analytic_residual = proj.analytic_residual;
  row.multiple_roots_flag = proj.multiple_roots_flag;
  row.boundary_warning = proj.boundary_warning;
  return row;
}

}  // namespace

TranslateScan run_translate_scan(const ProblemContext& ctx, const Field& w, std::span<const double> radii) {
  TranslateScan scan;
  scan.core_radius = core_radius(w);
  const double half = 0.5 * ctx.grid().box_length();
  for (double r : radii)
    if (!(r >= 0.0) || r + scan.core_radius > half)
      throw Error(ErrorCode::margin_violation,
                  "radius " + std::to_string(r) + " leaves no half-box margin around the core");

  std::vector<std::future<TranslateScanRow>> jobs;
  jobs.reserve(radii.size());
  for (double r : radii)
    jobs.push_back(std::async(std::launch::async, [&ctx, &w, r] { return scan_row(ctx, w, r); }));
  for (auto& job : jobs) scan.rows.push_back(job.get());
  for (const auto& row : scan.rows) scan.theta_hat = std::max(scan.theta_hat, row.theta_y);
  return scan;
}

A6Report check_A6_bound(const ProblemContext& ctx, const Field& w, double theta_hat, double c_inf,
                        const TranslateScan& scan) {
  const auto& p = ctx.params();
  A6Report rep;
  rep.deficit = ctx.coeff().sup_deficit();
  rep.bound = c_inf * std::pow(theta_hat, -p.n) / (inner(w, w) * ctx.model().C_F());
  rep.hypothesis_met = rep.deficit < rep.bound;
  if (!rep.hypothesis_met) {
    rep.verdict = "hypothesis (A6) unmet";
    return rep;
  }
  for (const auto& row : scan.rows) rep.max_ratio = std::max(rep.max_ratio, row.I_of_Pi_y / c_inf);
  rep.rows_below_two_c_inf = rep.max_ratio < 2.0;
  rep.verdict = rep.rows_below_two_c_inf ? "hypothesis (A6) met; I(Pi[y]) < 2 c_inf on every row"
                                         : "hypothesis (A6) met; some row has I(Pi[y]) >= 2 c_inf";
  return rep;
}

std::string scan_csv(const TranslateScan& scan, int n_dims) {
  std::string out = "radius,theta_y,I_of_Pi_y,beta_of_Pi_y,residual_J\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& row : scan.rows) {
    out += num(row.radius) + "," + num(row.theta_y) + "," + num(row.I_of_Pi_y) + ",";
    for (int a = 0; a < n_dims; ++a) out += (a ? ";" : "") + num(row.beta_of_Pi_y[a]);
    out += "," + num(row.residual_J) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace fraclab
