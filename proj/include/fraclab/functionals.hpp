#pragma once

#include <vector>

#include "fraclab/model.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

// Grid, constants, nonlinearity and coefficient of one problem instance, with
// the Fourier symbols and sampled coefficient data every functional needs.
class ProblemContext {
public:
  ProblemContext(SpectralGrid grid, Params params, NonlinearityModel model, CoefficientField coeff);

  [[nodiscard]] const SpectralGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] const NonlinearityModel& model() const noexcept { return model_; }
  [[nodiscard]] const CoefficientField& coeff() const noexcept { return coeff_; }

  // |xi|^(2s)
  [[nodiscard]] std::span<const double> frac_symbol() const noexcept { return frac_symbol_; }
  // 1/(|xi|^(2s) + lambda), the Riesz map of the H^s inner product
  [[nodiscard]] std::span<const double> riesz_symbol() const noexcept { return riesz_symbol_; }
  [[nodiscard]] const Field& a_samples() const noexcept { return a_samples_; }
  [[nodiscard]] const Field& grad_a_dot_samples() const noexcept { return grad_a_dot_samples_; }

  // Same problem on another grid.
  [[nodiscard]] ProblemContext with_grid(SpectralGrid grid) const;
  // Same problem with another coefficient.
  [[nodiscard]] ProblemContext with_coeff(CoefficientField coeff) const;

private:
  SpectralGrid grid_;
  Params params_;
  NonlinearityModel model_;
  CoefficientField coeff_;
  std::vector<double> frac_symbol_;
  std::vector<double> riesz_symbol_;
  Field a_samples_;
  Field grad_a_dot_samples_;
};

double seminorm_sq(const ProblemContext& ctx, const Field& u);
double hs_norm(const ProblemContext& ctx, const Field& u);
// H^s inner product  int (-D)^{s/2}u (-D)^{s/2}v + lambda int u v
double hs_inner(const ProblemContext& ctx, const Field& u, const Field& v);

// int F(u)
double integral_F(const ProblemContext& ctx, const Field& u);
// int a F(u)
double integral_aF(const ProblemContext& ctx, const Field& u);
// int (grad a . x) F(u)
double integral_grad_a_F(const ProblemContext& ctx, const Field& u);

double g_inf_integral(const ProblemContext& ctx, const Field& u);
double energy_I_inf(const ProblemContext& ctx, const Field& u);
double energy_I(const ProblemContext& ctx, const Field& u);
double pohozaev_J_inf(const ProblemContext& ctx, const Field& u);
double pohozaev_J(const ProblemContext& ctx, const Field& u);

// (-D)^s u + lambda u - a f(u), and the same with a = a_inf.
Field gradient_I(const ProblemContext& ctx, const Field& u);
Field gradient_I_inf(const ProblemContext& ctx, const Field& u);

// g_inf(u) = a_inf f(u) - lambda u
Field g_inf_density(const ProblemContext& ctx, const Field& u);

// Sharp constant K in ||u||_{2n/(n-2s)}^2 <= K int |(-D)^{s/2}u|^2 on R^n.
double fractional_sobolev_constant(int n, double s);

// Small-norm positivity radius and the seminorm floor on the constraint
// manifolds, built from sampled growth constants and the Sobolev constant.
struct ConstructiveBounds {
  double eps = 0.0;
  double p = 0.0;
  double C_eps = 0.0;
  double sobolev = 0.0;
  // Both Pohozaev functionals are positive for 0 < hs_norm < rho.
  double rho = 0.0;
  // Seminorm floor for fields on either manifold.
  double sigma_hat = 0.0;
};

ConstructiveBounds constructive_bounds(const ProblemContext& ctx);

}  // namespace fraclab
