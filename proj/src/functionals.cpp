#include "fraclab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fraclab {

namespace {

Field sample_field(const SpectralGrid& grid, double (*fn)(const CoefficientField&, const Point&, int),
                   const CoefficientField& coeff) {
  const int n = grid.n_dims();
  return Field::from_function(grid, [&](const Point& x) { return fn(coeff, x, n); });
}

}  // namespace

ProblemContext::ProblemContext(SpectralGrid grid, Params params, NonlinearityModel model,
                               CoefficientField coeff)
    : grid_(std::move(grid)),
      params_(params),
      model_(model),
      coeff_(coeff),
      a_samples_(grid_),
      grad_a_dot_samples_(grid_) {
  params_.validate();
  if (params_.n != grid_.n_dims())
    throw Error(ErrorCode::invalid_params, "params.n differs from the grid dimension");
  if (coeff_.a_inf != params_.a_inf)
    throw Error(ErrorCode::invalid_params, "coefficient a_inf differs from params.a_inf");
  if (coeff_.c < 0.0 || coeff_.k <= 0.0)
    throw Error(ErrorCode::invalid_params, "coefficient needs c >= 0 and k > 0");
  frac_symbol_ = grid_.symbol(params_.s);
  riesz_symbol_.resize(frac_symbol_.size());
  for (std::size_t m = 0; m < frac_symbol_.size(); ++m)
    riesz_symbol_[m] = 1.0 / (frac_symbol_[m] + params_.lambda);
  a_samples_ = sample_field(grid_, eval_a, coeff_);
  grad_a_dot_samples_ = sample_field(grid_, eval_grad_a_dot, coeff_);
}

ProblemContext ProblemContext::with_grid(SpectralGrid grid) const {
  return ProblemContext(std::move(grid), params_, model_, coeff_);
}

ProblemContext ProblemContext::with_coeff(CoefficientField coeff) const {
  return ProblemContext(grid_, params_, model_, coeff);
}

double seminorm_sq(const ProblemContext& ctx, const Field& u) {
  return spectral_quadratic_form(u, ctx.frac_symbol());
}

double hs_norm(const ProblemContext& ctx, const Field& u) {
  return std::sqrt(seminorm_sq(ctx, u) + ctx.params().lambda * inner(u, u));
}

double hs_inner(const ProblemContext& ctx, const Field& u, const Field& v) {
  require_same_grid(u, v);
  return inner(apply_symbol(u, ctx.frac_symbol()), v) + ctx.params().lambda * inner(u, v);
}

double integral_F(const ProblemContext& ctx, const Field& u) {
  double acc = 0.0;
  for (double v : u.values()) acc += ctx.model().F(v);
  return acc * ctx.grid().cell_volume();
}

double integral_aF(const ProblemContext& ctx, const Field& u) {
  const auto a = ctx.a_samples().values();
  const auto v = u.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += a[i] * ctx.model().F(v[i]);
  return acc * ctx.grid().cell_volume();
}

double integral_grad_a_F(const ProblemContext& ctx, const Field& u) {
  const auto g = ctx.grad_a_dot_samples().values();
  const auto v = u.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += g[i] * ctx.model().F(v[i]);
  return acc * ctx.grid().cell_volume();
}

double g_inf_integral(const ProblemContext& ctx, const Field& u) {
  return ctx.params().a_inf * integral_F(ctx, u) - 0.5 * ctx.params().lambda * inner(u, u);
}

double energy_I_inf(const ProblemContext& ctx, const Field& u) {
  return 0.5 * seminorm_sq(ctx, u) - g_inf_integral(ctx, u);
}

double energy_I(const ProblemContext& ctx, const Field& u) {
  return 0.5 * seminorm_sq(ctx, u) + 0.5 * ctx.params().lambda * inner(u, u) - integral_aF(ctx, u);
}

double pohozaev_J_inf(const ProblemContext& ctx, const Field& u) {
  const auto& p = ctx.params();
  return 0.5 * (p.n - 2.0 * p.s) * seminorm_sq(ctx, u) - p.n * g_inf_integral(ctx, u);
}

double pohozaev_J(const ProblemContext& ctx, const Field& u) {
  const auto& p = ctx.params();
  const double weighted =
      integral_aF(ctx, u) + integral_grad_a_F(ctx, u) / p.n - 0.5 * p.lambda * inner(u, u);
  return 0.5 * (p.n - 2.0 * p.s) * seminorm_sq(ctx, u) - p.n * weighted;
}

Field gradient_I(const ProblemContext& ctx, const Field& u) {
  Field out = apply_symbol(u, ctx.frac_symbol());
  auto o = out.values();
  const auto v = u.values();
  const auto a = ctx.a_samples().values();
  for (std::size_t i = 0; i < v.size(); ++i)
    o[i] += ctx.params().lambda * v[i] - a[i] * ctx.model().f(v[i]);
  return out;
}

Field gradient_I_inf(const ProblemContext& ctx, const Field& u) {
  Field out = apply_symbol(u, ctx.frac_symbol());
  auto o = out.values();
  const auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    o[i] += ctx.params().lambda * v[i] - ctx.params().a_inf * ctx.model().f(v[i]);
  return out;
}

Field g_inf_density(const ProblemContext& ctx, const Field& u) {
  Field out(u.grid());
  auto o = out.values();
  const auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    o[i] = ctx.params().a_inf * ctx.model().f(v[i]) - ctx.params().lambda * v[i];
  return out;
}

double fractional_sobolev_constant(int n, double s) {
  const double pi = std::numbers::pi;
  return std::pow(2.0, -2.0 * s) * std::pow(pi, -s) * std::tgamma(0.5 * (n - 2.0 * s)) /
         std::tgamma(0.5 * (n + 2.0 * s)) *
         std::pow(std::tgamma(static_cast<double>(n)) / std::tgamma(0.5 * n), 2.0 * s / n);
}

ConstructiveBounds constructive_bounds(const ProblemContext& ctx) {
  const auto& p = ctx.params();
  ConstructiveBounds b;
  b.eps = p.lambda / (2.0 * p.a_inf);
  b.p = p.critical_exponent();
  b.C_eps = growth_constant(ctx.model(), b.eps, b.p).C_eps;
  b.sobolev = fractional_sobolev_constant(p.n, p.s);
  // ||u||_p^p <= (K S)^{p/2} <= K^{p/2} ||u||^p
  const double embed = std::pow(b.sobolev, 0.5 * b.p);
  // J_inf(u) >= A ||u||^2 - n a_inf C_eps K^{p/2} ||u||^p, and J >= J_inf for u >= 0
  const double A = std::min(0.5 * (p.n - 2.0 * p.s), 0.5 * p.n * (1.0 - p.a_inf * b.eps / p.lambda));
  const double B = p.n * p.a_inf * b.C_eps * embed;
  b.rho = B > 0.0 ? std::pow(A / B, 1.0 / (b.p - 2.0)) : std::numeric_limits<double>::infinity();
  const double base = (p.n - 2.0 * p.s) / (2.0 * p.n * p.a_inf * b.C_eps * embed);
  b.sigma_hat = std::pow(base, (p.n - 2.0 * p.s) / (2.0 * p.s));
  return b;
}

}  // namespace fraclab
