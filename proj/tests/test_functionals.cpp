#include <doctest.h>

#include <numbers>
#include <random>

#include "fraclab/error.hpp"
#include "support.hpp"

using namespace fraclab;
using fraclab::testing::default_context;
using fraclab::testing::gaussian;

namespace {

Field smooth_direction(const SpectralGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  const double c1 = d(rng), c2 = d(rng), x0 = d(rng), y0 = d(rng);
  return Field::from_function(g, [&](const Point& x) {
    const double r2 = (x[0] - x0) * (x[0] - x0) + (x[1] - y0) * (x[1] - y0);
    return c1 * std::exp(-r2 / 8.0) + c2 * x[0] * std::exp(-r2 / 5.0);
  });
}

// central difference of t -> E(u + t v) with one Richardson step
template <class Energy>
double directional(const Energy& E, const Field& u, const Field& v, double h) {
  auto d = [&](double t) { return (E(u + t * v) - E(u - t * v)) / (2.0 * t); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

}  // namespace

TEST_CASE("gradients are the derivatives of the energies") {
  const auto ctx = default_context(64, 24.0);
  const Field u = gaussian(ctx.grid(), 2.2, 1.8, Point{0.7, -0.4, 0.0});
  for (unsigned seed : {1u, 2u, 3u}) {
    const Field v = smooth_direction(ctx.grid(), seed);
    const double dI = directional([&](const Field& f) { return energy_I(ctx, f); }, u, v, 1e-3);
    const double dIinf = directional([&](const Field& f) { return energy_I_inf(ctx, f); }, u, v, 1e-3);
    CHECK(inner(gradient_I(ctx, u), v) == doctest::Approx(dI).epsilon(1e-7));
    CHECK(inner(gradient_I_inf(ctx, u), v) == doctest::Approx(dIinf).epsilon(1e-7));
  }
}

TEST_CASE("energy identities") {
  const auto ctx = default_context(64, 24.0);
  const auto& p = ctx.params();
  const Field u = gaussian(ctx.grid(), 1.5, 2.0);
  const double S = seminorm_sq(ctx, u);
  CHECK(energy_I_inf(ctx, u) == doctest::Approx(0.5 * S + 0.5 * p.lambda * inner(u, u) - p.a_inf * integral_F(ctx, u)));
  CHECK(pohozaev_J_inf(ctx, u) == doctest::Approx(0.5 * (p.n - 2 * p.s) * S - p.n * g_inf_integral(ctx, u)));
  // a <= a_inf, so I >= I_inf on every field
  CHECK(energy_I(ctx, u) > energy_I_inf(ctx, u));
  CHECK(hs_inner(ctx, u, u) == doctest::Approx(hs_norm(ctx, u) * hs_norm(ctx, u)).epsilon(1e-13));

  const auto flat = ctx.with_coeff(CoefficientField{2.0, 0.0, 0.5});
  CHECK(energy_I(flat, u) == doctest::Approx(energy_I_inf(flat, u)).epsilon(1e-14));
  CHECK(pohozaev_J(flat, u) == doctest::Approx(pohozaev_J_inf(flat, u)).epsilon(1e-14));
  CHECK(integral_grad_a_F(flat, u) == 0.0);

  // g_inf density integrates against u to the derivative of int G_inf along u
  const double h = 1e-4;
  const double dG = (g_inf_integral(ctx, (1 + h) * u) - g_inf_integral(ctx, (1 - h) * u)) / (2 * h);
  CHECK(inner(g_inf_density(ctx, u), u) == doctest::Approx(dG).epsilon(1e-7));
  CHECK(energy_I(ctx, Field(ctx.grid())) == 0.0);
}

TEST_CASE("context validation and rebinding") {
  const auto g = make_grid(2, 32, 10.0);
  const auto m = NonlinearityModel::asymptotically_linear();
  auto code = [&](Params p, CoefficientField c, const SpectralGrid& grid) {
    try {
      ProblemContext ctx(grid, p, m, c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  CHECK(code(Params{}, CoefficientField{3.0, 0.5, 0.5}, g) == ErrorCode::invalid_params);
  CHECK(code(Params{}, CoefficientField{2.0, -0.1, 0.5}, g) == ErrorCode::invalid_params);
  CHECK(code(Params{}, CoefficientField{2.0, 0.5, 0.0}, g) == ErrorCode::invalid_params);
  CHECK(code(Params{}, CoefficientField{2.0, 0.5, 0.5}, make_grid(1, 32, 10.0)) == ErrorCode::invalid_params);
  CHECK(code(Params{}, CoefficientField{2.0, 0.0, 0.5}, g) == ErrorCode::io_error);

  const ProblemContext ctx(g, Params{}, m, CoefficientField{});
  CHECK(ctx.a_samples()[0] == doctest::Approx(2.0 - 0.5 / std::sqrt(1.0 + 50.0)));
  CHECK(ctx.frac_symbol()[0] == 0.0);
  CHECK(ctx.riesz_symbol()[0] == 1.0);
  const auto wide = ctx.with_grid(make_grid(2, 32, 20.0));
  CHECK(wide.grid().box_length() == 20.0);
  CHECK(wide.coeff().c == 0.5);
}

TEST_CASE("sharp fractional Sobolev constant") {
  constexpr double pi = std::numbers::pi;
  // s = 1, n = 3: the classical constant 1/(3 (pi/2)^{4/3})
  CHECK(fractional_sobolev_constant(3, 1.0) == doctest::Approx(1.0 / (3.0 * std::pow(pi / 2.0, 4.0 / 3.0))).epsilon(1e-13));
  CHECK(fractional_sobolev_constant(2, 0.5) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));

  // the inequality holds on resolved bumps
  const auto ctx = default_context(128, 40.0);
  for (double w : {0.8, 1.5, 3.0}) {
    const Field u = gaussian(ctx.grid(), 1.0, w);
    const Field u2 = hadamard(u, u);
    const double l4sq = std::sqrt(inner(u2, u2));
    CHECK(l4sq <= fractional_sobolev_constant(2, 0.5) * seminorm_sq(ctx, u));
  }
}

TEST_CASE("constructive bounds") {
  const auto ctx = default_context();
  const auto b = constructive_bounds(ctx);
  CHECK(b.eps == 0.25);
  CHECK(b.p == 4.0);
  CHECK(b.rho > 0.0);
  CHECK(b.sigma_hat > 0.0);
  // below rho the limiting Pohozaev functional is positive
  for (double w : {0.7, 1.5, 3.0}) {
    Field u = gaussian(ctx.grid(), 1.0, w);
    u = (0.9 * b.rho / hs_norm(ctx, u)) * u;
    CHECK(pohozaev_J_inf(ctx, u) > 0.0);
    CHECK(pohozaev_J(ctx, u) > 0.0);
  }
}
