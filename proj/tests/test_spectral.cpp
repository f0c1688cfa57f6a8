#include <doctest.h>

#include <numbers>
#include <random>

#include "fraclab/error.hpp"
#include "support.hpp"

using namespace fraclab;
using fraclab::testing::gaussian;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_error;
}

Field noise(const SpectralGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  return Field(g, std::move(v));
}

// independent second-order stencil for -Laplacian in 2-D
double fd_error(int N, double L) {
  const auto g = make_grid(2, N, L);
  const Field u = gaussian(g, 1.0, 2.0);
  const Field spectral = fractional_laplacian(u, 1.0);
  const double h = g.spacing();
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      auto at = [&](int a, int b) { return u[static_cast<std::size_t>(((a + N) % N) * N + (b + N) % N)]; };
      const double lap = (4.0 * at(i, j) - at(i + 1, j) - at(i - 1, j) - at(i, j + 1) - at(i, j - 1)) / (h * h);
      worst = std::max(worst, std::abs(lap - spectral[static_cast<std::size_t>(i * N + j)]));
    }
  return worst;
}

}  // namespace

TEST_CASE("grid construction and cell volume") {
  CHECK(make_grid(1, 8, 8.0).cell_volume() == 1.0);
  CHECK(make_grid(2, 128, 40.0).cell_volume() == 0.09765625);
  CHECK(code_of([] { (void)make_grid(1, 7, 8.0); }) == ErrorCode::invalid_size);
  CHECK(code_of([] { (void)make_grid(1, 4, 8.0); }) == ErrorCode::invalid_size);
  CHECK(code_of([] { (void)make_grid(4, 8, 8.0); }) == ErrorCode::invalid_dimension);
  CHECK(code_of([] { (void)make_grid(2, 8, 0.0); }) == ErrorCode::invalid_size);

  const auto g = make_grid(2, 16, 10.0);
  CHECK(g.coordinate(0) == -5.0);
  CHECK(g.coordinate(3) == doctest::Approx(-5.0 + 3 * 10.0 / 16));
  CHECK(g.wavenumber_magnitude()[0] == 0.0);
  CHECK(g.size() == 256);
  CHECK(g.spectrum_size() == 16 * 9);
}

TEST_CASE("fields reject non-finite samples and mixed grids") {
  const auto g = make_grid(1, 8, 8.0);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  CHECK(code_of([&] { Field f(g, bad); }) == ErrorCode::invalid_argument);
  CHECK(code_of([&] { Field f(g, std::vector<double>(7, 0.0)); }) == ErrorCode::invalid_size);
  const Field a(g);
  const Field b(make_grid(1, 8, 9.0));
  CHECK(code_of([&] { (void)(a + b); }) == ErrorCode::grid_mismatch);
}

TEST_CASE("fractional Laplacian on constants and plane waves") {
  const auto g = make_grid(2, 32, 12.0);
  const Field one = Field::from_function(g, [](const Point&) { return 3.0; });
  CHECK(fractional_laplacian(one, 0.5).max_abs() < 1e-14);

  for (double s : {0.25, 0.5, 1.0}) {
    const Field wave = Field::from_function(g, [&](const Point& x) { return std::cos(2.0 * pi * (2.0 * x[0] - x[1]) / 12.0); });
    const double eig = std::pow(std::pow(2.0 * pi / 12.0, 2) * 5.0, s);
    CHECK((fractional_laplacian(wave, s) - eig * Field(wave)).max_abs() < 1e-12);
  }
  CHECK(code_of([&] { (void)fractional_laplacian(one, 1.5); }) == ErrorCode::invalid_argument);
}

TEST_CASE("s = 1 agrees with the five-point Laplacian at second order") {
  const double e1 = fd_error(64, 40.0), e2 = fd_error(128, 40.0), e3 = fd_error(256, 40.0);
  const double rate = std::log2(e2 / e3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rate >= 1.8);
  CHECK(rate <= 2.2);
}

TEST_CASE("seminorm, Parseval and self-adjointness") {
  const auto g = make_grid(2, 64, 20.0);
  CHECK(seminorm_sq(Field(g), 0.5) == 0.0);

  const Field c = Field::from_function(g, [](const Point& x) { return std::cos(2.0 * pi * x[0] / 20.0); });
  for (double s : {0.3, 0.5, 0.9})
    CHECK(seminorm_sq(c, s) == doctest::Approx(std::pow(2.0 * pi / 20.0, 2.0 * s) * inner(c, c)).epsilon(1e-13));

  const Field u = noise(g, 7), v = noise(g, 8);
  const double s = 0.5;
  const Field Lu = fractional_laplacian(u, s);
  CHECK(seminorm_sq(u, s) == doctest::Approx(integrate(hadamard(u, Lu))).epsilon(1e-12));
  CHECK(seminorm_sq(u, s) >= 0.0);
  CHECK(inner(Lu, v) == doctest::Approx(inner(u, fractional_laplacian(v, s))).epsilon(1e-12));
  const std::vector<double> ones(g.spectrum_size(), 1.0);
  CHECK(spectral_quadratic_form(u, ones) == doctest::Approx(inner(u, u)).epsilon(1e-13));

  // semigroup property of the multiplier
  const Field twice = fractional_laplacian(fractional_laplacian(u, 0.2), 0.3);
  CHECK((twice - fractional_laplacian(u, 0.5)).max_abs() < 1e-10 * twice.max_abs());
}

TEST_CASE("integration and the H^s norm") {
  const auto g1 = make_grid(1, 8, 8.0);
  CHECK(integrate(Field::from_function(g1, [](const Point&) { return 1.0; })) == 8.0);
  const Field c = Field::from_function(g1, [](const Point& x) { return std::cos(2.0 * pi * x[0] / 8.0); });
  CHECK(std::abs(integrate(c)) < 1e-14);

  // closed-form Gaussian integral
  for (int n : {1, 2, 3}) {
    const auto g = make_grid(n, n == 3 ? 32 : 64, 24.0);
    const double sigma = 1.7, A = 2.5;
    const double exact = A * std::pow(2.0 * pi * sigma * sigma, 0.5 * n);
    CHECK(std::abs(integrate(gaussian(g, A, sigma)) - exact) / exact < 1e-10);
  }

  const auto g = make_grid(2, 32, 16.0);
  const Params p{2, 0.5, 1.5, 2.0};
  const Field u = gaussian(g, 1.0, 1.5);
  CHECK(hs_norm(u, p) * hs_norm(u, p) == doctest::Approx(seminorm_sq(u, 0.5) + 1.5 * inner(u, u)).epsilon(1e-13));
}

TEST_CASE("lattice translation permutes cells") {
  const auto g = make_grid(2, 32, 16.0);
  const Field u = noise(g, 3);
  const LatticeShift k{3, -5, 0};
  const Field t = translate(u, k);
  // t(x) = u(x - k h): cell (i, j) of u lands on (i + 3, j - 5)
  CHECK(t[static_cast<std::size_t>(3 * 32 + 27)] == u[0]);
  const Field back = translate(t, LatticeShift{-3, 5, 0});
  CHECK((back - u).max_abs() == 0.0);

  const double h = g.spacing();
  CHECK((translate(u, Point{3 * h, -5 * h, 0.0}) - t).max_abs() == 0.0);
  CHECK(code_of([&] { (void)translate(u, Point{0.3 * h, 0.0, 0.0}); }) == ErrorCode::non_lattice_shift);
  // interpolated shift reproduces the lattice one
  CHECK((shift_interpolated(u, Point{3 * h, -5 * h, 0.0}) - t).max_abs() < 1e-12);
}

TEST_CASE("dilation and resampling through the trigonometric interpolant") {
  const auto g = make_grid(2, 128, 40.0);
  const double sigma = 1.6;
  const Field u = gaussian(g, 2.0, sigma);
  CHECK((dilate(u, 1.0, Point{0.0, 0.0, 0.0}).field - u).max_abs() == 0.0);
  for (double theta : {0.8, 1.25, 1.9}) {
    const auto d = dilate(u, theta, Point{0.0, 0.0, 0.0});
    CHECK((d.field - gaussian(g, 2.0, sigma * theta)).max_abs() < 1e-12);
    // share of u^2 outside the central half-box
    const double inside_1d = std::erf(10.0 / (sigma * theta));
    const double outside = 1.0 - inside_1d * inside_1d;
    CHECK(d.support_overflow == (outside > 1e-6));
  }
  // about a center: x -> u((x - c)/theta + c)
  const Point c{1.5, -2.0, 0.0};
  const Field v = gaussian(g, 1.0, sigma, c);
  CHECK((dilate(v, 1.4, c).field - gaussian(g, 1.0, sigma * 1.4, c)).max_abs() < 1e-12);
  CHECK(code_of([&] { (void)dilate(u, 0.0, Point{}); }) == ErrorCode::nonpositive_theta);

  // sub-cell shift of a resolved bump
  const Point y{0.37, -1.11, 0.0};
  CHECK((shift_interpolated(u, y) - gaussian(g, 2.0, sigma, y)).max_abs() < 1e-12);

  const auto coarse = make_grid(2, 64, 40.0);
  CHECK((resample(gaussian(coarse, 2.0, sigma), g) - u).max_abs() < 1e-10);

  const Field r = relabel(u, make_grid(2, 128, 33.0));
  CHECK(r.grid().box_length() == 33.0);
  CHECK(std::equal(r.values().begin(), r.values().end(), u.values().begin()));
  CHECK(code_of([&] { (void)relabel(u, coarse); }) == ErrorCode::grid_mismatch);
}

TEST_CASE("boundary mass") {
  const auto g = make_grid(2, 64, 40.0);
  CHECK(boundary_mass(gaussian(g, 1.0, 1.0)) < 1e-20);
  CHECK(boundary_mass(Field::from_function(g, [](const Point&) { return 1.0; })) ==
        doctest::Approx(1.0 - (31.0 / 64.0) * (31.0 / 64.0)).epsilon(1e-14));
  CHECK(boundary_mass(Field(g)) == 0.0);
}
