#include <doctest.h>

#include <random>

#include "fraclab/barycenter.hpp"
#include "fraclab/error.hpp"
#include "support.hpp"

using namespace fraclab;
using fraclab::testing::gaussian;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_error;
}

// direct average of |u| over the lattice points within distance 1 of cell (i, j)
double ball_average(const Field& u, long i, long j) {
  const auto& g = u.grid();
  const long N = g.points_per_dim();
  const double h = g.spacing();
  const long reach = static_cast<long>(std::ceil(1.0 / h));
  double sum = 0.0;
  long count = 0;
  for (long di = -reach; di <= reach; ++di)
    for (long dj = -reach; dj <= reach; ++dj) {
      if ((di * h) * (di * h) + (dj * h) * (dj * h) > 1.0 + 1e-12) continue;
      const long a = ((i + di) % N + N) % N, b = ((j + dj) % N + N) % N;
      sum += std::abs(u[static_cast<std::size_t>(a * N + b)]);
      ++count;
    }
  return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("local averages") {
  const auto g = make_grid(2, 64, 20.0);
  const Field c = Field::from_function(g, [](const Point&) { return -2.5; });
  CHECK((mu(c) - Field::from_function(g, [](const Point&) { return 2.5; })).max_abs() < 1e-13);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Field u = Field::from_function(g, [&](const Point&) { return d(rng); });
  const Field m = mu(u);
  for (auto [i, j] : {std::pair{0L, 0L}, {5L, 63L}, {31L, 17L}, {40L, 2L}})
    CHECK(m[static_cast<std::size_t>(i * 64 + j)] == doctest::Approx(ball_average(u, i, j)).epsilon(1e-12));
  CHECK((mu(-1.0 * Field(u)) - m).max_abs() < 1e-14);

  const LatticeShift k{4, -9, 0};
  CHECK((mu(translate(u, k)) - translate(m, k)).max_abs() < 1e-13);
}

TEST_CASE("barycenter of centered and moved bumps") {
  const auto g = make_grid(2, 128, 40.0);
  const Field u = gaussian(g, 1.0, 1.5);
  const auto b = beta(u);
  CHECK(std::abs(b.beta[0]) < 1e-12);
  CHECK(std::abs(b.beta[1]) < 1e-12);
  CHECK(b.support_cells > 0);
  CHECK(b.max_mu <= u.max_abs());

  const double h = g.spacing();
  const auto moved = beta(translate(u, LatticeShift{7, -3, 0}));
  CHECK(moved.beta[0] == doctest::Approx(7 * h).epsilon(1e-12));
  CHECK(moved.beta[1] == doctest::Approx(-3 * h).epsilon(1e-12));

  // a wide bump is nearly constant on unit balls
  const Field wide = gaussian(g, 1.0, 6.0);
  CHECK((mu(wide) - wide).max_abs() < 1e-2);

  const Field pair = gaussian(g, 1.0, 1.5, Point{-5.0, 0.0, 0.0}) + gaussian(g, 1.0, 1.5, Point{5.0, 0.0, 0.0});
  const auto bp = beta(pair);
  CHECK(std::abs(bp.beta[0]) < 1e-11);
  CHECK(std::abs(bp.beta[1]) < 1e-12);
}

TEST_CASE("undefined barycenters") {
  const auto g = make_grid(2, 64, 20.0);
  CHECK(code_of([&] { (void)beta(Field(g)); }) == ErrorCode::zero_field);
  CHECK(code_of([&] { (void)beta(Field::from_function(g, [](const Point&) { return 1.0; })); }) ==
        ErrorCode::ambiguous_support);
  // a bump across the periodic seam
  CHECK(code_of([&] { (void)beta(gaussian(g, 1.0, 1.5, Point{-10.0, 0.0, 0.0})); }) == ErrorCode::ambiguous_support);
}
