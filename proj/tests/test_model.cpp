#include <doctest.h>

#include <functional>

#include "fraclab/error.hpp"
#include "fraclab/model.hpp"

using namespace fraclab;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 1e-15 * std::abs(whole) + 1e-300)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, depth - 1) + simpson(f, m, b, fm, frm, fb, right, depth - 1);
}

double integral(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 40);
}

}  // namespace

TEST_CASE("primitive and Q agree with quadrature of f") {
  const auto m = NonlinearityModel::asymptotically_linear();
  for (double s : {1e-3, 0.05, 0.3, 1.0, 2.5, 10.0, 200.0}) {
    const double F = integral([&](double t) { return m.f(t); }, 0.0, s);
    CHECK(m.F(s) == doctest::Approx(F).epsilon(1e-10));
    CHECK(m.Q(s) == doctest::Approx(0.5 * m.f(s) * s - m.F(s)).epsilon(1e-9));
    CHECK(m.f(s) == doctest::Approx(s * s * s / (1.0 + s * s)).epsilon(1e-15));
  }
  for (double s : {-3.0, -1e-8, 0.0}) {
    CHECK(m.f(s) == 0.0);
    CHECK(m.F(s) == 0.0);
    CHECK(m.Q(s) == 0.0);
  }
}

TEST_CASE("small arguments keep full relative precision") {
  const auto m = NonlinearityModel::asymptotically_linear();
  for (double s : {1e-6, 1e-4, 1e-2, 0.2}) {
    const long double t = static_cast<long double>(s) * s;
    // leading series terms: F = t^2/4 - t^3/6 + t^4/8, Q = t^2/4 - t^3/3 + 3 t^4/8
    const long double F = t * t / 4 - t * t * t / 6 + t * t * t * t / 8 - t * t * t * t * t / 10;
    const long double Q = t * t / 4 - t * t * t / 3 + 3 * t * t * t * t / 8 - 2 * t * t * t * t * t / 5;
    if (s < 0.1) {
      CHECK(m.F(s) == doctest::Approx(static_cast<double>(F)).epsilon(1e-12));
      CHECK(m.Q(s) == doctest::Approx(static_cast<double>(Q)).epsilon(1e-10));
    }
    CHECK(m.F(s) > 0.0);
    CHECK(m.Q(s) > 0.0);
  }
}

TEST_CASE("derivative, Lipschitz bound and sup F/s^2") {
  const auto m = NonlinearityModel::asymptotically_linear();
  for (double s : {0.1, 0.9, 1.7, 4.0}) {
    const double h = 1e-5 * s;
    CHECK(m.fprime(s) == doctest::Approx((m.f(s + h) - m.f(s - h)) / (2 * h)).epsilon(1e-8));
  }
  CHECK(m.fprime(std::sqrt(3.0)) == doctest::Approx(9.0 / 8.0).epsilon(1e-14));
  CHECK(m.lipschitz_bound() == 9.0 / 8.0);
  CHECK(m.C_F() == 0.5);
  CHECK(m.F(1e6) / 1e12 < 0.5);
  CHECK(m.F(1e6) / 1e12 > 0.5 - 1e-9);
  CHECK(m.D() == 1.0);
}

TEST_CASE("assumption checks on the shipped nonlinearity and a control") {
  const auto good = check_f_assumptions(NonlinearityModel::asymptotically_linear(), 1e3, 10000);
  CHECK(good.all_passed());
  REQUIRE(good.find("f3.Q_monotone") != nullptr);
  CHECK(good.find("f3.Q_monotone")->value == 0.0);
  CHECK(good.find("f3.D_empirical")->value <= 1.0 + 1e-12);

  const auto quad = check_f_assumptions(NonlinearityModel::power(2.0), 1e3, 10000);
  CHECK_FALSE(quad.passed("f2.infinity_limit"));
  CHECK(quad.passed("f1.origin_limit"));

  CHECK_THROWS_AS(NonlinearityModel::power(1.0), Error);
}

TEST_CASE("coefficient derivatives match finite differences along a ray") {
  const CoefficientField a{2.0, 0.5, 0.5};
  for (double r : {0.3, 1.0, 2.7, 9.0}) {
    const double h = 1e-4 * r;
    const double d1 = (a.a_radial(r + h) - a.a_radial(r - h)) / (2 * h);
    const double d2 = (a.a_radial(r + h) - 2 * a.a_radial(r) + a.a_radial(r - h)) / (h * h);
    CHECK(a.da_dr(r) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(a.d2a_dr2(r) == doctest::Approx(d2).epsilon(1e-5));
    const Point x{0.6 * r, 0.8 * r, 0.0};
    CHECK(eval_a(a, x, 2) == doctest::Approx(2.0 - 0.5 / std::sqrt(1 + r * r)).epsilon(1e-15));
    CHECK(eval_grad_a_dot(a, x, 2) == doctest::Approx(r * d1).epsilon(1e-8));
    CHECK(eval_hess_quadform(a, x, 2) == doctest::Approx(r * r * d2).epsilon(1e-5));
  }
  CHECK(a.sup_deficit() == 0.5);
}

TEST_CASE("coefficient assumptions and their windows") {
  const Params p;
  CHECK(check_A_assumptions(CoefficientField{2.0, 0.5, 0.5}, p, 1e3, 10000).all_passed());

  const auto k1 = check_A_assumptions(CoefficientField{2.0, 0.5, 1.0}, p, 1e3, 10000);
  CHECK_FALSE(k1.passed("A5"));
  CHECK(k1.passed("A1"));

  const auto k15 = check_A_assumptions(CoefficientField{2.0, 0.5, 1.5}, p, 1e3, 10000);
  CHECK_FALSE(k15.passed("A4.window"));

  // c = 0 is admissible for the functionals but not for the strict monotonicity
  CHECK_FALSE(check_A_assumptions(CoefficientField{2.0, 0.0, 0.5}, p, 1e3, 10000).passed("A3"));
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(Params{}.validate());
  auto code = [](Params p) {
    try {
      p.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  CHECK(code(Params{1, 0.6, 1.0, 2.0}) == ErrorCode::invalid_params);
  CHECK(code(Params{2, 0.5, 2.0, 2.0}) == ErrorCode::invalid_params);
  CHECK(code(Params{2, 1.5, 1.0, 2.0}) == ErrorCode::invalid_params);
  CHECK(code(Params{2, 0.5, -1.0, 2.0}) == ErrorCode::invalid_params);
  CHECK(Params{}.critical_exponent() == 4.0);
}

TEST_CASE("sampled growth constant bounds F on an independent grid") {
  const auto m = NonlinearityModel::asymptotically_linear();
  const auto gb = growth_constant(m, 0.25, 4.0);
  CHECK(gb.C_eps > 0.0);
  CHECK(gb.worst_violation <= 0.0);
  for (double s = 1e-4; s < 1e4; s *= 1.0137)
    CHECK(m.F(s) <= 0.125 * s * s + gb.C_eps * std::pow(s, 4.0) + 1e-15 * m.F(s));
}
