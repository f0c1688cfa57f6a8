#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fraclab/spectral.hpp"

namespace fraclab {

// Nonlinearity f with primitive F and Q(s) = f(s)s/2 - F(s).
class NonlinearityModel {
public:
  enum class Kind {
    asymptotically_linear,  // f(s) = s^3/(1+s^2)
    power,                  // f(s) = s^p, a control that is not asymptotically linear
  };

  static NonlinearityModel asymptotically_linear();
  static NonlinearityModel power(double exponent);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double exponent() const noexcept { return exponent_; }
  [[nodiscard]] std::string name() const;

  [[nodiscard]] double f(double s) const noexcept;
  [[nodiscard]] double fprime(double s) const noexcept;
  [[nodiscard]] double F(double s) const noexcept;
  [[nodiscard]] double Q(double s) const noexcept;

  // Known constant of the monotonicity condition on Q (infinite when unknown).
  [[nodiscard]] double D() const noexcept;
  // sup_{s>0} F(s)/s^2
  [[nodiscard]] double C_F() const noexcept;
  [[nodiscard]] double lipschitz_bound() const noexcept;

private:
  NonlinearityModel(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}
  Kind kind_;
  double exponent_;
};

double eval_f(const NonlinearityModel& m, double s);
double eval_F(const NonlinearityModel& m, double s);
double eval_fprime(const NonlinearityModel& m, double s);
double eval_Q(const NonlinearityModel& m, double s);

// a(x) = a_inf - c (1 + |x|^2)^(-k)
struct CoefficientField {
  double a_inf = 2.0;
  double c = 0.5;
  double k = 0.5;

  [[nodiscard]] double a_radial(double r) const noexcept;
  [[nodiscard]] double da_dr(double r) const noexcept;
  [[nodiscard]] double d2a_dr2(double r) const noexcept;
  [[nodiscard]] bool autonomous() const noexcept { return c == 0.0; }
  // sup |a_inf - a|, attained at the origin
  [[nodiscard]] double sup_deficit() const noexcept { return c; }
};

double eval_a(const CoefficientField& coeff, const Point& x, int n_dims);
// grad a(x) . x
double eval_grad_a_dot(const CoefficientField& coeff, const Point& x, int n_dims);
// x . Hess a(x) . x
double eval_hess_quadform(const CoefficientField& coeff, const Point& x, int n_dims);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  [[nodiscard]] bool all_passed() const noexcept;
  [[nodiscard]] const AssumptionCheck* find(const std::string& name) const noexcept;
  [[nodiscard]] bool passed(const std::string& name) const noexcept;
  [[nodiscard]] std::vector<std::string> failures() const;
};

struct FCheckOptions {
  double s_max = 1e3;
  int samples = 10000;
  // exponent in lim_{s->0+} f'(s)/s^tau = 0
  double tau = 1.0;
};

AssumptionReport check_f_assumptions(const NonlinearityModel& model, const FCheckOptions& opts);
AssumptionReport check_f_assumptions(const NonlinearityModel& model, double s_max, int samples);

AssumptionReport check_A_assumptions(const CoefficientField& coeff, const Params& params,
                                     double r_max, int samples);

// Growth bound F(s) <= (eps/2) s^2 + C_eps s^p with C_eps obtained by sampling.
struct GrowthBound {
  double eps = 0.0;
  double p = 0.0;
  double C_eps = 0.0;
  double worst_violation = 0.0;  // max of F - bound over an independent check grid
};

GrowthBound growth_constant(const NonlinearityModel& model, double eps, double p);

}  // namespace fraclab
