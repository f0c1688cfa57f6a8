#include "fraclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fraclab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// t - log(1+t) without cancellation for small t. With z = t/(2+t) the series is
// sum_{k>=2} c_k z^k, c_k = 2 for even k and 2(1 - 1/k) for odd k.
double t_minus_log1p(double t) {
  if (t > 0.1) return t - std::log1p(t);
  const double z = t / (2.0 + t);
  double zk = z * z;
  double sum = 0.0;
  for (int k = 2; k < 80; ++k) {
    const double ck = (k % 2 == 0) ? 2.0 : 2.0 * (1.0 - 1.0 / k);
    const double term = ck * zk;
    sum += term;
    if (term < 1e-18 * sum) break;
    zk *= z;
  }
  return sum;
}

// -log(1-q) - q = sum_{k>=2} q^k/k
double neglog1m_minus(double q) {
  if (q > 0.1) return -std::log1p(-q) - q;
  double qk = q * q;
  double sum = 0.0;
  for (int k = 2; k < 80; ++k) {
    const double term = qk / k;
    sum += term;
    if (term < 1e-18 * sum) break;
    qk *= q;
  }
  return sum;
}

}  // namespace

NonlinearityModel NonlinearityModel::asymptotically_linear() {
  return NonlinearityModel(Kind::asymptotically_linear, 0.0);
}

NonlinearityModel NonlinearityModel::power(double exponent) {
  if (!(exponent > 1.0)) throw Error(ErrorCode::invalid_argument, "power exponent must exceed 1");
  return NonlinearityModel(Kind::power, exponent);
}

std::string NonlinearityModel::name() const {
  if (kind_ == Kind::asymptotically_linear) return "asymptotically_linear";
  std::ostringstream os;
  os << "power(" << exponent_ << ")";
  return os.str();
}

double NonlinearityModel::f(double s) const noexcept {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::power) return std::pow(s, exponent_);
  const double t = s * s;
  return s * t / (1.0 + t);
}

double NonlinearityModel::fprime(double s) const noexcept {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::power) return exponent_ * std::pow(s, exponent_ - 1.0);
  const double t = s * s;
  return t * (3.0 + t) / ((1.0 + t) * (1.0 + t));
}

double NonlinearityModel::F(double s) const noexcept {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::power) return std::pow(s, exponent_ + 1.0) / (exponent_ + 1.0);
  return 0.5 * t_minus_log1p(s * s);
}

double NonlinearityModel::Q(double s) const noexcept {
  if (s <= 0.0) return 0.0;
  if (kind_ == Kind::power) return (0.5 - 1.0 / (exponent_ + 1.0)) * std::pow(s, exponent_ + 1.0);
  // Q = (log(1+t) - t/(1+t))/2 with t = s^2
  const double t = s * s;
  return 0.5 * neglog1m_minus(t / (1.0 + t));
}

double NonlinearityModel::D() const noexcept { return 1.0; }

double NonlinearityModel::C_F() const noexcept {
  return kind_ == Kind::asymptotically_linear ? 0.5 : inf;
}

double NonlinearityModel::lipschitz_bound() const noexcept {
  // sup f' is attained at s^2 = 3
  return kind_ == Kind::asymptotically_linear ? 9.0 / 8.0 : inf;
}

double eval_f(const NonlinearityModel& m, double s) { return m.f(s); }
double eval_F(const NonlinearityModel& m, double s) { return m.F(s); }
double eval_fprime(const NonlinearityModel& m, double s) { return m.fprime(s); }
double eval_Q(const NonlinearityModel& m, double s) { return m.Q(s); }

// ---------------------------------------------------------------------------

double CoefficientField::a_radial(double r) const noexcept {
  return a_inf - c * std::pow(1.0 + r * r, -k);
}

double CoefficientField::da_dr(double r) const noexcept {
  return 2.0 * c * k * r * std::pow(1.0 + r * r, -k - 1.0);
}

double CoefficientField::d2a_dr2(double r) const noexcept {
  const double q = 1.0 + r * r;
  return 2.0 * c * k * std::pow(q, -k - 1.0) - 4.0 * c * k * (k + 1.0) * r * r * std::pow(q, -k - 2.0);
}

namespace {
double radius(const Point& x, int n_dims) {
  double r2 = 0.0;
  for (int a = 0; a < n_dims; ++a) r2 += x[a] * x[a];
  return std::sqrt(r2);
}
}  // namespace

double eval_a(const CoefficientField& coeff, const Point& x, int n_dims) {
  return coeff.a_radial(radius(x, n_dims));
}

double eval_grad_a_dot(const CoefficientField& coeff, const Point& x, int n_dims) {
  double r2 = 0.0;
  for (int a = 0; a < n_dims; ++a) r2 += x[a] * x[a];
  return 2.0 * coeff.c * coeff.k * r2 * std::pow(1.0 + r2, -coeff.k - 1.0);
}

double eval_hess_quadform(const CoefficientField& coeff, const Point& x, int n_dims) {
  const double r = radius(x, n_dims);
  return coeff.d2a_dr2(r) * r * r;
}

// ---------------------------------------------------------------------------

bool AssumptionReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool AssumptionReport::passed(const std::string& name) const noexcept {
  const auto* c = find(name);
  return c != nullptr && c->passed;
}

std::vector<std::string> AssumptionReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

AssumptionReport check_f_assumptions(const NonlinearityModel& model, double s_max, int samples) {
  return check_f_assumptions(model, FCheckOptions{s_max, samples, 1.0});
}

AssumptionReport check_f_assumptions(const NonlinearityModel& model, const FCheckOptions& opts) {
  if (!(opts.s_max > 0.0) || opts.samples < 100)
    throw Error(ErrorCode::invalid_argument, "need s_max > 0 and at least 100 samples");
  AssumptionReport rep;
  const int ns = opts.samples;
  std::vector<double> grid(ns);
  for (int i = 0; i < ns; ++i) grid[i] = opts.s_max * i / (ns - 1);

  double neg = 0.0;
  for (double s : grid)
    neg = std::max({neg, std::abs(model.f(-s)), std::abs(model.F(-s)), std::abs(model.Q(-s))});
  rep.checks.push_back({"f1.vanish_nonpositive", neg == 0.0, neg, 0.0, "max |f|,|F|,|Q| on s <= 0"});

  double fmin = inf;
  for (double s : grid)
    if (s > 0.0) fmin = std::min(fmin, model.f(s));
  rep.checks.push_back({"f1.nonnegative", fmin >= 0.0, fmin, 0.0, "min f on s > 0"});

  const double r_small = model.f(1e-6) / 1e-6;
  const double r_mid = model.f(1e-3) / 1e-3;
  rep.checks.push_back({"f1.origin_limit", r_small < 1e-4 && r_small <= r_mid, r_small, 1e-4,
                        "f(s)/s at s = 1e-6"});

  const double r_top = model.f(opts.s_max) / opts.s_max;
  const double r_prev = model.f(0.1 * opts.s_max) / (0.1 * opts.s_max);
  const bool lin = std::abs(r_top - 1.0) < 1e-2 && std::abs(r_top - 1.0) <= std::abs(r_prev - 1.0);
  rep.checks.push_back({"f2.infinity_limit", lin, r_top, 1e-2, "f(s)/s at s_max, expected -> 1"});

  long violations = 0;
  double running_max = 0.0;
  double d_emp = 1.0;
  for (int i = 0; i < ns; ++i) {
    const double q = model.Q(grid[i]);
    if (i > 0 && q < model.Q(grid[i - 1])) ++violations;
    running_max = std::max(running_max, q);
    if (q > 0.0) d_emp = std::max(d_emp, running_max / q);
  }
  rep.checks.push_back({"f3.Q_monotone", violations == 0, static_cast<double>(violations), 0.0,
                        "decreasing steps of Q on the sample grid"});
  rep.checks.push_back({"f3.D_empirical", std::isfinite(d_emp) && d_emp <= model.D() + 1e-12, d_emp,
                        model.D(), "max_{s<=t} Q(s)/Q(t)"});
  const double q_top = model.Q(opts.s_max);
  const double q_prev = model.Q(0.1 * opts.s_max);
  rep.checks.push_back({"f3.Q_growth", q_top > q_prev && q_prev > 0.0, q_top, 0.0,
                        "Q(s_max) > Q(s_max/10) > 0"});

  const double fp_ratio = model.fprime(1e-6) / std::pow(1e-6, opts.tau);
  rep.checks.push_back({"exist.fprime_origin", fp_ratio < 1e-4, fp_ratio, 1e-4,
                        "f'(s)/s^tau at s = 1e-6"});

  double fp_max = 0.0, cf_max = 0.0;
  for (double s : grid) {
    if (s <= 0.0) continue;
    fp_max = std::max(fp_max, model.fprime(s));
    cf_max = std::max(cf_max, model.F(s) / (s * s));
  }
  rep.checks.push_back({"lipschitz_bound", fp_max <= model.lipschitz_bound() * (1.0 + 1e-12), fp_max,
                        model.lipschitz_bound(), "sampled sup f'"});
  rep.checks.push_back({"C_F_bound", cf_max <= model.C_F() * (1.0 + 1e-12), cf_max, model.C_F(),
                        "sampled sup F(s)/s^2"});
  return rep;
}

AssumptionReport check_A_assumptions(const CoefficientField& coeff, const Params& params,
                                     double r_max, int samples) {
  if (!(r_max > 0.0) || samples < 2)
    throw Error(ErrorCode::invalid_argument, "need r_max > 0 and at least 2 samples");
  AssumptionReport rep;
  const int n = params.n;
  double a_min = inf, grad_min = inf, grad_pos = 0.0, a4_max = -inf, a5_min = inf;
  double a5_first_fail = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double r = r_max * i / (samples - 1);
    const Point x{r, 0.0, 0.0};
    const double a = eval_a(coeff, x, n);
    const double g = eval_grad_a_dot(coeff, x, n);
    const double hq = eval_hess_quadform(coeff, x, n);
    a_min = std::min(a_min, a);
    grad_min = std::min(grad_min, g);
    if (r > 0.0) grad_pos = std::max(grad_pos, g);
    a4_max = std::max(a4_max, a + g / n - coeff.a_inf);
    const double a5 = g + hq / n;
    if (a5 < -1e-15 && a5_first_fail < 0.0) a5_first_fail = r;
    a5_min = std::min(a5_min, a5);
  }

  rep.checks.push_back({"A1", a_min > 0.0 && coeff.a_inf - coeff.c > 0.0, a_min, 0.0, "inf a > 0"});
  const double tail = coeff.a_inf - coeff.a_radial(r_max);
  rep.checks.push_back({"A2", coeff.a_inf > params.lambda && tail <= 1e-2 * coeff.c, tail,
                        1e-2 * coeff.c, "a_inf - a(r_max); requires a_inf > lambda"});
  rep.checks.push_back({"A3", grad_min >= 0.0 && grad_pos > 0.0, grad_min, 0.0,
                        "grad a . x >= 0, positive somewhere"});
  rep.checks.push_back({"A4", a4_max < 0.0, a4_max, 0.0, "max of a + grad a . x/n - a_inf"});
  std::ostringstream a5d;
  a5d << "min of grad a . x + x.H.x/n";
  if (a5_first_fail >= 0.0) a5d << "; negative from r = " << a5_first_fail;
  rep.checks.push_back({"A5", a5_min >= -1e-15, a5_min, -1e-15, a5d.str()});

  const Point far{r_max, 0.0, 0.0};
  const Point mid{0.5 * r_max, 0.0, 0.0};
  const double g_far = eval_grad_a_dot(coeff, far, n);
  const double g_mid = eval_grad_a_dot(coeff, mid, n);
  rep.checks.push_back({"A5.decay", g_far <= g_mid && g_far <= 1e-2 * std::max(coeff.c, 1e-300),
                        g_far, 1e-2 * coeff.c, "grad a . x at r_max, expected -> 0"});
  rep.checks.push_back({"A4.window", 2.0 * coeff.k <= n, coeff.k, 0.5 * n, "2k <= n"});
  rep.checks.push_back({"A5.window", coeff.k <= 0.5 * (n - 1), coeff.k, 0.5 * (n - 1), "k <= (n-1)/2"});
  rep.checks.push_back({"sup_deficit", true, coeff.sup_deficit(), 0.0, "sup |a_inf - a| at the origin"});
  return rep;
}

GrowthBound growth_constant(const NonlinearityModel& model, double eps, double p) {
  auto log_grid = [](int count, double offset) {
    std::vector<double> g(count);
    const double lo = std::log(1e-6), hi = std::log(1e6);
    for (int i = 0; i < count; ++i) g[i] = std::exp(lo + (hi - lo) * (i + offset) / (count - 1));
    return g;
  };
  GrowthBound gb{eps, p, 0.0, 0.0};
  for (double s : log_grid(4001, 0.0))
    gb.C_eps = std::max(gb.C_eps, (model.F(s) - 0.5 * eps * s * s) / std::pow(s, p));
  const auto check = log_grid(8001, 0.37);
  for (int round = 0; round < 50; ++round) {
    gb.worst_violation = -inf;
    for (double s : check)
      gb.worst_violation =
          std::max(gb.worst_violation, model.F(s) - 0.5 * eps * s * s - gb.C_eps * std::pow(s, p));
    if (gb.worst_violation <= 0.0) break;
    gb.C_eps *= 1.01;
  }
  return gb;
}

}  // namespace fraclab
