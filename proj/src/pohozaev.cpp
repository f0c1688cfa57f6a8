#include "fraclab/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

namespace {

bool is_origin(const Point& c, int n) {
  for (int a = 0; a < n; ++a)
    if (c[a] != 0.0) return false;
  return true;
}

double relative_to(double value, double scale) {
  return std::abs(value) / (scale > 0.0 ? scale : 1.0);
}

// Cell data of u reused by every evaluation of the rescaled-coefficient integrals.
struct RescaleData {
  std::vector<std::size_t> support;  // cells with F(u) > 0
  std::vector<double> F;
  double mass_sq = 0.0;  // int u^2
  double F_total = 0.0;  // int F(u)
};

RescaleData rescale_data(const ProblemContext& ctx, const Field& u) {
  RescaleData d;
  const auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = ctx.model().F(v[i]);
    if (F > 0.0) {
      d.support.push_back(i);
      d.F.push_back(F);
      d.F_total += F;
    }
  }
  d.mass_sq = inner(u, u);
  d.F_total *= ctx.grid().cell_volume();
  return d;
}

// int w(z) F(u) dx with z = theta x + (1 - theta) center, w = a or a + grad a . z / n.
double rescaled_coefficient_integral(const ProblemContext& ctx, const RescaleData& d, double theta,
                                     const Point& center, bool with_gradient) {
  const auto& g = ctx.grid();
  const int n = g.n_dims();
  const auto& coeff = ctx.coeff();
  double acc = 0.0;
  for (std::size_t j = 0; j < d.support.size(); ++j) {
    const Point x = g.point(d.support[j]);
    Point z{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) z[a] = theta * x[a] + (1.0 - theta) * center[a];
    double w = eval_a(coeff, z, n);
    if (with_gradient) w += eval_grad_a_dot(coeff, z, n) / n;
    acc += w * d.F[j];
  }
  return acc * g.cell_volume();
}

double h_from_data(const ProblemContext& ctx, const RescaleData& d, double theta, const Point& center) {
  return rescaled_coefficient_integral(ctx, d, theta, center, true) - 0.5 * ctx.params().lambda * d.mass_sq;
}

double dilation_energy_from(const ProblemContext& ctx, const RescaleData& d, double S, double theta,
                            bool autonomous, const Point& center) {
  const auto& p = ctx.params();
  const double potential = autonomous ? p.a_inf * d.F_total
                                      : rescaled_coefficient_integral(ctx, d, theta, center, false);
  return 0.5 * std::pow(theta, p.n - 2.0 * p.s) * S -
         std::pow(theta, p.n) * (potential - 0.5 * p.lambda * d.mass_sq);
}

}  // namespace

ProjectionResult project_to_P_inf(const ProblemContext& ctx, const Field& u) {
  const auto& p = ctx.params();
  const double G = g_inf_integral(ctx, u);
  if (!(G > 0.0)) throw Error(ErrorCode::nonpositive_g_inf, "int G_inf(u) <= 0, no dilation reaches the manifold");
  const double S = seminorm_sq(ctx, u);
  const double theta = std::pow((p.n - 2.0 * p.s) / (2.0 * p.n) * S / G, 1.0 / (2.0 * p.s));

  const double kin_analytic = 0.5 * (p.n - 2.0 * p.s) * std::pow(theta, p.n - 2.0 * p.s) * S;
  const double J_analytic = kin_analytic - p.n * std::pow(theta, p.n) * G;

  auto dil = dilate(u, theta, Point{0.0, 0.0, 0.0});
  const double kin = 0.5 * (p.n - 2.0 * p.s) * seminorm_sq(ctx, dil.field);
  const double J = pohozaev_J_inf(ctx, dil.field);
  return ProjectionResult{.theta = theta,
                          .residual = relative_to(J, kin),
                          .analytic_residual = relative_to(J_analytic, kin_analytic),
                          .bracket = {theta, theta},
                          .iterations = 0,
                          .multiple_roots_flag = false,
                          .boundary_warning = dil.support_overflow,
                          .field = std::move(dil.field)};
}

double h_of_theta(const ProblemContext& ctx, const Field& u, double theta, const Point& center) {
  if (!(theta > 0.0)) throw Error(ErrorCode::nonpositive_theta, "theta must be positive");
  return h_from_data(ctx, rescale_data(ctx, u), theta, center);
}

ProjectionResult project_to_P(const ProblemContext& ctx, const Field& u, const Point& center) {
  const auto& p = ctx.params();
  const int n = p.n;
  const double G = g_inf_integral(ctx, u);
  if (!(G > 0.0)) throw Error(ErrorCode::nonpositive_g_inf, "int G_inf(u) <= 0, no dilation reaches the manifold");

  const auto data = rescale_data(ctx, u);
  const double S = seminorm_sq(ctx, u);
  const double kinetic = 0.5 * (n - 2.0 * p.s) * S;
  int evals = 0;
  // Strictly decreasing in theta when center = 0.
  auto target = [&](double theta) {
    ++evals;
    return kinetic - n * std::pow(theta, 2.0 * p.s) * h_from_data(ctx, data, theta, center);
  };

  constexpr double lo_limit = 1e-6, hi_limit = 1e6;
  double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;
  bool multiple = false;
  bool found = false;

  auto log_scan = [&](double a, double b, int points) {
    std::vector<double> th(points), val(points);
    for (int i = 0; i < points; ++i) {
      th[i] = std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (points - 1));
      val[i] = target(th[i]);
    }
    int changes = 0;
    double best_energy = -std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < points; ++i) {
      if ((val[i] > 0.0) != (val[i + 1] > 0.0)) ++changes;
      if (val[i] > 0.0 && val[i + 1] <= 0.0) {
        const double e = dilation_energy_from(ctx, data, S, std::sqrt(th[i] * th[i + 1]), false, center);
        if (e > best_energy) {
          best_energy = e;
          lo = th[i], hi = th[i + 1], f_lo = val[i], f_hi = val[i + 1];
          found = true;
        }
      }
    }
    multiple = changes > 1;
  };

  if (is_origin(center, n)) {
    const double f1 = target(1.0);
    if (f1 > 0.0) {
      lo = 1.0, f_lo = f1, hi = 2.0, f_hi = target(hi);
      while (f_hi > 0.0 && hi < hi_limit) lo = hi, f_lo = f_hi, hi *= 2.0, f_hi = target(hi);
      found = f_hi <= 0.0;
    } else {
      hi = 1.0, f_hi = f1, lo = 0.5, f_lo = target(lo);
      while (f_lo <= 0.0 && lo > lo_limit) hi = lo, f_hi = f_lo, lo *= 0.5, f_lo = target(lo);
      found = f_lo > 0.0;
    }
  } else {
    log_scan(1e-2, 1e2, 200);
    if (!found) log_scan(lo_limit, hi_limit, 1200);
  }
  if (!found) throw Error(ErrorCode::no_bracket, "no sign change of the Pohozaev equation in [1e-6, 1e6]");

  const std::pair<double, double> bracket{lo, hi};
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    const double fm = target(mid);
    if (fm > 0.0) lo = mid, f_lo = fm;
    else hi = mid, f_hi = fm;
  }
  double theta = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  double f_best = std::min(std::abs(f_lo), std::abs(f_hi));
  double xa = lo, fa = f_lo, xb = hi, fb = f_hi;
  for (int k = 0; k < 2 && fb != fa; ++k) {
    const double xs = xb - fb * (xb - xa) / (fb - fa);
    if (!(xs >= bracket.first && xs <= bracket.second)) break;
    const double fs = target(xs);
    if (std::abs(fs) < f_best) theta = xs, f_best = std::abs(fs);
    xa = xb, fa = fb, xb = xs, fb = fs;
  }

  const double kin_analytic = std::pow(theta, n - 2.0 * p.s) * kinetic;
  const double J_analytic = std::pow(theta, n - 2.0 * p.s) * target(theta);
  auto dil = dilate(u, theta, center);
  const double kin = 0.5 * (n - 2.0 * p.s) * seminorm_sq(ctx, dil.field);
  const double J = pohozaev_J(ctx, dil.field);
  return ProjectionResult{.theta = theta,
                          .residual = relative_to(J, kin),
                          .analytic_residual = relative_to(J_analytic, kin_analytic),
                          .bracket = bracket,
                          .iterations = evals,
                          .multiple_roots_flag = multiple,
                          .boundary_warning = dil.support_overflow,
                          .field = std::move(dil.field)};
}

// ---------------------------------------------------------------------------

namespace {

struct ConstraintEval {
  double value;       // int G_inf(alpha u) - 1
  double derivative;  // d/dalpha
};

ConstraintEval constraint_at(const ProblemContext& ctx, std::span<const double> v, double mass_sq,
                             double alpha, double level) {
  const auto& p = ctx.params();
  const auto& m = ctx.model();
  double F = 0.0, uf = 0.0;
  for (double x : v) {
    const double y = alpha * x;
    F += m.F(y);
    uf += x * m.f(y);
  }
  const double dv = ctx.grid().cell_volume();
  return {p.a_inf * F * dv - 0.5 * p.lambda * alpha * alpha * mass_sq - level,
          p.a_inf * uf * dv - p.lambda * alpha * mass_sq};
}

ScaledField finish_scale(const ProblemContext& ctx, const Field& u, double alpha, double level) {
  Field out = alpha * Field(u);
  const double res = std::abs(g_inf_integral(ctx, out) - level);
  return ScaledField{alpha, res, std::move(out)};
}

// Root of the constraint inside [lo, hi] where it changes sign from negative to positive.
double refine_constraint_root(const ProblemContext& ctx, std::span<const double> v, double mass_sq,
                              double lo, double hi, double level) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto e = constraint_at(ctx, v, mass_sq, x, level);
    if (e.value == 0.0) return x;
    if (e.value < 0.0) lo = x;
    else hi = x;
    double next = e.derivative > 0.0 ? x - e.value / e.derivative : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * x || hi - lo <= 1e-16 * hi) return next;
    x = next;
  }
  return x;
}

}  // namespace

ScaledField scale_to_S_inf(const ProblemContext& ctx, const Field& u) {
  return scale_to_level(ctx, u, 1.0);
}

ScaledField scale_to_level(const ProblemContext& ctx, const Field& u, double level) {
  const double peak = u.max_abs();
  if (peak == 0.0) throw Error(ErrorCode::unreachable_constraint, "zero field");
  const auto v = u.values();
  const double mass_sq = inner(u, u);
  double alpha = 1e-3 / peak;
  double prev = alpha;
  bool bracketed = false;
  while (alpha * peak <= 1e8) {
    if (constraint_at(ctx, v, mass_sq, alpha, level).value >= 0.0) {
      bracketed = true;
      break;
    }
    prev = alpha;
    alpha *= 1.25;
  }
  if (!bracketed)
    throw Error(ErrorCode::unreachable_constraint, "amplitude scan never reaches int G_inf = 1");
  if (prev == alpha) return finish_scale(ctx, u, alpha, level);
  return finish_scale(ctx, u, refine_constraint_root(ctx, v, mass_sq, prev, alpha, level), level);
}

ScaledField scale_to_S_inf_near(const ProblemContext& ctx, const Field& u, double guess) {
  const auto v = u.values();
  const double mass_sq = inner(u, u);
  double lo = guess, hi = guess;
  auto e = constraint_at(ctx, v, mass_sq, guess, 1.0);
  if (e.value == 0.0) return finish_scale(ctx, u, guess, 1.0);
  if (e.value < 0.0) {
    for (int k = 0; k < 40 && e.value < 0.0; ++k) lo = hi, hi *= 1.1, e = constraint_at(ctx, v, mass_sq, hi, 1.0);
    if (e.value < 0.0) return scale_to_S_inf(ctx, u);
  } else {
    for (int k = 0; k < 40 && e.value >= 0.0; ++k) hi = lo, lo /= 1.1, e = constraint_at(ctx, v, mass_sq, lo, 1.0);
    if (e.value >= 0.0) return scale_to_S_inf(ctx, u);
  }
  return finish_scale(ctx, u, refine_constraint_root(ctx, v, mass_sq, lo, hi, 1.0), 1.0);
}

double phi_energy(const Params& p, double S) {
  const double ratio = (p.n - 2.0 * p.s) / (2.0 * p.n);
  return p.s / p.n * std::pow(ratio, (p.n - 2.0 * p.s) / (2.0 * p.s)) * std::pow(S, p.n / (2.0 * p.s));
}

PhiImage phi_map(const ProblemContext& ctx, const Field& u_on_S) {
  const auto& p = ctx.params();
  const double G = g_inf_integral(ctx, u_on_S);
  if (std::abs(G - 1.0) > 1e-8)
    throw Error(ErrorCode::constraint_violation, "field is not on int G_inf = 1");
  const double S = seminorm_sq(ctx, u_on_S);
  const double t_u = std::pow((p.n - 2.0 * p.s) / (2.0 * p.n), 1.0 / (2.0 * p.s)) * std::pow(S, 1.0 / (2.0 * p.s));
  auto dil = dilate(u_on_S, t_u, Point{0.0, 0.0, 0.0});
  return PhiImage{std::move(dil.field), phi_energy(p, S), t_u, dil.support_overflow};
}

// ---------------------------------------------------------------------------


double dilation_energy(const ProblemContext& ctx, const Field& u, double theta, bool autonomous,
                       const Point& center) {
  if (!(theta > 0.0)) throw Error(ErrorCode::nonpositive_theta, "theta must be positive");
  return dilation_energy_from(ctx, rescale_data(ctx, u), seminorm_sq(ctx, u), theta, autonomous, center);
}

std::vector<PathPoint> dilation_path_energy(const ProblemContext& ctx, const Field& u,
                                            std::span<const double> thetas, bool autonomous,
                                            const Point& center) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0)) throw Error(ErrorCode::nonpositive_theta, "path parameters must be positive");
    if (i > 0 && thetas[i] < thetas[i - 1])
      throw Error(ErrorCode::invalid_argument, "path parameters must be sorted");
  }
  const auto d = rescale_data(ctx, u);
  const double S = seminorm_sq(ctx, u);
  std::vector<PathPoint> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back({t, dilation_energy_from(ctx, d, S, t, autonomous, center)});
  return out;
}

LevelReport mp_level_estimate(const ProblemContext& ctx, const Field& w, double s_inf_seminorm_sq) {
  const auto& p = ctx.params();
  const auto d = rescale_data(ctx, w);
  const double S = seminorm_sq(ctx, w);
  auto path = [&](double t) { return dilation_energy_from(ctx, d, S, t, true, Point{}); };

  LevelReport rep;
  rep.m_estimate = phi_energy(p, s_inf_seminorm_sq);

  constexpr int samples = 401;
  double best_t = 1.0, best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = std::exp(std::log(0.05) + (std::log(20.0) - std::log(0.05)) * i / (samples - 1));
    const double e = path(t);
    if (e > best) best = e, best_t = t;
  }
  const double step = std::pow(20.0 / 0.05, 1.0 / (samples - 1));
  double a = best_t / step, b = best_t * step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = path(x1), f2 = path(x2);
  while (b - a > 1e-12 * best_t) {
    if (f1 > f2) b = x2, x2 = x1, f2 = f1, x1 = b - gr * (b - a), f1 = path(x1);
    else a = x1, x1 = x2, f1 = f2, x2 = a + gr * (b - a), f2 = path(x2);
  }
  rep.theta_at_max = 0.5 * (a + b);
  rep.c_inf_estimate = std::max({best, f1, f2, path(rep.theta_at_max)});

  double endpoint = 1.0;
  while (path(endpoint) >= -rep.m_estimate && endpoint < 1e12) endpoint *= 2.0;
  rep.path_endpoint = endpoint;
  rep.energy_of_w = energy_I_inf(ctx, w);
  rep.seminorm_term_of_w = p.s / p.n * S;
  return rep;
}

}  // namespace fraclab
