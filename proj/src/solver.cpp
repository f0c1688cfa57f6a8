#include "fraclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fraclab/barycenter.hpp"
#include "fraclab/field_io.hpp"

namespace fraclab {

namespace {

// Accepted steps may raise the objective by at most a few ulps.
constexpr double objective_slack = 4.0 * std::numeric_limits<double>::epsilon();

struct DescentState {
  Field u;
  Field Lu;     // (-D)^s u
  Field grad;   // L2 gradient of the Lagrangian
  Field dir;    // its Riesz image, the H^s-gradient
  double objective = 0.0;
  double multiplier = 0.0;
  double residual = 0.0;
};

struct ConstrainedResult {
  Field u;
  double seminorm = 0.0;
  double multiplier = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

// Seminorm S with its constraint int G_inf = 1 projected out in the H^s metric.
DescentState evaluate_constrained(const ProblemContext& ctx, Field u) {
  Field Lu = apply_symbol(u, ctx.frac_symbol());
  const double S = inner(Lu, u);
  Field gS = 2.0 * Field(Lu);
  Field gC = g_inf_density(ctx, u);
  Field rS = apply_symbol(gS, ctx.riesz_symbol());
  Field rC = apply_symbol(gC, ctx.riesz_symbol());
  const double mu = inner(gS, rC) / inner(gC, rC);
  Field dir = rS;
  dir.axpy(-mu, rC);
  Field grad = gS;
  grad.axpy(-mu, gC);
  const double dn2 = std::max(inner(grad, dir), 0.0);
  const double rs2 = inner(gS, rS);
  const double res = rs2 > 0.0 ? std::sqrt(dn2 / rs2) : 0.0;
  return DescentState{std::move(u), std::move(Lu), std::move(grad), std::move(dir), S, mu, res};
}

// <a, b> in H^s from the primal difference and the gradient difference.
double two_point_step(const ProblemContext& ctx, const DescentState& prev, const DescentState& next,
                      double fallback) {
  Field s = next.u - prev.u;
  Field Ps = next.Lu - prev.Lu;
  Ps.axpy(ctx.params().lambda, s);
  Field y = next.dir - prev.dir;
  Field Py = next.grad - prev.grad;
  const double sy = inner(Ps, y);
  const double yy = inner(Py, y);
  if (!(sy > 0.0) || !(yy > 0.0)) return fallback;
  return std::clamp(sy / yy, 1e-4, 1e2);
}

ConstrainedResult minimize_seminorm(const ProblemContext& ctx, Field u0, const SolverOptions& opts,
                                    double tol) {
  ConstrainedResult out{.u = u0};
  DescentState cur = evaluate_constrained(ctx, std::move(u0));
  out.history.push_back(cur.objective);
  const bool adaptive = opts.step_rule == StepRule::adaptive_two_point;
  double step = adaptive ? 0.25 : opts.fixed_step;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (cur.residual <= tol) {
      out.converged = true;
      break;
    }
    std::optional<DescentState> next;
    double trial = step;
    for (int bt = 0; bt < 40 && !next; ++bt, trial *= 0.5) {
      Field v = cur.u;
      v.axpy(-trial, cur.dir);
      try {
        auto scaled = scale_to_S_inf_near(ctx, v, 1.0);
        auto cand = evaluate_constrained(ctx, std::move(scaled.field));
        if (cand.objective <= cur.objective * (1.0 + objective_slack)) next = std::move(cand);
      } catch (const Error&) {
      }
    }
    if (!next) break;
    step = adaptive ? two_point_step(ctx, cur, *next, 0.25) : opts.fixed_step;
    cur = std::move(*next);
    out.history.push_back(cur.objective);
  }
  out.iterations = it;
  out.converged = out.converged || cur.residual <= tol;
  out.seminorm = cur.objective;
  out.multiplier = cur.multiplier;
  out.residual = cur.residual;
  out.u = std::move(cur.u);
  return out;
}

}  // namespace

double symmetry_defect(const Field& w) {
  const auto& g = w.grid();
  const int n = g.n_dims();
  const long N = g.points_per_dim();
  const double peak = w.max_abs();
  if (peak == 0.0) return 0.0;
  const auto v = w.values();
  auto index_of = [&](const std::array<long, 3>& idx) {
    std::size_t flat = 0;
    for (int a = 0; a < n; ++a) flat = flat * N + static_cast<std::size_t>(idx[a]);
    return flat;
  };
  double worst = 0.0;
  std::array<long, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    std::size_t rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = static_cast<long>(rem % N);
      rem /= N;
    }
    // the grid is symmetric about index N/2
    for (int a = 0; a < n; ++a) {
      auto r = idx;
      r[a] = (N - idx[a]) % N;
      worst = std::max(worst, std::abs(v[flat] - v[index_of(r)]));
    }
    for (int a = 0; a + 1 < n; ++a) {
      auto r = idx;
      std::swap(r[a], r[a + 1]);
      worst = std::max(worst, std::abs(v[flat] - v[index_of(r)]));
    }
  }
  return worst / peak;
}

double negative_mass(const Field& w) {
  double neg = 0.0, total = 0.0;
  for (double x : w.values()) {
    total += x * x;
    if (x < 0.0) neg += x * x;
  }
  return total > 0.0 ? neg / total : 0.0;
}

double relative_dual_residual(const ProblemContext& ctx, const Field& gradient, const Field& u) {
  const Field r = apply_symbol(gradient, ctx.riesz_symbol());
  const double num = std::sqrt(std::max(inner(gradient, r), 0.0));
  const double den = hs_norm(ctx, u);
  return den > 0.0 ? num / den : num;
}

Field initial_guess(const ProblemContext& ctx, const InitSpec& init) {
  const auto& g = ctx.grid();
  if (init.kind == InitSpec::Kind::file) {
    auto file = read_field(init.path);
    if (file.field.grid() == g) return std::move(file.field);
    if (file.field.grid().n_dims() != g.n_dims())
      throw Error(ErrorCode::grid_mismatch, "initial field has a different dimension");
    return resample(file.field, g);
  }
  const double width = init.width > 0.0 ? init.width : 0.1 * g.box_length();
  const int n = g.n_dims();
  Field bump = Field::from_function(g, [&](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    return std::exp(-0.5 * r2 / (width * width));
  });
  if (init.amplitude > 0.0) return init.amplitude * bump;
  try {
    return std::move(scale_to_level(ctx, bump, 2.0).field);
  } catch (const Error&) {
    throw Error(ErrorCode::init_too_weak, "initial bump cannot reach int G_inf = 2");
  }
}

GroundState solve_ground_state_limit(const ProblemContext& ctx, const SolverOptions& opts) {
  if (opts.max_iters < 1 || !(opts.grad_tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "solver needs max_iters >= 1 and grad_tol > 0");
  const auto& grid = ctx.grid();
  const auto& p = ctx.params();
  const double L = grid.box_length();
  const double inner_tol = 0.1 * opts.grad_tol;

  const Field init = initial_guess(ctx, opts.init);
  if (init.max_abs() == 0.0) throw Error(ErrorCode::init_too_weak, "initial field is zero");

  // The constrained minimizer u on a box B solves 2(-D)^s u = mu g_inf(u); the
  // same samples read on the box tau B with tau^{2s} = mu/2 solve the equation.
  // B is updated until tau B = L, so the final samples need no interpolation.
  double box = L;
  std::optional<ConstrainedResult> res;
  double prev_box = 0.0, prev_mismatch = 0.0;
  int updates = 0;
  int total_iters = 0;
  bool box_converged = false;
  for (; updates < opts.max_box_updates; ++updates) {
    const ProblemContext cb = box == L ? ctx : ctx.with_grid(make_grid(grid.n_dims(), grid.points_per_dim(), box));
    const Field start = res ? resample(res->u, cb.grid()) : init;
    auto scaled = [&] {
      try {
        return scale_to_S_inf(cb, start);
      } catch (const Error&) {
        if (!res) throw Error(ErrorCode::init_too_weak, "initial field cannot reach int G_inf = 1");
        throw;
      }
    }();
    res = minimize_seminorm(cb, std::move(scaled.field), opts, inner_tol);
    total_iters += res->iterations;
    const double tau = std::pow(0.5 * res->multiplier, 1.0 / (2.0 * p.s));
    const double mismatch = box * tau - L;
    if (std::abs(mismatch) <= 1e-12 * L) {
      box_converged = true;
      break;
    }
    double next = updates == 0 ? L / tau : box - mismatch * (box - prev_box) / (mismatch - prev_mismatch);
    if (!std::isfinite(next)) next = L / tau;
    next = std::clamp(next, 0.25 * box, 4.0 * box);
    prev_box = box, prev_mismatch = mismatch;
    box = next;
  }
  if (!res) throw Error(ErrorCode::stalled, "no descent was performed");

  Field w = relabel(res->u, grid);
  LatticeShift shift{0, 0, 0};
  try {
    const auto b = beta(w);
    for (int a = 0; a < grid.n_dims(); ++a) shift[a] = -std::lround(b.beta[a] / grid.spacing());
    if (shift != LatticeShift{0, 0, 0}) w = translate(w, shift);
  } catch (const Error&) {
  }

  GroundState gs{.field = w};
  gs.energy = energy_I_inf(ctx, w);
  gs.el_residual = relative_dual_residual(ctx, gradient_I_inf(ctx, w), w);
  gs.pohozaev_residual = std::abs(pohozaev_J_inf(ctx, w)) / (p.n * gs.energy);
  gs.negative_mass = negative_mass(w);
  gs.boundary_mass = boundary_mass(w);
  gs.symmetry_defect = symmetry_defect(w);
  gs.iterations = total_iters;
  gs.box_updates = updates;
  gs.s_inf_seminorm_sq = res->seminorm;
  gs.constraint_box = box;
  gs.multiplier = res->multiplier;
  gs.recenter_shift = shift;
  gs.objective_history = std::move(res->history);
  gs.converged = res->converged && box_converged && gs.el_residual <= opts.grad_tol;
  gs.status = gs.converged ? "converged" : "stalled";
  return gs;
}

NonautonomousReport solve_nonautonomous(const ProblemContext& ctx, const Field& init,
                                        const SolverOptions& opts, double c_inf) {
  if (init.max_abs() == 0.0) throw Error(ErrorCode::init_too_weak, "initial field is zero");
  if (!(g_inf_integral(ctx, init) > 0.0))
    throw Error(ErrorCode::init_too_weak, "initial field has int G_inf <= 0");
  const auto& p = ctx.params();

  if (ctx.coeff().autonomous()) {
    auto gs = solve_ground_state_limit(ctx, opts);
    NonautonomousReport rep{.field = gs.field};
    rep.energy = gs.energy;
    rep.el_residual = gs.el_residual;
    rep.pohozaev_residual = std::abs(pohozaev_J(ctx, gs.field)) / (p.n * std::abs(gs.energy));
    rep.negative_mass = gs.negative_mass;
    rep.boundary_mass = gs.boundary_mass;
    rep.converged = gs.converged;
    rep.above_c_inf = std::isnan(c_inf) ? false : gs.energy > c_inf;
    rep.iterations = gs.iterations;
    rep.outcome = gs.converged ? "autonomous coefficient: limiting ground state" : "stalled";
    return rep;
  }

  const double start_norm = hs_norm(ctx, init);
  Field u = init;
  double E = energy_I(ctx, u);
  Field grad = gradient_I(ctx, u);
  Field dir = apply_symbol(grad, ctx.riesz_symbol());
  const bool adaptive = opts.step_rule == StepRule::adaptive_two_point;
  double step = adaptive ? 0.25 : opts.fixed_step;
  NonautonomousReport rep{.field = init};
  rep.outcome = "stalled: iteration budget exhausted";
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double slope = std::max(inner(grad, dir), 0.0);
    const double norm = hs_norm(ctx, u);
    if (norm < 1e-6 * start_norm) {
      rep.outcome = "stalled: descent collapsed to the trivial solution";
      break;
    }
    if (norm > 1e3 * start_norm) {
      rep.outcome = "stalled: energy unbounded below along the descent";
      break;
    }
    if (std::sqrt(slope) / norm <= opts.grad_tol) {
      rep.converged = true;
      rep.outcome = "converged";
      break;
    }
    bool accepted = false;
    double trial = step;
    for (int bt = 0; bt < 40; ++bt, trial *= 0.5) {
      Field v = u;
      v.axpy(-trial, dir);
      const double Ev = energy_I(ctx, v);
      if (Ev <= E - 1e-4 * trial * slope) {
        Field g2 = gradient_I(ctx, v);
        Field d2 = apply_symbol(g2, ctx.riesz_symbol());
        if (adaptive) {
          Field s = v - u;
          Field y = g2 - grad;
          const double sy = inner(s, y);
          const double yy = inner(d2 - dir, y);
          step = (sy > 0.0 && yy > 0.0) ? std::clamp(sy / yy, 1e-4, 1e2) : 0.25;
        }
        u = std::move(v), E = Ev, grad = std::move(g2), dir = std::move(d2);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.outcome = "stalled: line search failed";
      break;
    }
  }
  rep.iterations = it;
  rep.energy = E;
  rep.el_residual = relative_dual_residual(ctx, grad, u);
  rep.pohozaev_residual = E != 0.0 ? std::abs(pohozaev_J(ctx, u)) / (p.n * std::abs(E)) : 0.0;
  rep.negative_mass = negative_mass(u);
  rep.boundary_mass = boundary_mass(u);
  rep.above_c_inf = !std::isnan(c_inf) && E > c_inf;
  rep.field = std::move(u);
  return rep;
}

}  // namespace fraclab
