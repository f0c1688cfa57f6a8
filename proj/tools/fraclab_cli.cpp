#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclab/barycenter.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/field_io.hpp"
#include "fraclab/verify.hpp"

namespace {

using fraclab::ExperimentConfig;
using fraclab::Field;
using nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? fraclab::parse_config("") : fraclab::load_config(g.config);
  if (!g.out.empty()) cfg.output_directory = g.out;
  if (g.seed) cfg.seed = *g.seed;
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_directory, ec);
  if (ec) throw fraclab::Error(fraclab::ErrorCode::io_error, "cannot create " + cfg.output_directory.string());
  return cfg;
}

void say(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cout << line << '\n';
}

ordered_json point_json(const fraclab::Point& p, int n) {
  ordered_json arr = ordered_json::array();
  for (int a = 0; a < n; ++a) arr.push_back(p[a]);
  return arr;
}

Field field_from(const fraclab::ProblemContext& ctx, const ExperimentConfig& cfg, const std::string& input,
                 const Globals& g) {
  if (!input.empty()) {
    auto file = fraclab::read_field(input);
    if (file.field.grid() == ctx.grid()) return std::move(file.field);
    return fraclab::resample(file.field, ctx.grid());
  }
  say(g, "solving the limiting ground state");
  return fraclab::solve_ground_state_limit(ctx, cfg.solver).field;
}

int run_verify(const Globals& g) {
  const auto cfg = load(g);
  fraclab::VerifyOptions opts;
  if (!g.quiet) opts.progress = [](const std::string& stage) { std::cout << "stage " << stage << std::endl; };
  const auto report = fraclab::run_verify_suite(cfg, opts);
  fraclab::write_text(cfg.output_directory / "verify.json", fraclab::report_json(report));
  if (!g.quiet) {
    for (const auto& s : report.stages)
      for (const auto& c : s.checks)
        if (!c.passed)
          std::printf("FAIL %-14s %-40s value=%.6g tol=%.6g %s\n", s.name.c_str(), c.name.c_str(), c.value,
                      c.tolerance, c.detail.c_str());
    for (const auto& [id, ok] : report.criteria()) std::printf("%-4s %s\n", id.c_str(), ok ? "pass" : "FAIL");
  }
  return report.passed() ? 0 : 1;
}

int run_ground_state(const Globals& g) {
  const auto cfg = load(g);
  const auto ctx = cfg.context();
  const auto gs = fraclab::solve_ground_state_limit(ctx, cfg.solver);
  fraclab::write_field(cfg.output_directory / "ground_state.fld", gs.field, cfg.params);
  ordered_json j;
  j["status"] = gs.status;
  j["energy"] = gs.energy;
  j["el_residual"] = gs.el_residual;
  j["pohozaev_residual"] = gs.pohozaev_residual;
  j["negative_mass"] = gs.negative_mass;
  j["boundary_mass"] = gs.boundary_mass;
  j["symmetry_defect"] = gs.symmetry_defect;
  j["iterations"] = gs.iterations;
  j["box_updates"] = gs.box_updates;
  j["s_inf_seminorm_sq"] = gs.s_inf_seminorm_sq;
  j["constraint_box"] = gs.constraint_box;
  fraclab::write_text(cfg.output_directory / "ground_state.json", j.dump(2) + "\n");
  say(g, j.dump(2));
  return gs.converged ? 0 : 1;
}

int run_project(const Globals& g, const std::string& input, std::vector<double> center) {
  const auto cfg = load(g);
  const auto ctx = cfg.context();
  const Field u = field_from(ctx, cfg, input, g);
  fraclab::Point c{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < center.size() && a < 3; ++a) c[a] = center[a];
  const auto to_inf = fraclab::project_to_P_inf(ctx, u);
  const auto to_P = fraclab::project_to_P(ctx, u, c);
  ordered_json j;
  auto proj = [](const fraclab::ProjectionResult& r) {
    ordered_json p;
    p["theta"] = r.theta;
    p["residual"] = r.residual;
    p["analytic_residual"] = r.analytic_residual;
    p["bracket"] = {r.bracket.first, r.bracket.second};
    p["iterations"] = r.iterations;
    p["multiple_roots_flag"] = r.multiple_roots_flag;
    p["boundary_warning"] = r.boundary_warning;
    return p;
  };
  j["limit_manifold"] = proj(to_inf);
  j["manifold"] = proj(to_P);
  j["center"] = point_json(c, cfg.params.n);
  fraclab::write_field(cfg.output_directory / "projected.fld", to_P.field, cfg.params);
  fraclab::write_text(cfg.output_directory / "project.json", j.dump(2) + "\n");
  say(g, j.dump(2));
  return 0;
}

int run_levels(const Globals& g) {
  const auto cfg = load(g);
  const auto ctx = cfg.context();
  const auto gs = fraclab::solve_ground_state_limit(ctx, cfg.solver);
  const auto lv = fraclab::mp_level_estimate(ctx, gs.field, gs.s_inf_seminorm_sq);
  ordered_json j;
  j["m_estimate"] = lv.m_estimate;
  j["c_inf_estimate"] = lv.c_inf_estimate;
  j["theta_at_max"] = lv.theta_at_max;
  j["path_endpoint"] = lv.path_endpoint;
  j["energy_of_w"] = lv.energy_of_w;
  j["seminorm_term_of_w"] = lv.seminorm_term_of_w;
  fraclab::write_text(cfg.output_directory / "levels.json", j.dump(2) + "\n");
  say(g, j.dump(2));
  return 0;
}

int run_scan(const Globals& g, const std::string& input) {
  const auto cfg = load(g);
  const auto ctx = cfg.context();
  const auto gs = fraclab::solve_ground_state_limit(ctx, cfg.solver);
  const Field w = input.empty() ? gs.field : field_from(ctx, cfg, input, g);
  const auto lv = fraclab::mp_level_estimate(ctx, gs.field, gs.s_inf_seminorm_sq);
  const auto scan = fraclab::run_translate_scan(ctx, w, cfg.scan_radii);
  const auto a6 = fraclab::check_A6_bound(ctx, w, scan.theta_hat, lv.c_inf_estimate, scan);
  fraclab::write_text(cfg.output_directory / "scan.csv", fraclab::scan_csv(scan, cfg.params.n));
  ordered_json j;
  j["c_inf_estimate"] = lv.c_inf_estimate;
  j["theta_hat"] = scan.theta_hat;
  j["core_radius"] = scan.core_radius;
  j["A6"] = {{"bound", a6.bound},
             {"deficit", a6.deficit},
             {"hypothesis_met", a6.hypothesis_met},
             {"max_ratio", a6.max_ratio},
             {"verdict", a6.verdict}};
  fraclab::write_text(cfg.output_directory / "scan.json", j.dump(2) + "\n");
  if (!g.quiet) std::cout << fraclab::scan_csv(scan, cfg.params.n) << j.dump(2) << '\n';
  return 0;
}

int run_barycenter(const Globals& g, const std::string& input) {
  const auto cfg = load(g);
  const auto ctx = cfg.context();
  const Field u = field_from(ctx, cfg, input, g);
  const auto b = fraclab::beta(ctx, u);
  ordered_json j;
  j["beta"] = point_json(b.beta, cfg.params.n);
  j["max_mu"] = b.max_mu;
  j["support_cells"] = b.support_cells;
  fraclab::write_text(cfg.output_directory / "barycenter.json", j.dump(2) + "\n");
  say(g, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Schrodinger laboratory: ground states, Pohozaev projections, translate scans"};
  Globals g;
  app.add_option("--config", g.config, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory (overrides the config)");
  app.add_option("--seed", g.seed, "random seed (overrides the config)");
  app.add_flag("--quiet", g.quiet, "only write files");
  app.require_subcommand(1);

  std::string input;
  std::vector<double> center;
  auto* verify = app.add_subcommand("verify", "run every check and write verify.json");
  auto* ground = app.add_subcommand("ground-state", "solve the limiting problem and write the field");
  auto* project = app.add_subcommand("project", "project a field onto both Pohozaev manifolds");
  project->add_option("--input", input, "field file (default: the computed ground state)");
  project->add_option("--center", center, "dilation center for the nonautonomous projection")->delimiter(',');
  auto* levels = app.add_subcommand("levels", "least energy and mountain-pass level estimates");
  auto* scan = app.add_subcommand("scan", "translate scan and the A6 bound report");
  scan->add_option("--input", input, "field to translate (default: the computed ground state)");
  auto* bary = app.add_subcommand("barycenter", "barycenter of a field");
  bary->add_option("--input", input, "field file (default: the computed ground state)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (verify->parsed()) return run_verify(g);
    if (ground->parsed()) return run_ground_state(g);
    if (project->parsed()) return run_project(g, input, center);
    if (levels->parsed()) return run_levels(g);
    if (scan->parsed()) return run_scan(g, input);
    if (bary->parsed()) return run_barycenter(g, input);
  } catch (const fraclab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
