#include "fraclab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fraclab {

NonlinearityModel ModelSpec::build() const {
  if (kind == NonlinearityModel::Kind::power) return NonlinearityModel::power(exponent);
  return NonlinearityModel::asymptotically_linear();
}

const std::map<std::string, double Tolerances::*>& Tolerances::fields() {
  static const std::map<std::string, double Tolerances::*> table{
      {"spectral_rel", &Tolerances::spectral_rel},
      {"fd_rate_min", &Tolerances::fd_rate_min},
      {"fd_rate_max", &Tolerances::fd_rate_max},
      {"gradient_rel", &Tolerances::gradient_rel},
      {"el_residual", &Tolerances::el_residual},
      {"pohozaev_residual", &Tolerances::pohozaev_residual},
      {"negative_mass", &Tolerances::negative_mass},
      {"boundary_mass", &Tolerances::boundary_mass},
      {"grid_doubling_rel", &Tolerances::grid_doubling_rel},
      {"multi_start_rel", &Tolerances::multi_start_rel},
      {"level_gap_rel", &Tolerances::level_gap_rel},
      {"energy_identity_rel", &Tolerances::energy_identity_rel},
      {"trial_slack", &Tolerances::trial_slack},
      {"theta1_residual", &Tolerances::theta1_residual},
      {"autonomous_theta", &Tolerances::autonomous_theta},
      {"rewriting_rel", &Tolerances::rewriting_rel},
      {"stationarity_rel", &Tolerances::stationarity_rel},
      {"weak_form_factor", &Tolerances::weak_form_factor},
      {"scan_theta_last", &Tolerances::scan_theta_last},
      {"scan_energy_last", &Tolerances::scan_energy_last},
      {"scan_beta_cells", &Tolerances::scan_beta_cells},
      {"scan_trend_noise", &Tolerances::scan_trend_noise},
      {"nonexist_margin", &Tolerances::nonexist_margin},
      {"beta_continuity", &Tolerances::beta_continuity},
      {"nonautonomous_pohozaev", &Tolerances::nonautonomous_pohozaev},
  };
  return table;
}

void ExperimentConfig::validate() const {
  params.validate();
  (void)make_grid(params.n, grid.points_per_dim, grid.box_length);
  if (coefficient.a_inf != params.a_inf)
    throw Error(ErrorCode::invalid_params, "coefficient a_inf differs from params a_inf");
  if (!(coefficient.c >= 0.0) || !(coefficient.k > 0.0))
    throw Error(ErrorCode::invalid_params, "coefficient needs c >= 0 and k > 0");
  if (model.kind == NonlinearityModel::Kind::power && !(model.exponent > 1.0))
    throw Error(ErrorCode::invalid_params, "power model needs exponent > 1");
  if (solver.max_iters < 1 || !(solver.grad_tol > 0.0))
    throw Error(ErrorCode::invalid_argument, "solver needs max_iters >= 1 and grad_tol > 0");
  for (double r : scan_radii)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw Error(ErrorCode::invalid_argument, "scan radii must be finite and nonnegative");
  for (const auto& [name, member] : Tolerances::fields())
    if (!(tolerances.*member > 0.0) || !std::isfinite(tolerances.*member))
      throw Error(ErrorCode::invalid_argument, "tolerance '" + name + "' must be positive");
}

ProblemContext ExperimentConfig::context() const {
  return ProblemContext(make_grid(params.n, grid.points_per_dim, grid.box_length), params,
                        model.build(), coefficient);
}

namespace {

template <typename T>
void read_if(const YAML::Node& node, const char* key, T& out) {
  if (!node) return;
  if (const auto child = node[key]) out = child.as<T>();
}

void reject_unknown(const YAML::Node& node, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!node) return;
  if (!node.IsMap()) throw Error(ErrorCode::config_parse, where + " must be a mapping");
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || name == k;
    if (!known) throw Error(ErrorCode::config_parse, "unknown key '" + name + "' in " + where);
  }
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  ExperimentConfig cfg;
  if (!root || root.IsNull()) return cfg;
  reject_unknown(root,
                 {"params", "grid", "coefficient", "model", "solver", "scan", "output", "seed",
                  "tolerances"},
                 "document");

  const auto p = root["params"];
  reject_unknown(p, {"n", "s", "lambda", "a_inf"}, "params");
  read_if(p, "n", cfg.params.n);
  read_if(p, "s", cfg.params.s);
  read_if(p, "lambda", cfg.params.lambda);
  read_if(p, "a_inf", cfg.params.a_inf);
  cfg.coefficient.a_inf = cfg.params.a_inf;

  const auto g = root["grid"];
  reject_unknown(g, {"points_per_dim", "box_length"}, "grid");
  read_if(g, "points_per_dim", cfg.grid.points_per_dim);
  read_if(g, "box_length", cfg.grid.box_length);

  const auto c = root["coefficient"];
  reject_unknown(c, {"a_inf", "c", "k"}, "coefficient");
  read_if(c, "a_inf", cfg.coefficient.a_inf);
  read_if(c, "c", cfg.coefficient.c);
  read_if(c, "k", cfg.coefficient.k);

  const auto m = root["model"];
  reject_unknown(m, {"kind", "exponent", "tau"}, "model");
  if (m && m["kind"]) {
    const auto kind = m["kind"].as<std::string>();
    if (kind == "asymptotically_linear") cfg.model.kind = NonlinearityModel::Kind::asymptotically_linear;
    else if (kind == "power") cfg.model.kind = NonlinearityModel::Kind::power;
    else throw Error(ErrorCode::config_parse, "unknown model kind '" + kind + "'");
  }
  read_if(m, "exponent", cfg.model.exponent);
  read_if(m, "tau", cfg.model.tau);

  const auto s = root["solver"];
  reject_unknown(s, {"max_iters", "grad_tol", "step_rule", "fixed_step", "max_box_updates", "init"},
                 "solver");
  read_if(s, "max_iters", cfg.solver.max_iters);
  read_if(s, "grad_tol", cfg.solver.grad_tol);
  read_if(s, "fixed_step", cfg.solver.fixed_step);
  read_if(s, "max_box_updates", cfg.solver.max_box_updates);
  if (s && s["step_rule"]) {
    const auto rule = s["step_rule"].as<std::string>();
    if (rule == "fixed") cfg.solver.step_rule = StepRule::fixed;
    else if (rule == "adaptive_two_point") cfg.solver.step_rule = StepRule::adaptive_two_point;
    else throw Error(ErrorCode::config_parse, "unknown step rule '" + rule + "'");
  }
  if (s && s["init"]) {
    const auto init = s["init"];
    reject_unknown(init, {"kind", "width", "amplitude", "path"}, "solver.init");
    if (init["kind"]) {
      const auto kind = init["kind"].as<std::string>();
      if (kind == "gaussian") cfg.solver.init.kind = InitSpec::Kind::gaussian;
      else if (kind == "file") cfg.solver.init.kind = InitSpec::Kind::file;
      else throw Error(ErrorCode::config_parse, "unknown init kind '" + kind + "'");
    }
    read_if(init, "width", cfg.solver.init.width);
    read_if(init, "amplitude", cfg.solver.init.amplitude);
    read_if(init, "path", cfg.solver.init.path);
  }

  const auto scan = root["scan"];
  reject_unknown(scan, {"radii"}, "scan");
  read_if(scan, "radii", cfg.scan_radii);

  const auto out = root["output"];
  reject_unknown(out, {"directory"}, "output");
  if (out && out["directory"]) cfg.output_directory = out["directory"].as<std::string>();

  read_if(root, "seed", cfg.seed);

  if (const auto tol = root["tolerances"]) {
    if (!tol.IsMap()) throw Error(ErrorCode::config_parse, "tolerances must be a mapping");
    const auto& table = Tolerances::fields();
    for (const auto& kv : tol) {
      const auto name = kv.first.as<std::string>();
      const auto it = table.find(name);
      if (it == table.end()) throw Error(ErrorCode::config_parse, "unknown tolerance '" + name + "'");
      cfg.tolerances.*(it->second) = kv.second.as<double>();
      cfg.tolerance_overrides.push_back(name);
    }
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  try {
    cfg = from_yaml(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::config_parse, e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_parse, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fraclab
