#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fraclab/functionals.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

struct GridSpec {
  int points_per_dim = 128;
  double box_length = 40.0;
};

struct ModelSpec {
  NonlinearityModel::Kind kind = NonlinearityModel::Kind::asymptotically_linear;
  double exponent = 3.0;  // power models only
  double tau = 1.0;

  [[nodiscard]] NonlinearityModel build() const;
};

// Check thresholds of the verification suite. Every value here is the
// shipped default; a config file may override individual entries by name.
struct Tolerances {
  double spectral_rel = 1e-10;
  double fd_rate_min = 1.8;
  double fd_rate_max = 2.2;
  double gradient_rel = 1e-6;
  double el_residual = 1e-6;
  double pohozaev_residual = 1e-2;
  double negative_mass = 1e-12;
  double boundary_mass = 1e-6;
  double grid_doubling_rel = 1e-3;
  double multi_start_rel = 1e-4;
  double level_gap_rel = 1e-6;
  double energy_identity_rel = 1e-8;
  double trial_slack = 1e-3;
  double theta1_residual = 1e-9;
  double autonomous_theta = 1e-9;
  double rewriting_rel = 1e-8;
  double stationarity_rel = 1e-5;
  double weak_form_factor = 10.0;
  double scan_theta_last = 0.05;
  double scan_energy_last = 0.05;
  double scan_beta_cells = 2.0;
  double scan_trend_noise = 1e-4;
  double nonexist_margin = 1e-6;
  double beta_continuity = 1e-3;
  double nonautonomous_pohozaev = 1e-2;

  // name -> member, used for overrides and for reporting
  static const std::map<std::string, double Tolerances::*>& fields();
};

struct ExperimentConfig {
  Params params;
  GridSpec grid;
  CoefficientField coefficient;
  ModelSpec model;
  SolverOptions solver;
  std::vector<double> scan_radii{2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0};
  std::filesystem::path output_directory = "out";
  std::uint64_t seed = 20240917;
  Tolerances tolerances;
  std::vector<std::string> tolerance_overrides;

  // Throws invalid-params / invalid-size / invalid-dimension / invalid-argument.
  void validate() const;
  [[nodiscard]] ProblemContext context() const;
};

// Parse a YAML document; throws config-parse on malformed input and then runs validate().
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace fraclab
