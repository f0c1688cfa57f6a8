#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fraclab/config.hpp"
#include "fraclab/error.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/field_io.hpp"
#include "support.hpp"

using namespace fraclab;
using fraclab::testing::default_context;
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

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fraclab_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("configuration defaults and overrides") {
  const auto cfg = parse_config("");
  CHECK(cfg.params.n == 2);
  CHECK(cfg.params.s == 0.5);
  CHECK(cfg.grid.points_per_dim == 128);
  CHECK(cfg.coefficient.c == 0.5);
  CHECK(cfg.scan_radii.size() == 7);
  CHECK(cfg.seed == 20240917u);
  CHECK(cfg.tolerances.boundary_mass == 1e-6);
  CHECK(Tolerances::fields().size() == 25);

  const auto o = parse_config(R"(
grid: {points_per_dim: 64, box_length: 20}
coefficient: {c: 0.1, k: 0.25}
model: {kind: power, exponent: 2.5}
scan: {radii: [1, 3]}
tolerances: {boundary_mass: 1.0e-3}
seed: 7
)");
  CHECK(o.grid.points_per_dim == 64);
  CHECK(o.coefficient.k == 0.25);
  CHECK(o.model.build().kind() == NonlinearityModel::Kind::power);
  CHECK(o.model.build().exponent() == 2.5);
  CHECK(o.scan_radii == std::vector<double>{1.0, 3.0});
  CHECK(o.tolerances.boundary_mass == 1e-3);
  CHECK(o.tolerance_overrides == std::vector<std::string>{"boundary_mass"});
  CHECK(o.seed == 7u);
  CHECK(o.context().grid().box_length() == 20.0);
}

TEST_CASE("configuration errors") {
  CHECK(code_of([] { (void)parse_config("params: {n: 1, s: 0.6}"); }) == ErrorCode::invalid_params);
  CHECK(code_of([] { (void)parse_config("params: {lambda: 3.0}"); }) == ErrorCode::invalid_params);
  CHECK(code_of([] { (void)parse_config("grid: {points_per_dim: 63}"); }) == ErrorCode::invalid_size);
  CHECK(code_of([] { (void)parse_config("params: {n: 2, colour: red}"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)parse_config("bogus: 1"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)parse_config("grid: [1, 2"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)parse_config("grid: {points_per_dim: many}"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)parse_config("tolerances: {made_up: 1.0}"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)parse_config("tolerances: {el_residual: -1.0}"); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { (void)parse_config("model: {kind: cubic}"); }) == ErrorCode::config_parse);
  CHECK(code_of([] { (void)load_config("/nonexistent/config.yaml"); }) == ErrorCode::config_parse);
}

TEST_CASE("field files round-trip bit for bit") {
  const auto g = make_grid(2, 32, 12.5);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  const Field u = Field::from_function(g, [&](const Point&) { return d(rng); });
  const Params p{2, 0.5, 1.0, 2.0};
  const auto path = scratch("roundtrip.fld");
  write_field(path, u, p);
  const auto back = read_field(path);
  CHECK(back.header.n == 2);
  CHECK(back.header.points_per_dim == 32);
  CHECK(back.header.box_length == 12.5);
  CHECK(back.header.s == 0.5);
  CHECK(back.field.grid() == g);
  CHECK(std::equal(u.values().begin(), u.values().end(), back.field.values().begin()));

  // truncated payload
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK(code_of([&] { (void)read_field(path); }) == ErrorCode::io_error);
  {
    std::ofstream junk(path, std::ios::binary | std::ios::trunc);
    junk << "not a field";
  }
  CHECK(code_of([&] { (void)read_field(path); }) == ErrorCode::io_error);
  CHECK(code_of([&] { (void)read_field(scratch("missing.fld")); }) == ErrorCode::io_error);
}

TEST_CASE("translate scan rows") {
  const auto ctx = default_context();
  const Field w = gaussian(ctx.grid(), 3.0, 1.5);
  const std::vector<double> radii{0.0, 3.0, 7.5};
  const auto scan = run_translate_scan(ctx, w, radii);
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.core_radius > 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto& row = scan.rows[i];
    const Point y{radii[i], 0.0, 0.0};
    const auto pr = project_to_P(ctx, shift_interpolated(w, y), y);
    CHECK(row.radius == radii[i]);
    CHECK(row.theta_y == pr.theta);
    CHECK(row.analytic_residual < 1e-10);
    CHECK(row.beta_of_Pi_y[0] == doctest::Approx(radii[i]).epsilon(1e-2 + 1e-3));
    CHECK(scan.theta_hat >= row.theta_y);
  }
  // the centered row is the projection of w itself
  CHECK(scan.rows[0].I_of_Pi_y == doctest::Approx(dilation_energy(ctx, w, scan.rows[0].theta_y, false)).epsilon(1e-13));

  const std::vector<double> far{19.0};
  CHECK(code_of([&] { (void)run_translate_scan(ctx, w, far); }) == ErrorCode::margin_violation);

  const auto csv = scan_csv(scan, 2);
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "radius,theta_y,I_of_Pi_y,beta_of_Pi_y,residual_J");
  CHECK(first.rfind("0,", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), ',') == 4);
  CHECK(std::count(first.begin(), first.end(), ';') == 1);
}

TEST_CASE("bound report on the coefficient deficit") {
  const auto ctx = default_context();
  const Field w = gaussian(ctx.grid(), 3.0, 1.5);
  TranslateScan scan;
  scan.rows.resize(2);
  scan.rows[0].I_of_Pi_y = 1.0;
  scan.rows[1].I_of_Pi_y = 1.5;
  const double mass = inner(w, w);

  // bound = c_inf theta^-2 / (|w|^2 C_F) = 2 / mass at c_inf = 1, theta = 1
  const auto flat = ctx.with_coeff(CoefficientField{2.0, 0.0, 0.5});
  const auto met = check_A6_bound(flat, w, 1.0, 1.0, scan);
  CHECK(met.bound == doctest::Approx(2.0 / mass).epsilon(1e-15));
  CHECK(met.hypothesis_met);
  CHECK(met.max_ratio == 1.5);
  CHECK(met.rows_below_two_c_inf);

  const auto unmet = check_A6_bound(ctx, w, 1.0, 1.0, scan);
  REQUIRE(unmet.deficit > unmet.bound);
  CHECK_FALSE(unmet.hypothesis_met);
  CHECK(unmet.verdict == "hypothesis (A6) unmet");
  CHECK(unmet.max_ratio == 0.0);

  scan.rows[1].I_of_Pi_y = 2.0;
  CHECK_FALSE(check_A6_bound(flat, w, 1.0, 1.0, scan).rows_below_two_c_inf);
}

TEST_CASE("text output creates parent directories") {
  const auto path = scratch("nested/deeper/out.txt");
  std::filesystem::remove_all(path.parent_path().parent_path());
  write_text(path, "abc\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "abc");
}
