#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fraclab/error.hpp"

namespace fraclab {

// Physical point; coordinates beyond the grid dimension are ignored.
using Point = std::array<double, 3>;
// Integer displacement in grid cells per axis.
using LatticeShift = std::array<long, 3>;

struct Params {
  int n = 2;
  double s = 0.5;
  double lambda = 1.0;
  double a_inf = 2.0;

  // Throws invalid-params unless n >= 1, 0 < s <= 1, n > 2s, lambda > 0, a_inf > lambda.
  void validate() const;
  // 2n/(n-2s)
  [[nodiscard]] double critical_exponent() const { return 2.0 * n / (n - 2.0 * s); }
};

// Periodic box [-L/2, L/2)^n sampled at N points per axis, with real-to-complex
// FFT plans and the wavenumber magnitudes of the half spectrum.
class SpectralGrid {
public:
  [[nodiscard]] int n_dims() const noexcept;
  [[nodiscard]] int points_per_dim() const noexcept;
  [[nodiscard]] double box_length() const noexcept;
  [[nodiscard]] double spacing() const noexcept;
  [[nodiscard]] double cell_volume() const noexcept;
  // N^n
  [[nodiscard]] std::size_t size() const noexcept;
  // N^(n-1) * (N/2 + 1)
  [[nodiscard]] std::size_t spectrum_size() const noexcept;
  // |xi_k| for every half-spectrum mode, xi = 2 pi k / L, k in [-N/2, N/2).
  [[nodiscard]] std::span<const double> wavenumber_magnitude() const noexcept;
  // Multiplicity of each half-spectrum mode in the full spectrum (1 or 2).
  [[nodiscard]] std::span<const double> parseval_weight() const noexcept;

  [[nodiscard]] double coordinate(long index) const noexcept;
  [[nodiscard]] Point point(std::size_t flat) const noexcept;
  // |xi_k|^(2 order) per half-spectrum mode; the zero mode maps to 0.
  [[nodiscard]] std::vector<double> symbol(double order) const;

  // Unnormalized forward transform.
  void forward(std::span<const double> values, std::span<std::complex<double>> spectrum) const;
  // Inverse transform including the 1/N^n factor.
  void inverse(std::span<const std::complex<double>> spectrum, std::span<double> values) const;

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) noexcept;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  friend SpectralGrid make_grid(int n_dims, int points_per_dim, double box_length);
};

SpectralGrid make_grid(int n_dims, int points_per_dim, double box_length);

class Field {
public:
  explicit Field(SpectralGrid grid);
  Field(SpectralGrid grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(const SpectralGrid& grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.point(i));
    return Field(grid, std::move(v));
  }

  [[nodiscard]] const SpectralGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double factor) noexcept;
  // this += factor * other
  Field& axpy(double factor, const Field& other);

  [[nodiscard]] double max_abs() const noexcept;

private:
  SpectralGrid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double factor, Field a);
// Pointwise product.
Field hadamard(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b);

// Multiplies the spectrum by a real symbol laid out like SpectralGrid::symbol.
Field apply_symbol(const Field& u, std::span<const double> symbol);
Field fractional_laplacian(const Field& u, double s);

// dv/N^n * sum_k w_k symbol_k |u_k|^2
double spectral_quadratic_form(const Field& u, std::span<const double> symbol);
double seminorm_sq(const Field& u, double s);
double integrate(const Field& u);
// Integral of u*v.
double inner(const Field& u, const Field& v);
double hs_norm(const Field& u, const Params& params);

Field translate(const Field& u, const LatticeShift& shift);
// Displacement in physical units; throws non-lattice-shift unless it is a whole number of cells.
Field translate(const Field& u, const Point& displacement);
LatticeShift lattice_shift_of(const SpectralGrid& grid, const Point& displacement);
// x -> u(x - displacement) through the trigonometric interpolant; any displacement.
Field shift_interpolated(const Field& u, const Point& displacement);

struct Dilation {
  Field field;
  double boundary_mass = 0.0;
  bool support_overflow = false;
};

// Samples x -> u((x - center)/theta + center) through the trigonometric interpolant of u.
Dilation dilate(const Field& u, double theta, const Point& center, double overflow_tol = 1e-6);
// Trigonometric interpolant of u evaluated on the points of another grid (periodic extension).
Field resample(const Field& u, const SpectralGrid& target);
// Same samples read as a field on another grid with identical n and N.
Field relabel(const Field& u, const SpectralGrid& target);

// Fraction of the L2 mass outside the central half-box |x_i| < L/4.
double boundary_mass(const Field& u);

}  // namespace fraclab
