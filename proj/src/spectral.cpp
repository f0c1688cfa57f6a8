#include "fraclab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fraclab {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution with the
// new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

long ipow(long base, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

void Params::validate() const {
  std::ostringstream why;
  if (n < 1) why << "n must be >= 1; ";
  if (!(s > 0.0 && s <= 1.0)) why << "s must lie in (0,1]; ";
  if (!(n > 2.0 * s)) why << "n > 2s violated; ";
  if (!(lambda > 0.0)) why << "lambda must be positive; ";
  if (!(a_inf > lambda)) why << "a_inf > lambda violated; ";
  const auto msg = why.str();
  if (!msg.empty()) throw Error(ErrorCode::invalid_params, msg.substr(0, msg.size() - 2));
}

struct SpectralGrid::Impl {
  int n = 0;
  int N = 0;
  double L = 0.0;
  double h = 0.0;
  double dv = 0.0;
  std::size_t size = 0;
  std::size_t spec_size = 0;
  std::vector<double> kmag;
  std::vector<double> weight;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SpectralGrid make_grid(int n_dims, int points_per_dim, double box_length) {
  if (n_dims < 1 || n_dims > 3)
    throw Error(ErrorCode::invalid_dimension, "n_dims must be 1, 2 or 3");
  if (points_per_dim < 8 || !is_power_of_two(points_per_dim))
    throw Error(ErrorCode::invalid_size, "points_per_dim must be a power of two >= 8");
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw Error(ErrorCode::invalid_size, "box_length must be positive");

  auto impl = std::make_shared<SpectralGrid::Impl>();
  const int N = points_per_dim;
  impl->n = n_dims;
  impl->N = N;
  impl->L = box_length;
  impl->h = box_length / N;
  impl->dv = std::pow(impl->h, n_dims);
  impl->size = static_cast<std::size_t>(ipow(N, n_dims));
  const int half = N / 2 + 1;
  impl->spec_size = static_cast<std::size_t>(ipow(N, n_dims - 1)) * half;

  impl->kmag.resize(impl->spec_size);
  impl->weight.resize(impl->spec_size);
  const double dk = 2.0 * std::numbers::pi / box_length;
  auto signed_mode = [N](long i) { return i < N / 2 ? i : i - N; };
  for (std::size_t m = 0; m < impl->spec_size; ++m) {
    long rem = static_cast<long>(m);
    const long last = rem % half;
    rem /= half;
    double k2 = static_cast<double>(last * last);
    for (int a = 0; a < n_dims - 1; ++a) {
      const long k = signed_mode(rem % N);
      rem /= N;
      k2 += static_cast<double>(k * k);
    }
    impl->kmag[m] = dk * std::sqrt(k2);
    impl->weight[m] = (last == 0 || last == N / 2) ? 1.0 : 2.0;
  }

  std::vector<int> dims(n_dims, N);
  {
    std::lock_guard lock(planner_mutex());
    std::vector<double> rbuf(impl->size);
    auto* cbuf = fftw_alloc_complex(impl->spec_size);
    impl->fwd = fftw_plan_dft_r2c(n_dims, dims.data(), rbuf.data(), cbuf,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    impl->bwd = fftw_plan_dft_c2r(n_dims, dims.data(), cbuf, rbuf.data(),
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(cbuf);
  }

  SpectralGrid g;
  g.impl_ = std::move(impl);
  return g;
}

int SpectralGrid::n_dims() const noexcept { return impl_->n; }
int SpectralGrid::points_per_dim() const noexcept { return impl_->N; }
double SpectralGrid::box_length() const noexcept { return impl_->L; }
double SpectralGrid::spacing() const noexcept { return impl_->h; }
double SpectralGrid::cell_volume() const noexcept { return impl_->dv; }
std::size_t SpectralGrid::size() const noexcept { return impl_->size; }
std::size_t SpectralGrid::spectrum_size() const noexcept { return impl_->spec_size; }
std::span<const double> SpectralGrid::wavenumber_magnitude() const noexcept { return impl_->kmag; }
std::span<const double> SpectralGrid::parseval_weight() const noexcept { return impl_->weight; }

double SpectralGrid::coordinate(long index) const noexcept {
  return -0.5 * impl_->L + static_cast<double>(index) * impl_->h;
}

Point SpectralGrid::point(std::size_t flat) const noexcept {
  Point p{0.0, 0.0, 0.0};
  const auto N = static_cast<std::size_t>(impl_->N);
  for (int a = impl_->n - 1; a >= 0; --a) {
    p[a] = coordinate(static_cast<long>(flat % N));
    flat /= N;
  }
  return p;
}

std::vector<double> SpectralGrid::symbol(double order) const {
  std::vector<double> out(impl_->spec_size);
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = impl_->kmag[m] == 0.0 ? 0.0 : std::pow(impl_->kmag[m], 2.0 * order);
  return out;
}

void SpectralGrid::forward(std::span<const double> values,
                           std::span<std::complex<double>> spectrum) const {
  std::vector<double> scratch(values.begin(), values.end());
  fftw_execute_dft_r2c(impl_->fwd, scratch.data(),
                       reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void SpectralGrid::inverse(std::span<const std::complex<double>> spectrum,
                           std::span<double> values) const {
  std::vector<std::complex<double>> scratch(spectrum.begin(), spectrum.end());
  fftw_execute_dft_c2r(impl_->bwd, reinterpret_cast<fftw_complex*>(scratch.data()),
                       values.data());
  const double norm = 1.0 / static_cast<double>(impl_->size);
  for (auto& v : values) v *= norm;
}

bool operator==(const SpectralGrid& a, const SpectralGrid& b) noexcept {
  if (a.impl_ == b.impl_) return true;
  return a.impl_->n == b.impl_->n && a.impl_->N == b.impl_->N && a.impl_->L == b.impl_->L;
}

// ---------------------------------------------------------------------------

Field::Field(SpectralGrid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(SpectralGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::invalid_size, "value count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite field value");
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double factor) noexcept {
  for (auto& v : values_) v *= factor;
  return *this;
}

Field& Field::axpy(double factor, const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += factor * other.values_[i];
  return *this;
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double factor, Field a) { return a *= factor; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  auto v = out.values();
  auto w = b.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
  return out;
}

Field apply_symbol(const Field& u, std::span<const double> symbol) {
  const auto& g = u.grid();
  std::vector<std::complex<double>> spec(g.spectrum_size());
  g.forward(u.values(), spec);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= symbol[m];
  Field out(g);
  g.inverse(spec, out.values());
  return out;
}

Field fractional_laplacian(const Field& u, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::invalid_argument, "s must lie in (0,1]");
  return apply_symbol(u, u.grid().symbol(s));
}

double spectral_quadratic_form(const Field& u, std::span<const double> symbol) {
  const auto& g = u.grid();
  std::vector<std::complex<double>> spec(g.spectrum_size());
  g.forward(u.values(), spec);
  const auto w = g.parseval_weight();
  double acc = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) acc += w[m] * symbol[m] * std::norm(spec[m]);
  return acc * g.cell_volume() / static_cast<double>(g.size());
}

double seminorm_sq(const Field& u, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::invalid_argument, "s must lie in (0,1]");
  return spectral_quadratic_form(u, u.grid().symbol(s));
}

double integrate(const Field& u) {
  double acc = 0.0;
  for (double v : u.values()) acc += v;
  return acc * u.grid().cell_volume();
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto a = u.values();
  const auto b = v.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * u.grid().cell_volume();
}

double hs_norm(const Field& u, const Params& params) {
  return std::sqrt(seminorm_sq(u, params.s) + params.lambda * inner(u, u));
}

// ---------------------------------------------------------------------------

Field translate(const Field& u, const LatticeShift& shift) {
  const auto& g = u.grid();
  const int n = g.n_dims();
  const long N = g.points_per_dim();
  std::array<long, 3> sh{0, 0, 0};
  for (int a = 0; a < n; ++a) sh[a] = ((shift[a] % N) + N) % N;

  Field out(g);
  auto dst = out.values();
  const auto src = u.values();
  std::array<long, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    std::size_t rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = static_cast<long>(rem % N);
      rem /= N;
    }
    std::size_t target = 0;
    for (int a = 0; a < n; ++a) target = target * N + static_cast<std::size_t>((idx[a] + sh[a]) % N);
    dst[target] = src[flat];
  }
  return out;
}

LatticeShift lattice_shift_of(const SpectralGrid& grid, const Point& displacement) {
  LatticeShift cells{0, 0, 0};
  for (int a = 0; a < grid.n_dims(); ++a) {
    const double c = displacement[a] / grid.spacing();
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9 * std::max(1.0, std::abs(c)))
      throw Error(ErrorCode::non_lattice_shift, "displacement is not a whole number of cells");
    cells[a] = static_cast<long>(r);
  }
  return cells;
}

Field translate(const Field& u, const Point& displacement) {
  return translate(u, lattice_shift_of(u.grid(), displacement));
}

namespace {

// Weight of source node j for the periodic trigonometric interpolant at offset
// delta = (p - x_j)/h cells, for even N.
double periodic_sinc(double delta, int N) {
  double d = std::fmod(delta, static_cast<double>(N));
  if (d > 0.5 * N) d -= N;
  if (d <= -0.5 * N) d += N;
  const double m = std::round(d);
  const double r = d - m;
  if (std::abs(r) < 1e-13) return m == 0.0 ? 1.0 : 0.0;
  const double sign = (static_cast<long>(m) % 2 == 0) ? 1.0 : -1.0;
  const double num = sign * std::sin(std::numbers::pi * r);
  return num / (N * std::tan(std::numbers::pi * d / N));
}

// Rows: target positions; columns: source nodes of a grid with N points over length L.
std::vector<double> interpolation_matrix(std::span<const double> targets, int N, double L) {
  const double h = L / N;
  std::vector<double> W(targets.size() * N);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (int j = 0; j < N; ++j)
      W[i * N + j] = periodic_sinc((targets[i] - (-0.5 * L + j * h)) / h, N);
  return W;
}

// Contracts axis `axis` of a row-major array with extents `shape` against W (M x shape[axis]).
std::vector<double> contract_axis(std::span<const double> in, std::vector<long>& shape, int axis,
                                  std::span<const double> W, long M) {
  const long K = shape[axis];
  long outer = 1, inner_len = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner_len *= shape[a];
  std::vector<double> out(static_cast<std::size_t>(outer * M * inner_len), 0.0);
  for (long o = 0; o < outer; ++o) {
    const double* src = in.data() + o * K * inner_len;
    double* dst = out.data() + o * M * inner_len;
    for (long i = 0; i < M; ++i) {
      double* row = dst + i * inner_len;
      const double* w = W.data() + i * K;
      for (long j = 0; j < K; ++j) {
        const double c = w[j];
        if (c == 0.0) continue;
        const double* col = src + j * inner_len;
        for (long t = 0; t < inner_len; ++t) row[t] += c * col[t];
      }
    }
  }
  shape[axis] = M;
  return out;
}

std::vector<double> separable_interpolate(const Field& u,
                                          const std::vector<std::vector<double>>& targets) {
  const auto& g = u.grid();
  const int n = g.n_dims();
  const int N = g.points_per_dim();
  std::vector<long> shape(n, N);
  std::vector<double> data(u.values().begin(), u.values().end());
  for (int a = 0; a < n; ++a) {
    const auto W = interpolation_matrix(targets[a], N, g.box_length());
    data = contract_axis(data, shape, a, W, static_cast<long>(targets[a].size()));
  }
  return data;
}

}  // namespace

Dilation dilate(const Field& u, double theta, const Point& center, double overflow_tol) {
  if (!(theta > 0.0)) throw Error(ErrorCode::nonpositive_theta, "theta must be positive");
  const auto& g = u.grid();
  const int N = g.points_per_dim();
  std::vector<std::vector<double>> targets(g.n_dims(), std::vector<double>(N));
  for (int a = 0; a < g.n_dims(); ++a)
    for (int i = 0; i < N; ++i) targets[a][i] = (g.coordinate(i) - center[a]) / theta + center[a];
  Field out(g, separable_interpolate(u, targets));
  const double bm = boundary_mass(out);
  return Dilation{std::move(out), bm, bm > overflow_tol};
}

Field shift_interpolated(const Field& u, const Point& displacement) {
  const auto& g = u.grid();
  const int N = g.points_per_dim();
  std::vector<std::vector<double>> targets(g.n_dims(), std::vector<double>(N));
  for (int a = 0; a < g.n_dims(); ++a)
    for (int i = 0; i < N; ++i) targets[a][i] = g.coordinate(i) - displacement[a];
  return Field(g, separable_interpolate(u, targets));
}

Field resample(const Field& u, const SpectralGrid& target) {
  if (target.n_dims() != u.grid().n_dims())
    throw Error(ErrorCode::grid_mismatch, "resample target has a different dimension");
  const int M = target.points_per_dim();
  std::vector<std::vector<double>> targets(target.n_dims(), std::vector<double>(M));
  for (int a = 0; a < target.n_dims(); ++a)
    for (int i = 0; i < M; ++i) targets[a][i] = target.coordinate(i);
  return Field(target, separable_interpolate(u, targets));
}

Field relabel(const Field& u, const SpectralGrid& target) {
  if (target.n_dims() != u.grid().n_dims() || target.points_per_dim() != u.grid().points_per_dim())
    throw Error(ErrorCode::grid_mismatch, "relabel needs identical sample layout");
  return Field(target, std::vector<double>(u.values().begin(), u.values().end()));
}

double boundary_mass(const Field& u) {
  const auto& g = u.grid();
  const int n = g.n_dims();
  const double quarter = 0.25 * g.box_length();
  double total = 0.0, outside = 0.0;
  const auto v = u.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = v[i] * v[i];
    total += w;
    const Point p = g.point(i);
    bool in = true;
    for (int a = 0; a < n; ++a) in = in && std::abs(p[a]) < quarter;
    if (!in) outside += w;
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace fraclab
