#include "fraclab/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace fraclab {

namespace {

std::vector<double> unit_ball_kernel(const SpectralGrid& g) {
  const int n = g.n_dims();
  const long N = g.points_per_dim();
  const double h = g.spacing();
  std::vector<double> k(g.size(), 0.0);
  long count = 0;
  for (std::size_t flat = 0; flat < k.size(); ++flat) {
    std::size_t rem = flat;
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      long i = static_cast<long>(rem % N);
      rem /= N;
      if (i > N / 2) i -= N;
      r2 += (i * h) * (i * h);
    }
    if (r2 <= 1.0 + 1e-12) {
      k[flat] = 1.0;
      ++count;
    }
  }
  for (auto& v : k) v /= static_cast<double>(count);
  return k;
}

}  // namespace

Field mu(const Field& u) {
  const auto& g = u.grid();
  std::vector<double> absu(u.values().begin(), u.values().end());
  for (auto& v : absu) v = std::abs(v);
  std::vector<std::complex<double>> su(g.spectrum_size()), sk(g.spectrum_size());
  g.forward(absu, su);
  g.forward(unit_ball_kernel(g), sk);
  for (std::size_t m = 0; m < su.size(); ++m) su[m] *= sk[m];
  Field out(g);
  g.inverse(su, out.values());
  return out;
}

Field mu(const ProblemContext&, const Field& u) { return mu(u); }

BarycenterReport beta(const Field& u) {
  if (u.max_abs() == 0.0) throw Error(ErrorCode::zero_field, "barycenter of the zero field");
  const auto& g = u.grid();
  const int n = g.n_dims();
  const long N = g.points_per_dim();
  const Field m = mu(u);
  const auto mv = m.values();
  const double peak = *std::max_element(mv.begin(), mv.end());

  BarycenterReport rep;
  rep.max_mu = peak;
  double mass = 0.0;
  Point moment{0.0, 0.0, 0.0};
  std::array<long, 3> lo{N, N, N}, hi{-1, -1, -1};
  for (std::size_t flat = 0; flat < mv.size(); ++flat) {
    const double w = mv[flat] - 0.5 * peak;
    if (w <= 0.0) continue;
    ++rep.support_cells;
    mass += w;
    std::size_t rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      const long i = static_cast<long>(rem % N);
      rem /= N;
      lo[a] = std::min(lo[a], i);
      hi[a] = std::max(hi[a], i);
      moment[a] += w * g.coordinate(i);
    }
  }
  for (int a = 0; a < n; ++a) {
    if (lo[a] == 0 || hi[a] == N - 1)
      throw Error(ErrorCode::ambiguous_support, "truncated support touches the box boundary");
    if (hi[a] - lo[a] >= N / 2)
      throw Error(ErrorCode::ambiguous_support, "truncated support does not fit in a half-box");
    rep.beta[a] = moment[a] / mass;
  }
  return rep;
}

BarycenterReport beta(const ProblemContext&, const Field& u) { return beta(u); }

}  // namespace fraclab
