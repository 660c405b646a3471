#include "bhgs/field.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "bhgs/log.hpp"
#include "util.hpp"

namespace bhgs {

namespace {

std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("field values must be finite");
}

void check_same_grid(const Field& a, const Field& b) {
  if (!a.grid().same_as(b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = s ? std::move(s) : [](const std::string&) {};
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  sink()(message);
}

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)) {
  if (values.size() != grid_.size())
    throw std::invalid_argument(fmt::format("field has {} values, grid expects {}",
                                            values.size(), grid_.size()));
  check_finite(values);
  values_ = std::move(values);
  spec_ = grid_.forward(values_);
}

Field::Field(Grid grid, std::vector<double> values, Spectrum spec)
    : grid_(std::move(grid)), values_(std::move(values)), spec_(std::move(spec)) {}

Field Field::from_spectrum(Grid grid, const Spectrum& coeffs) {
  auto v = grid.inverse(coeffs);
  check_finite(v);
  // Re-derive the spectrum so that it is exactly the transform of the stored values.
  return Field(std::move(grid), std::move(v));
}

Field Field::zeros(Grid grid) {
  const std::size_t n = grid.size();
  return Field(std::move(grid), std::vector<double>(n, 0.0));
}

Field Field::constant(Grid grid, double value) {
  const std::size_t n = grid.size();
  return Field(std::move(grid), std::vector<double>(n, value));
}

double Field::l2_norm_sq() const {
  double s = 0;
  for (double v : values_) s += v * v;
  return s * grid_.cell_volume();
}

double Field::l2_norm_sq_spectral() const { return grid_.spectral_inner(spec_, spec_); }

double Field::bilap_energy() const {
  const auto k4 = grid_.symbol_k4();
  const auto w = grid_.multiplicity();
  double s = 0;
  for (std::size_t i = 0; i < spec_.size(); ++i) s += w[i] * k4[i] * std::norm(spec_[i]);
  return s * grid_.box_volume();
}

double Field::h2_norm_sq() const { return l2_norm_sq() + bilap_energy(); }

double Field::lq_integral(double q) const {
  const auto fine = grid_.to_refined(spec_);
  double s = 0;
  for (double v : fine) s += abs_pow(v, q);
  return s * grid_.refined().cell_volume();
}

double Field::lq_integral_nodal(double q) const {
  double s = 0;
  for (double v : values_) s += abs_pow(v, q);
  return s * grid_.cell_volume();
}

Field Field::bilap() const {
  Spectrum c = spec_;
  const auto k4 = grid_.symbol_k4();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= k4[i];
  return from_spectrum(grid_, c);
}

Field Field::operator+(const Field& o) const {
  check_same_grid(*this, o);
  std::vector<double> v(values_.size());
  Spectrum c(spec_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = spec_[i] + o.spec_[i];
  return Field(grid_, std::move(v), std::move(c));
}

Field Field::operator-(const Field& o) const {
  check_same_grid(*this, o);
  std::vector<double> v(values_.size());
  Spectrum c(spec_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = spec_[i] - o.spec_[i];
  return Field(grid_, std::move(v), std::move(c));
}

Field Field::operator*(double s) const {
  if (!std::isfinite(s)) throw std::invalid_argument("non-finite scale factor");
  std::vector<double> v(values_);
  Spectrum c(spec_);
  for (auto& x : v) x *= s;
  for (auto& x : c) x *= s;
  return Field(grid_, std::move(v), std::move(c));
}

Field Field::hadamard(const Field& o) const {
  check_same_grid(*this, o);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * o.values_[i];
  return Field(grid_, std::move(v));
}

double Field::dot(const Field& o) const {
  check_same_grid(*this, o);
  double s = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
  return s * grid_.cell_volume();
}

namespace {

// Row of the periodic Dirichlet kernel: weights w_i with p(y) = sum_i w_i u_i for the
// trigonometric interpolant p whose Nyquist mode is taken in cosine form.
// With theta_i = pi (y - x_i) / L, w_i = sin(n theta_i / 2) cot(theta_i / 2) / n and
// sin(n theta_i / 2) = (-1)^i sin(n pi (y + L) / (2L)).
void kernel_row(const Grid& g, double y, std::span<double> w) {
  const int n = g.n();
  const double L = g.half_width();
  std::fill(w.begin(), w.end(), 0.0);
  if (!(y >= -L && y < L)) return;
  const double t = (y + L) / g.dx();
  const double nearest = std::round(t);
  if (std::abs(t - nearest) < 1e-13) {
    w[std::size_t(nearest) % n] = 1.0;
    return;
  }
  // sin(pi t) via the offset from the nearest node: evaluating it at t directly loses
  // all accuracy when t is within round-off of a node.
  const double s = (long(nearest) % 2 == 0 ? 1.0 : -1.0) * std::sin(std::numbers::pi * (t - nearest));
  for (int i = 0; i < n; ++i) {
    const double half = std::numbers::pi * (t - i) / n;  // theta/2
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    w[i] = sign * s / (n * std::tan(half));
  }
}

std::vector<double> kernel_matrix(const Grid& g, std::span<const double> ys) {
  const std::size_t n = std::size_t(g.n());
  std::vector<double> W(ys.size() * n);
  for (std::size_t j = 0; j < ys.size(); ++j)
    kernel_row(g, ys[j], std::span<double>(W.data() + j * n, n));
  return W;
}

}  // namespace

std::vector<double> evaluate_tensor(const Field& u, std::span<const double> axis0,
                                    std::span<const double> axis1) {
  const Grid& g = u.grid();
  const std::size_t n = std::size_t(g.n());
  const auto vals = u.values();
  const auto W0 = kernel_matrix(g, axis0);
  if (g.dim() == 1) {
    std::vector<double> out(axis0.size(), 0.0);
    for (std::size_t j = 0; j < axis0.size(); ++j) {
      const double* w = W0.data() + j * n;
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += w[i] * vals[i];
      out[j] = s;
    }
    return out;
  }
  const auto W1 = kernel_matrix(g, axis1);
  const std::size_t m0 = axis0.size(), m1 = axis1.size();
  // T = U W1^T (n x m1), then out = W0 T (m0 x m1).
  std::vector<double> T(n * m1, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t b = 0; b < m1; ++b) {
      const double* w = W1.data() + b * n;
      const double* row = vals.data() + r * n;
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += w[i] * row[i];
      T[r * m1 + b] = s;
    }
  std::vector<double> out(m0 * m1, 0.0);
  for (std::size_t a = 0; a < m0; ++a) {
    const double* w = W0.data() + a * n;
    for (std::size_t r = 0; r < n; ++r) {
      if (w[r] == 0.0) continue;
      const double* trow = T.data() + r * m1;
      double* orow = out.data() + a * m1;
      for (std::size_t b = 0; b < m1; ++b) orow[b] += w[r] * trow[b];
    }
  }
  return out;
}

Field dilate(const Field& u, double l) {
  if (!(l > 0) || !std::isfinite(l)) throw std::invalid_argument("dilation scale must be positive");
  const Grid& g = u.grid();
  if (l == 1.0) return u;
  // Images up to kTaper * L beyond the box take the periodic continuation (smooth across
  // the seam) under a smooth cutoff; cutting the tail abruptly would leave a jump whose
  // H^2 footprint depends on the resolution.
  constexpr double kTaper = 0.1;
  const double L = g.half_width();
  std::vector<double> ys(g.n()), wt(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double y = l * g.coordinate(i);
    const double over = (std::abs(y) - L) / (kTaper * L);
    wt[i] = smooth_step(over);
    ys[i] = wt[i] > 0 ? y - 2 * L * std::floor((y + L) / (2 * L)) : 0.0;
  }
  auto v = evaluate_tensor(u, ys, g.dim() == 2 ? std::span<const double>(ys) : std::span<const double>{});
  const double amp = g.dim() == 1 ? std::sqrt(l) : l;
  const std::size_t n = std::size_t(g.n());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] *= amp * (g.dim() == 1 ? wt[k] : wt[k / n] * wt[k % n]);
  Field out(g, std::move(v));
  const double m0 = u.l2_norm_sq();
  if (m0 > 0) {
    const double defect = std::abs(out.l2_norm_sq() - m0) / m0;
    if (defect > 1e-6)
      warn(fmt::format("dilation by {:.4g} changed the mass by {:.2e} (relative); "
                       "the grid under-resolves the dilated field",
                       l, defect));
  }
  return out;
}

Field resample(const Field& u, const Grid& target) {
  if (target.dim() != u.grid().dim()) throw std::invalid_argument("resample: dimension mismatch");
  if (target.same_as(u.grid())) return u;
  std::vector<double> ys(target.n());
  for (int i = 0; i < target.n(); ++i) ys[i] = target.coordinate(i);
  auto v = evaluate_tensor(u, ys, target.dim() == 2 ? std::span<const double>(ys)
                                                    : std::span<const double>{});
  return Field(target, std::move(v));
}

Field renormalize_mass(const Field& u, double m) {
  if (!(m > 0)) throw std::invalid_argument("target mass must be positive");
  const double m0 = u.l2_norm_sq();
  if (!(m0 > 0)) throw std::invalid_argument("cannot renormalize a zero field");
  return u * std::sqrt(m / m0);
}

Field translate(const Field& u, const Point& s) {
  const Grid& g = u.grid();
  const int n = g.n();
  const int nh = n / 2 + 1;
  const auto k = g.wavenumbers();
  const double kn = std::numbers::pi * (n / 2) / g.half_width();
  Spectrum c = u.spectrum();
  auto phase = [&](int j, double shift) -> Complex {
    // Nyquist mode stays real: cos(k s) is the symmetric average of both shifts.
    if (j == n / 2) return {std::cos(kn * shift), 0.0};
    return std::polar(1.0, -k[j] * shift);
  };
  const int rows = g.dim() == 1 ? 1 : n;
  const double s_last = g.dim() == 1 ? s[0] : s[1];
  for (int r = 0; r < rows; ++r) {
    const Complex pr = g.dim() == 1 ? Complex(1.0) : phase(r, s[0]);
    for (int col = 0; col < nh; ++col) c[std::size_t(r) * nh + col] *= pr * phase(col, s_last);
  }
  return Field::from_spectrum(g, c);
}

Field partial(const Field& u, int axis) {
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("derivative axis out of range");
  const int n = g.n();
  const int nh = n / 2 + 1;
  const auto k = g.wavenumbers();
  Spectrum c = u.spectrum();
  const int rows = g.dim() == 1 ? 1 : n;
  const bool along_rows = g.dim() == 2 && axis == 0;
  for (int r = 0; r < rows; ++r)
    for (int col = 0; col < nh; ++col) {
      const int j = along_rows ? r : col;
      // The Nyquist cosine has no resolvable derivative on the grid.
      const Complex ik = j == n / 2 ? Complex(0.0) : Complex(0.0, k[j]);
      c[std::size_t(r) * nh + col] *= ik;
    }
  return Field::from_spectrum(g, c);
}

Field reflect(const Field& u) {
  const Grid& g = u.grid();
  const int n = g.n();
  const auto v = u.values();
  std::vector<double> out(v.size());
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[i] = v[(n - i) % n];
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[std::size_t(i) * n + j] = v[std::size_t((n - i) % n) * n + (n - j) % n];
  }
  return Field(g, std::move(out));
}

Field symmetrize(const Field& u) { return (u + reflect(u)) * 0.5; }

namespace {

// Marginal density along one axis.
std::vector<double> marginal(const Field& u, int axis) {
  const Grid& g = u.grid();
  const int n = g.n();
  const auto v = u.values();
  std::vector<double> rho(n, 0.0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) rho[i] = v[i] * v[i];
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double w = v[std::size_t(i) * n + j];
        rho[axis == 0 ? i : j] += w * w;
      }
  }
  return rho;
}

double axis_centroid(const Grid& g, const std::vector<double>& rho) {
  const int n = g.n();
  const double L = g.half_width();
  const int imax = int(std::max_element(rho.begin(), rho.end()) - rho.begin());
  const double xm = g.coordinate(imax);
  double num = 0, den = 0;
  for (int i = 0; i < n; ++i) {
    double dxr = g.coordinate(i) - xm;
    // unwrap into [-L, L) around the maximum
    dxr -= 2 * L * std::floor((dxr + L) / (2 * L));
    num += (xm + dxr) * rho[i];
    den += rho[i];
  }
  return num / den;
}

}  // namespace

Point density_center(const Field& u) {
  if (!(u.l2_norm_sq() > 0)) throw std::invalid_argument("cannot locate the center of a zero field");
  const Grid& g = u.grid();
  Point c{0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) c[a] = axis_centroid(g, marginal(u, a));
  return c;
}

Recentered recenter(const Field& u, RecenterMode mode) {
  if (!(u.l2_norm_sq() > 0)) throw std::invalid_argument("cannot recenter a zero field");
  Point c{0.0, 0.0};
  if (mode == RecenterMode::Centroid) {
    c = density_center(u);
  } else {
    const auto v = u.values();
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    c = u.grid().node(imax);
  }
  const Point shift{-c[0], -c[1]};
  return {translate(u, shift), shift};
}

double h2_distance(const Field& a, const Field& b) { return std::sqrt((a - b).h2_norm_sq()); }

}  // namespace bhgs
