#include "bhgs/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bhgs {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Plans(int d, int n) {
    std::lock_guard lock(planner_mutex());
    const std::size_t total = d == 1 ? std::size_t(n) : std::size_t(n) * n;
    const std::size_t spec = (total / n) * (n / 2 + 1);
    double* r = fftw_alloc_real(total);
    fftw_complex* c = fftw_alloc_complex(spec);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (d == 1) {
      r2c = fftw_plan_dft_r2c_1d(n, r, c, flags);
      c2r = fftw_plan_dft_c2r_1d(n, c, r, flags);
    } else {
      r2c = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
      c2r = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
    }
    fftw_free(r);
    fftw_free(c);
    if (!r2c || !c2r) throw std::runtime_error("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

}  // namespace

struct Grid::State {
  int d = 1;
  int n = 0;
  double L = 0;
  double dx = 0;
  std::size_t size = 0;
  std::size_t spec_size = 0;
  std::vector<double> k;
  std::vector<double> k4;
  std::vector<double> mult;
  std::unique_ptr<Plans> plans;

  mutable std::once_flag refined_once;
  mutable std::unique_ptr<Grid> refined;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(std::shared_ptr<const State> state) : state_(std::move(state)) {}

Grid Grid::make(int d, int n, double half_width) {
  if (d != 1 && d != 2)
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(d));
  if (n < 8 || !is_power_of_two(n))
    throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                std::to_string(n));
  if (!(half_width > 0) || !std::isfinite(half_width))
    throw std::invalid_argument("half_width must be positive and finite");

  auto s = std::make_shared<State>();
  s->d = d;
  s->n = n;
  s->L = half_width;
  s->dx = 2.0 * half_width / n;
  s->size = d == 1 ? std::size_t(n) : std::size_t(n) * n;
  const int nh = n / 2 + 1;
  s->spec_size = (s->size / n) * nh;

  s->k.resize(n);
  for (int j = 0; j < n; ++j) {
    const int m = j < n / 2 ? j : j - n;
    s->k[j] = std::numbers::pi * m / half_width;
  }
  s->k4.resize(s->spec_size);
  s->mult.resize(s->spec_size);
  const int rows = d == 1 ? 1 : n;
  for (int r = 0; r < rows; ++r) {
    const double kr = d == 1 ? 0.0 : s->k[r];
    for (int c = 0; c < nh; ++c) {
      // The Nyquist column is stored with index n/2, so its wavenumber is |k| = pi n/(2L).
      const double kc = c == n / 2 ? std::numbers::pi * (n / 2) / half_width : s->k[c];
      const double k2 = kr * kr + kc * kc;
      const std::size_t idx = std::size_t(r) * nh + c;
      s->k4[idx] = k2 * k2;
      s->mult[idx] = (c == 0 || c == n / 2) ? 1.0 : 2.0;
    }
  }
  s->plans = std::make_unique<Plans>(d, n);
  return Grid(std::move(s));
}

int Grid::dim() const { return state_->d; }
int Grid::n() const { return state_->n; }
double Grid::half_width() const { return state_->L; }
double Grid::dx() const { return state_->dx; }
std::size_t Grid::size() const { return state_->size; }
std::size_t Grid::spectral_size() const { return state_->spec_size; }
double Grid::cell_volume() const { return state_->d == 1 ? state_->dx : state_->dx * state_->dx; }
double Grid::box_volume() const {
  const double w = 2.0 * state_->L;
  return state_->d == 1 ? w : w * w;
}
double Grid::coordinate(int i) const { return -state_->L + i * state_->dx; }
double Grid::wavenumber(int j) const { return state_->k.at(j); }
std::span<const double> Grid::wavenumbers() const { return state_->k; }
std::span<const double> Grid::symbol_k4() const { return state_->k4; }
std::span<const double> Grid::multiplicity() const { return state_->mult; }
double Grid::max_wavenumber() const {
  const double kn = std::numbers::pi * (state_->n / 2) / state_->L;
  return state_->d == 1 ? kn : std::sqrt(2.0) * kn;
}

Point Grid::node(std::size_t flat) const {
  if (state_->d == 1) return {coordinate(int(flat)), 0.0};
  return {coordinate(int(flat / state_->n)), coordinate(int(flat % state_->n))};
}

Spectrum Grid::forward(std::span<const double> values) const {
  if (values.size() != state_->size) throw std::invalid_argument("forward: size mismatch");
  std::vector<double> in(values.begin(), values.end());
  Spectrum out(state_->spec_size);
  fftw_execute_dft_r2c(state_->plans->r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / double(state_->size);
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<double> Grid::inverse(const Spectrum& coeffs) const {
  if (coeffs.size() != state_->spec_size) throw std::invalid_argument("inverse: size mismatch");
  Spectrum in = coeffs;  // c2r overwrites its input
  std::vector<double> out(state_->size);
  fftw_execute_dft_c2r(state_->plans->c2r, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  return out;
}

double Grid::quadrature(std::span<const double> samples) const {
  if (samples.size() != state_->size)
    throw std::invalid_argument("quadrature: expected " + std::to_string(state_->size) +
                                " samples, got " + std::to_string(samples.size()));
  double s = 0;
  for (double v : samples) s += v;
  return s * cell_volume();
}

double Grid::spectral_inner(const Spectrum& a, const Spectrum& b) const {
  if (a.size() != state_->spec_size || b.size() != state_->spec_size)
    throw std::invalid_argument("spectral_inner: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += state_->mult[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  return s * box_volume();
}

const Grid& Grid::refined() const {
  std::call_once(state_->refined_once, [this] {
    state_->refined = std::make_unique<Grid>(
        Grid::make(state_->d, state_->n * pad_factor, state_->L));
  });
  return *state_->refined;
}

// Coarse index j (FFT order, 0..n-1) along a fully stored axis maps to fine rows.
// The Nyquist index n/2 is split evenly between the fine +n/2 and -n/2 rows.
namespace {

struct RowMap {
  int rows[2];
  int count;
};

RowMap coarse_to_fine_row(int j, int n) {
  const int N = 2 * n;
  if (j < n / 2) return {{j, 0}, 1};
  if (j > n / 2) return {{j + n, 0}, 1};
  return {{n / 2, N - n / 2}, 2};
}

}  // namespace

std::vector<double> Grid::to_refined(const Spectrum& coeffs) const {
  if (coeffs.size() != state_->spec_size) throw std::invalid_argument("to_refined: size mismatch");
  const Grid& fine = refined();
  const int n = state_->n;
  const int nh = n / 2 + 1;
  const int fnh = n + 1;
  Spectrum F(fine.spectral_size());
  const int rows = state_->d == 1 ? 1 : n;
  for (int r = 0; r < rows; ++r) {
    const RowMap rm = state_->d == 1 ? RowMap{{0, 0}, 1} : coarse_to_fine_row(r, n);
    for (int c = 0; c < nh; ++c) {
      Complex v = coeffs[std::size_t(r) * nh + c] / double(rm.count);
      // Column Nyquist: half goes to +n/2 here, the conjugate half at -n/2 is implied.
      if (c == n / 2) v *= 0.5;
      for (int t = 0; t < rm.count; ++t) F[std::size_t(rm.rows[t]) * fnh + c] += v;
    }
  }
  return fine.inverse(F);
}

Spectrum Grid::from_refined(std::span<const double> fine_values) const {
  const Grid& fine = refined();
  if (fine_values.size() != fine.size()) throw std::invalid_argument("from_refined: size mismatch");
  const Spectrum F = fine.forward(fine_values);
  const int n = state_->n;
  const int N = 2 * n;
  const int nh = n / 2 + 1;
  const int fnh = n + 1;
  const int frows = state_->d == 1 ? 1 : N;
  // Fine coefficient at (row r, signed column s), using Hermitian symmetry for s < 0.
  auto at = [&](int r, int s) -> Complex {
    if (s >= 0) return F[std::size_t(r) * fnh + s];
    return std::conj(F[std::size_t((frows - r) % frows) * fnh + (-s)]);
  };
  Spectrum out(state_->spec_size);
  const int rows = state_->d == 1 ? 1 : n;
  for (int r = 0; r < rows; ++r) {
    const RowMap rm = state_->d == 1 ? RowMap{{0, 0}, 1} : coarse_to_fine_row(r, n);
    for (int c = 0; c < nh; ++c) {
      Complex acc = 0;
      int cnt = 0;
      for (int t = 0; t < rm.count; ++t) {
        if (c < n / 2) {
          acc += at(rm.rows[t], c);
          ++cnt;
        } else {
          acc += at(rm.rows[t], n / 2) + at(rm.rows[t], -n / 2);
          cnt += 2;
        }
      }
      out[std::size_t(r) * nh + c] = acc / double(cnt);
    }
  }
  return out;
}

bool Grid::same_as(const Grid& other) const {
  return state_ == other.state_ ||
         (state_->d == other.state_->d && state_->n == other.state_->n &&
          state_->L == other.state_->L);
}

}  // namespace bhgs
