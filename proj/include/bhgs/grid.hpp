#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bhgs {

using Complex = std::complex<double>;

/// Fourier coefficients in real-to-complex layout: the last axis keeps
/// indices 0..n/2, the first axis (d = 2) keeps all n indices in FFT order.
using Spectrum = std::vector<Complex>;

/// A point in the box. Only the first d components are meaningful.
using Point = std::array<double, 2>;

/// Uniform periodic grid on [-L, L)^d, d in {1, 2}.
///
/// Node i along an axis sits at x_i = -L + i*dx. Coefficients are normalized
/// so that u(x) = sum_m c_m exp(i k_m (x + L)) with k_m = pi*m/L, i.e. the
/// forward transform carries the 1/n^d factor.
///
/// Grid is a cheap handle to immutable shared state and is safe to share
/// across threads; transforms allocate their own scratch buffers.
class Grid {
 public:
  /// Throws std::invalid_argument unless d in {1,2}, n >= 8 is a power of two
  /// and half_width > 0.
  static Grid make(int d, int n, double half_width);

  int dim() const;
  int n() const;
  double half_width() const;
  double dx() const;
  /// Number of physical nodes, n^d.
  std::size_t size() const;
  /// Number of stored complex coefficients, n^(d-1) * (n/2 + 1).
  std::size_t spectral_size() const;
  /// Quadrature weight dx^d.
  double cell_volume() const;
  /// (2L)^d.
  double box_volume() const;

  double coordinate(int i) const;
  /// Wavenumber pi*m/L of FFT index j (m = j for j < n/2, j - n otherwise).
  double wavenumber(int j) const;
  /// Per-axis wavenumber table in FFT index order.
  std::span<const double> wavenumbers() const;
  /// |k|^4 for each stored coefficient.
  std::span<const double> symbol_k4() const;
  /// Multiplicity (1 or 2) of each stored coefficient in the full spectrum.
  std::span<const double> multiplicity() const;
  double max_wavenumber() const;

  /// Physical coordinates of node `flat`.
  Point node(std::size_t flat) const;

  Spectrum forward(std::span<const double> values) const;
  std::vector<double> inverse(const Spectrum& coeffs) const;

  /// dx^d * sum(samples). Throws std::invalid_argument on size mismatch.
  double quadrature(std::span<const double> samples) const;

  /// (2L)^d * sum over the full spectrum of conj(a)*b, real part.
  double spectral_inner(const Spectrum& a, const Spectrum& b) const;

  /// Same box, pad_factor times more points per axis.
  const Grid& refined() const;
  static constexpr int pad_factor = 2;

  /// Trigonometric interpolation onto the refined grid.
  std::vector<double> to_refined(const Spectrum& coeffs) const;
  /// L2-adjoint of to_refined: spectral truncation from the refined grid,
  /// averaging the aliases that fold onto the Nyquist indices.
  Spectrum from_refined(std::span<const double> fine_values) const;

  bool same_as(const Grid& other) const;

 private:
  struct State;
  explicit Grid(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

bool is_power_of_two(int n);

}  // namespace bhgs
