#pragma once

#include <span>
#include <vector>

#include "bhgs/grid.hpp"

namespace bhgs {

/// Real grid function with its spectrum computed on construction.
/// Values are immutable; every operation returns a new Field.
class Field {
 public:
  /// Throws std::invalid_argument on size mismatch or non-finite values.
  Field(Grid grid, std::vector<double> values);
  /// Builds the field from coefficients (inverse transform).
  static Field from_spectrum(Grid grid, const Spectrum& coeffs);
  static Field zeros(Grid grid);
  static Field constant(Grid grid, double value);
  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const Spectrum& spectrum() const { return spec_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Quadrature of u^2.
  double l2_norm_sq() const;
  /// Same quantity from the coefficients.
  double l2_norm_sq_spectral() const;
  /// Integral of |Laplacian u|^2 through the |k|^4 symbol.
  double bilap_energy() const;
  double h2_norm_sq() const;
  /// Integral of |u|^q, evaluated on the 2x refined grid to keep aliasing of high powers out.
  double lq_integral(double q) const;
  /// Plain nodal quadrature of |u|^q, used as a cross-check.
  double lq_integral_nodal(double q) const;

  /// Bi-Laplacian applied spectrally.
  Field bilap() const;

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field operator*(double s) const;
  Field operator-() const { return *this * -1.0; }
  /// Pointwise product.
  Field hadamard(const Field& o) const;

  /// Quadrature inner product.
  double dot(const Field& o) const;

 private:
  Field(Grid grid, std::vector<double> values, Spectrum spec);
  Grid grid_;
  std::vector<double> values_;
  Spectrum spec_;
};

inline Field operator*(double s, const Field& f) { return f * s; }

/// v(x) = l^{d/2} u(l x), by evaluating the trigonometric interpolant of u at the scaled nodes.
/// Images beyond the box continue the field periodically under a smooth cutoff that
/// vanishes 10% past the boundary.
Field dilate(const Field& u, double l);

/// Evaluates the trigonometric interpolant of u on the tensor product of per-axis points
/// (only axis0 is used in 1D). Points outside [-L, L) give 0.
std::vector<double> evaluate_tensor(const Field& u, std::span<const double> axis0,
                                    std::span<const double> axis1 = {});

/// Interpolates u onto another grid (same or different box). Target nodes outside u's box get 0.
Field resample(const Field& u, const Grid& target);

/// Scales u so that its mass equals m. Throws std::invalid_argument for a zero field or m <= 0.
Field renormalize_mass(const Field& u, double m = 1.0);

/// v(x) = u(x - s), periodic, exact spectral phase shift.
Field translate(const Field& u, const Point& s);

/// Spectral derivative along axis (0 = x, 1 = y).
Field partial(const Field& u, int axis);

/// v(x) = u(-x), exact on the grid.
Field reflect(const Field& u);

/// (u + reflect(u)) / 2.
Field symmetrize(const Field& u);

enum class RecenterMode { Centroid, Argmax };

struct Recentered {
  Field field;
  Point shift;  ///< translation applied, field = translate(u, shift)
};

/// Moves the density centroid (or the density maximum) to the origin.
/// Throws std::invalid_argument for a zero field.
Recentered recenter(const Field& u, RecenterMode mode = RecenterMode::Centroid);

/// Density centroid with periodic unwrapping around the density maximum.
Point density_center(const Field& u);

/// sqrt(h2_norm_sq(a - b)).
double h2_distance(const Field& a, const Field& b);

}  // namespace bhgs
