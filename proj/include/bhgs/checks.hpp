#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bhgs/field.hpp"
#include "bhgs/potential.hpp"

namespace bhgs {

struct CheckRow {
  std::string name;
  bool pass;
  double value;      ///< worst observed quantity
  double tolerance;  ///< threshold it is compared against
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  int fields = 50;            ///< battery size for Parseval / scaling checks
  int gn_fields = 1000;       ///< battery size for the GN inequality check
  int directions = 20;        ///< finite-difference directions
  /// GN constant to test against; the GN check is skipped when absent.
  std::optional<double> a_star;
  /// Test hook: flips the sign of the nonlinear part of the gradient under test.
  bool inject_gradient_sign_error = false;
};

/// Forward/inverse round trip and Parseval on random fields; Lap^2 on pure modes.
CheckRow check_spectral_modes(const Grid& g);
CheckRow check_parseval(const Grid& g, const CheckOptions& opt);
/// |E(u_l) - l^4 (K - a N)| / |l^4 (K - a N)| over the battery and l in {0.5, 0.8, 1.25, 2}.
CheckRow check_scaling_identity(const Grid& g, const CheckOptions& opt, double a);
/// Observed order log10(err(1e-3) / err(1e-4)) of central differences of the energy
/// against <gradient, direction>, minimum over random directions.
CheckRow check_gradient(const Grid& g, const Potential& V, double a, const CheckOptions& opt);
/// min over the battery of J(v) / a_star; must be >= 1 - 1e-6.
CheckRow check_gn_inequality(const Grid& g, double a_star, const CheckOptions& opt);

std::vector<CheckRow> run_checks(const Grid& g, const Potential& V, double a, const CheckOptions& opt);

}  // namespace bhgs
