#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bhgs/field.hpp"

namespace bhgs {

/// Parameters of the random smooth fields: sums of a few Gaussian bumps times cosines.
/// Defaults keep the fields well inside a box of half-width 16 even after dilation by 1/2,
/// and resolved at n = 256 after dilation by 2.
struct BatteryShape {
  int max_bumps = 3;
  double center_range = 1.5;
  double min_width = 0.4;
  double max_width = 1.0;
  double max_frequency = 2.0;
};

/// One unit-mass random smooth field.
Field random_smooth_field(const Grid& g, std::mt19937_64& rng, const BatteryShape& shape = {});

/// count unit-mass fields from the given seed (deterministic).
std::vector<Field> random_battery(const Grid& g, std::uint64_t seed, int count,
                                  const BatteryShape& shape = {});

}  // namespace bhgs
