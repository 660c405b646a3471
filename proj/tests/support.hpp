#pragma once

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "bhgs/gn.hpp"

namespace bhgs::test {

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// GN result on the default 1-D grid, computed once per test process.
inline const GNResult& gn_1d() {
  static const GNResult r = compute_gn(Grid::make(1, 512, 16.0), SolveConfig{});
  return r;
}

inline Field gaussian(const Grid& g, double x0 = 0.0) {
  return Field::from_function(g, [&](const Point& x) {
    double r2 = (x[0] - x0) * (x[0] - x0);
    if (g.dim() == 2) r2 += x[1] * x[1];
    return std::exp(-0.5 * r2);
  });
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path = std::filesystem::temp_directory_path() / ("bhgs_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace bhgs::test
