#include "bhgs/battery.hpp"

#include <cmath>
#include <numbers>

namespace bhgs {

Field random_smooth_field(const Grid& g, std::mt19937_64& rng, const BatteryShape& shape) {
  std::uniform_int_distribution<int> nb(1, shape.max_bumps);
  std::uniform_real_distribution<double> cen(-shape.center_range, shape.center_range);
  std::uniform_real_distribution<double> wid(shape.min_width, shape.max_width);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(0.0, shape.max_frequency);
  std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
  const int d = g.dim();

  struct Bump {
    Point c;
    double w, a, phase;
    Point k;
  };
  std::vector<Bump> bumps(nb(rng));
  for (auto& b : bumps) {
    b.c = {cen(rng), d == 2 ? cen(rng) : 0.0};
    b.w = wid(rng);
    // keep one bump dominant so the mass never cancels to (near) zero
    b.a = &b == &bumps.front() ? 1.0 + 0.5 * std::abs(amp(rng)) : 0.7 * amp(rng);
    b.k = {freq(rng), d == 2 ? freq(rng) : 0.0};
    b.phase = ph(rng);
  }
  const Field u = Field::from_function(g, [&](const Point& x) {
    double s = 0;
    for (const auto& b : bumps) {
      double r2 = 0, arg = b.phase;
      for (int i = 0; i < d; ++i) {
        r2 += (x[i] - b.c[i]) * (x[i] - b.c[i]);
        arg += b.k[i] * (x[i] - b.c[i]);
      }
      s += b.a * std::exp(-0.5 * r2 / (b.w * b.w)) * std::cos(arg);
    }
    return s;
  });
  return renormalize_mass(u, 1.0);
}

std::vector<Field> random_battery(const Grid& g, std::uint64_t seed, int count,
                                  const BatteryShape& shape) {
  std::mt19937_64 rng(seed);
  std::vector<Field> out;
  out.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) out.push_back(random_smooth_field(g, rng, shape));
  return out;
}

}  // namespace bhgs
