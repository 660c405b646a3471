#include "bhgs/checks.hpp"
#include "support.hpp"

using namespace bhgs;

namespace {
std::vector<CheckRow> rows(std::uint64_t seed, bool inject = false) {
  CheckOptions opt;
  opt.seed = seed;
  opt.gn_fields = 200;
  opt.a_star = test::gn_1d().a_star;
  opt.inject_gradient_sign_error = inject;
  return run_checks(test::gn_1d().Q.grid(), Potential::gaussian_well(1, 1), 0.5 * *opt.a_star, opt);
}
}  // namespace

TEST_CASE("property batteries pass on the default grid") {
  const auto r = rows(1);
  REQUIRE(r.size() == 5);
  for (const auto& row : r) {
    INFO(row.name, ": ", row.value, " vs ", row.tolerance, " (", row.detail, ")");
    CHECK(row.pass);
  }
}

TEST_CASE("verdicts do not depend on the seed") {
  const auto a = rows(1), b = rows(2), c = rows(3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].pass == b[i].pass);
    CHECK(a[i].pass == c[i].pass);
  }
}

TEST_CASE("an injected gradient sign error is caught") {
  for (const auto& row : rows(1, true)) {
    INFO(row.name);
    CHECK(row.pass == (row.name != "gradient_fd_order"));
  }
}

TEST_CASE("checks in 2D") {
  const Grid g = Grid::make(2, 64, 12);
  CHECK(check_spectral_modes(g).pass);
  CheckOptions opt;
  opt.fields = 5;
  opt.directions = 3;
  CHECK(check_parseval(g, opt).pass);
  CHECK(check_gradient(g, Potential::harmonic(1), 20.0, opt).pass);
}
