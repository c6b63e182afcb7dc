#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "sfpinn/kdv_reference.hpp"

using namespace sfpinn;

TEST_CASE("kdv reference reproduces the initial condition and conserves mass") {
  const ReferenceTable t = kdv_reference_solve();
  REQUIRE(t.nx() == 512);
  REQUIRE(t.nt() == 126);
  CHECK(t.ts.front() == 0.0);
  CHECK(std::abs(t.ts.back() - 1.25) < 1e-12);

  for (int ix = 0; ix < t.nx(); ++ix) CHECK(t.at(0, ix) == std::cos(M_PI * t.xs[ix]));

  const double m0 = kdv_mass(t, 0);
  for (int it = 1; it < t.nt(); ++it) {
    INFO("slice " << it);
    CHECK(std::abs(kdv_mass(t, it) - m0) <= 1e-8);
  }

  // the final state carries multiple emerged waves
  int maxima = 0;
  const int n = t.nx();
  for (int ix = 0; ix < n; ++ix) {
    const double prev = t.at(t.nt() - 1, (ix + n - 1) % n);
    const double cur = t.at(t.nt() - 1, ix);
    const double next = t.at(t.nt() - 1, (ix + 1) % n);
    if (cur > prev && cur > next && cur > 0.5) ++maxima;
  }
  CHECK(maxima >= 3);

  SECTION("cache round trip") {
    const std::string path = "kdv_test_cache.csv";
    std::filesystem::remove(path);
    save_reference(path, t);
    const ReferenceTable back = load_reference(path);
    CHECK(back.params.modes == t.params.modes);
    CHECK(back.xs == t.xs);
    CHECK(back.ts == t.ts);
    CHECK(back.u == t.u);
    // mismatched parameters trigger a rebuild instead of reuse
    KdvParams other;
    other.t_end = 0.05;
    const auto rebuilt = kdv_reference_cached(path, other);
    CHECK(std::abs(rebuilt->params.t_end - 0.05) < 1e-15);
    std::filesystem::remove(path);
  }

  SECTION("doubling modes and halving dt leaves the field unchanged to 1e-6 rms") {
    const double rms = kdv_refinement_rms(t.params, t);
    INFO("refinement rms " << rms);
    CHECK(rms <= 1e-6);
  }
}
