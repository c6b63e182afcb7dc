#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sfpinn/initlab.hpp"

using namespace sfpinn;

TEST_CASE("flat-initialization variance bound values") {
  CHECK(bound_flat_init(1) == 1.0);
  CHECK(std::abs(bound_flat_init(64) - 0.060591) < 1e-5);
  CHECK(bound_flat_init(1000000) <= 4e-6);
  CHECK(bound_flat_init(1000000) < bound_flat_init(1000));
}

TEST_CASE("sinusoidal variance bound values") {
  // x = 0: (2n/(n+1)) * 4 pi^2 sigma^2
  const double n64 = 128.0 / 65.0;
  CHECK(std::abs(bound_sinusoidal(64, 1.0, 0.0) - n64 * 4 * M_PI * M_PI) < 1e-10);
  // large |x|: near-constant level (2n/(n+1)) * 2 pi^2 sigma^2
  CHECK(std::abs(bound_sinusoidal(64, 1.0, 50.0) - n64 * 2 * M_PI * M_PI) < 1e-10);
  // spot value at n=64, sigma=1, x=0.5
  CHECK(std::abs(bound_sinusoidal(64, 1.0, 0.5) - 38.8711) < 1e-3);
}

TEST_CASE("tanh integrand expectation reduces to the second moment at x = 0") {
  for (const double sigma : {0.5, 1.0, 2.0, 10.0}) {
    const double v = expected_tanh_integrand(sigma, 0.0);
    CHECK(std::abs(v - sigma * sigma) <= 1e-9 * sigma * sigma + 1e-12);
  }
}

TEST_CASE("tanh integrand respects the decay bound and falls with sigma") {
  for (const double sigma : {0.5, 1.0, 10.0, 100.0}) {
    for (const double x : {0.5, 1.0, 2.0}) {
      const double v = expected_tanh_integrand(sigma, x);
      CHECK(v >= 0.0);
      CHECK(v <= tanh_integrand_bound(sigma, x));
    }
  }
  const double at1 = expected_tanh_integrand(1.0, 1.0);
  const double at100 = expected_tanh_integrand(100.0, 1.0);
  CHECK(at1 / at100 >= 10.0);
  // decreasing in sigma beyond the peak at fixed x = 1
  double prev = expected_tanh_integrand(2.0, 1.0);
  for (const double sigma : {5.0, 10.0, 30.0, 100.0}) {
    const double v = expected_tanh_integrand(sigma, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  // and decreasing in |x| beyond the peak at fixed sigma = 1
  prev = expected_tanh_integrand(1.0, 1.0);
  for (const double x : {2.0, 4.0, 8.0}) {
    const double v = expected_tanh_integrand(1.0, x);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("backward-pass simulation matches the small-variance and sin identities") {
  Rng rng(2024);
  CHECK(backward_variance_sim(Act::Tanh, 1e-3, 100000, rng).mean >= 0.99);

  const McStats s10 = backward_variance_sim(Act::Sin, 10.0, 200000, rng);
  CHECK(std::abs(s10.mean - 0.5) <= 0.05);

  for (const double v : {0.01, 0.1, 1.0, 10.0}) {
    const McStats st = backward_variance_sim(Act::Sin, v, 200000, rng);
    const double closed = sin_backward_closed_form(v);
    INFO("var " << v << " mc " << st.mean << " closed " << closed);
    CHECK(std::abs(st.mean - closed) <= 3.0 * st.mean_se);
  }
}

TEST_CASE("sinusoidal frequency coverage probabilities") {
  const CoverageProbability cp = freq_coverage_probability(64, 3.0, 3.0, 0.1);
  CHECK(std::abs(cp.single - 0.0968) < 1e-3);
  CHECK(std::abs(cp.at_least_one - 0.998) < 2e-3);

  const CoverageProbability tiny = freq_coverage_probability(64, 0.01, 3.0, 0.1);
  CHECK(tiny.single < 1e-12);
  CHECK(tiny.at_least_one < 1e-9);

  // rises sharply through sigma in [1, 6]
  const double lo = freq_coverage_probability(64, 1.0, 3.0, 0.1).at_least_one;
  const double mid = freq_coverage_probability(64, 3.0, 3.0, 0.1).at_least_one;
  CHECK(mid > lo);
  CHECK_THROWS_AS(freq_coverage_probability(64, -1.0, 3.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(freq_coverage_probability(64, 1.0, 3.0, 1.5), std::invalid_argument);
}

TEST_CASE("monte-carlo variance stays under the flat-init bound") {
  Rng rng(31337);
  const NetworkPlan plan = flat_init_plan(16);
  const double xs[2] = {0.0, 0.5};
  const auto stats = mc_input_gradient_variance(plan, xs, 3000, rng);
  for (const auto& st : stats) {
    INFO("var " << st.var << " bound " << bound_flat_init(16) << " se " << st.var_se);
    CHECK(st.var <= bound_flat_init(16) + 3.0 * st.var_se);
  }
}

TEST_CASE("monte-carlo variance matches the one-hidden-layer sinusoidal equality") {
  Rng rng(90210);
  const NetworkPlan plan = sf_one_layer_plan(64, 1.0);
  const double xs[1] = {0.0};
  const auto stats = mc_input_gradient_variance(plan, xs, 20000, rng);
  const double expect = bound_sinusoidal(64, 1.0, 0.0);
  CHECK(std::abs(stats[0].var - expect) <= 0.08 * expect);
}
