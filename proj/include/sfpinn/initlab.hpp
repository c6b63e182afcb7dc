#pragma once

// Empirical checks of the initialization-variance results: Monte-Carlo input
// gradient statistics at initialization, closed-form variance bounds, the
// tanh integrand expectation by adaptive quadrature, activation backward-pass
// retention, and sinusoidal frequency coverage probabilities.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfpinn/network.hpp"
#include "sfpinn/rng.hpp"
#include "sfpinn/tape.hpp"

namespace sfpinn {

struct McStats {
  double mean = 0.0, mean_se = 0.0;
  double var = 0.0, var_se = 0.0;
  long draws = 0;
};

// Sample statistics of d(output)/dx over fresh parameter draws, evaluated at
// each x in xs with one network draw shared across the xs of a single draw.
inline std::vector<McStats> mc_input_gradient_variance(const NetworkPlan& plan,
                                                       std::span<const double> xs, long draws,
                                                       Rng& rng) {
  if (draws < 2) throw std::invalid_argument("mc_input_gradient_variance: needs draws >= 2");
  const std::size_t nx = xs.size();
  std::vector<double> s1(nx, 0.0), s2(nx, 0.0), s3(nx, 0.0), s4(nx, 0.0);
  Tape tape;
  for (long d = 0; d < draws; ++d) {
    const ParameterSet ps = init_parameters(plan, rng);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = xs[i];
      const auto jets = forward_with_jets(plan, ps, std::span<const double>(&x, 1), 0, 1, tape);
      const double g = jets[0].jet.deriv(1);
      s1[i] += g;
      s2[i] += g * g;
      s3[i] += g * g * g;
      s4[i] += g * g * g * g;
    }
  }
  std::vector<McStats> out(nx);
  const double n = static_cast<double>(draws);
  for (std::size_t i = 0; i < nx; ++i) {
    const double mean = s1[i] / n;
    const double m2 = s2[i] / n - mean * mean;
    const double var = m2 * n / (n - 1.0);
    // central fourth moment from raw sums
    const double m4 = s4[i] / n - 4.0 * mean * s3[i] / n + 6.0 * mean * mean * s2[i] / n -
                      3.0 * mean * mean * mean * mean;
    out[i].mean = mean;
    out[i].var = var;
    out[i].mean_se = std::sqrt(var / n);
    const double v4 = m4 - var * var * (n - 3.0) / (n - 1.0);
    out[i].var_se = std::sqrt(v4 > 0.0 ? v4 / n : 0.0);
    out[i].draws = draws;
  }
  return out;
}

inline McStats mc_input_gradient_variance(const NetworkPlan& plan, double x, long draws, Rng& rng) {
  return mc_input_gradient_variance(plan, std::span<const double>(&x, 1), draws, rng)[0];
}

// tanh-Xavier network for the width-n flat-initialization checks: four hidden
// layers of width n on a single input and output.
inline NetworkPlan flat_init_plan(int n) {
  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.input_labels = {"x"};
  cfg.feature_map = FeatureMap::StandardDense;
  cfg.feature_width = n;
  cfg.trunk = {n, n, n};
  cfg.branches = {{"u", {}}};
  cfg.activation = Act::Tanh;
  cfg.hidden_init = InitScheme::Xavier;
  cfg.feature_uses_sigma = false;  // Xavier everywhere
  return plan_network(cfg);
}

// One-hidden-layer network with sinusoidal features and a Xavier output layer.
inline NetworkPlan sf_one_layer_plan(int n, double sigma) {
  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.input_labels = {"x"};
  cfg.feature_map = FeatureMap::Sinusoidal;
  cfg.feature_width = n;
  cfg.branches = {{"u", {}}};
  cfg.hidden_init = InitScheme::Xavier;
  cfg.sigma = sigma;
  return plan_network(cfg);
}

// var(du/dx) <= (2n/(n+1)) * (2/(n+1)) for the tanh-Xavier network.
inline double bound_flat_init(int n) {
  if (n < 1) throw std::invalid_argument("bound_flat_init: n must be >= 1");
  return (2.0 * n / (n + 1.0)) * (2.0 / (n + 1.0));
}

// E[w^2 (2 pi cos(2 pi w x))^2] for w ~ N(0, sigma^2), in closed form:
// 2 pi^2 sigma^2 [1 + e^{-8 pi^2 s^2 x^2}(1 - 16 pi^2 s^2 x^2)].
inline double expected_sinusoidal_integrand(double sigma, double x) {
  if (sigma <= 0.0)
    throw std::invalid_argument("expected_sinusoidal_integrand: sigma must be positive");
  const double pi2 = M_PI * M_PI;
  const double a = 8.0 * pi2 * sigma * sigma * x * x;
  return 2.0 * pi2 * sigma * sigma * (1.0 + std::exp(-a) * (1.0 - 2.0 * a));
}

// var(du/dx) <= (2n/(n+1)) * (the expectation above) for the sinusoidal
// feature network; equality for one hidden layer.
inline double bound_sinusoidal(int n, double sigma, double x) {
  return (2.0 * n / (n + 1.0)) * expected_sinusoidal_integrand(sigma, x);
}

namespace detail {

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double panel(const F& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scaled = std::max(tol, std::abs(whole) * 1e-13);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, scaled, 48);
}

// Geometric pre-split so narrow peaks anywhere in [a, b] are seen before the
// adaptive recursion decides the integrand is negligible.
template <class F>
double integrate(const F& f, double a, double b, double tol) {
  const int panels = 32;
  double sum = 0.0;
  double lo = a;
  for (int i = 0; i < panels; ++i) {
    const double hi = i + 1 == panels ? b : a + (b - a) * std::pow(2.0, i + 1 - panels);
    sum += panel(f, lo, hi, tol / panels);
    lo = hi;
  }
  return sum;
}

}  // namespace detail

// E[w^2 sech^4(w x)] for w ~ N(0, sigma^2), by adaptive quadrature on
// [0, 10 sigma] doubled for symmetry; absolute tolerance 1e-10.
inline double expected_tanh_integrand(double sigma, double x) {
  if (sigma <= 0.0) throw std::invalid_argument("expected_tanh_integrand: sigma must be positive");
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto f = [sigma, x, norm](double w) {
    const double t = std::tanh(w * x);
    const double s = 1.0 - t * t;
    return w * w * s * s * norm * std::exp(-0.5 * (w / sigma) * (w / sigma));
  };
  return 2.0 * detail::integrate(f, 0.0, 10.0 * sigma, 1e-10);
}

// Decay bound on the same expectation: 2 / (sigma sqrt(2 pi)) * 1 / (2 x^2 |x|).
inline double tanh_integrand_bound(double sigma, double x) {
  const double ax = std::abs(x);
  if (ax <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("tanh_integrand_bound: needs x != 0 and sigma > 0");
  return 2.0 / (sigma * std::sqrt(2.0 * M_PI)) / (2.0 * x * x * ax);
}

inline double act_first_deriv(Act f, double x) {
  double d[2];
  act_derivs(f, x, d, 1);
  return d[1];
}

// Monte-Carlo estimate of var(f'(u)) + E[f'(u)]^2 = E[f'(u)^2] for
// u ~ N(0, var_u).
inline McStats backward_variance_sim(Act f, double var_u, long draws, Rng& rng) {
  if (var_u <= 0.0) throw std::invalid_argument("backward_variance_sim: var_u must be positive");
  const double sd = std::sqrt(var_u);
  double s1 = 0.0, s2 = 0.0;
  for (long i = 0; i < draws; ++i) {
    const double g = act_first_deriv(f, rng.normal(0.0, sd));
    const double q = g * g;
    s1 += q;
    s2 += q * q;
  }
  McStats st;
  st.draws = draws;
  st.mean = s1 / draws;
  st.var = (s2 / draws - st.mean * st.mean) * draws / (draws - 1.0);
  st.mean_se = std::sqrt(st.var / draws);
  return st;
}

// Gaussian identity for f = sin: E[cos^2 u] = (1 + e^{-2 var}) / 2.
inline double sin_backward_closed_form(double var_u) { return 0.5 * (1.0 + std::exp(-2.0 * var_u)); }

// The same quantity normalized by f'(0)^2, i.e. the fraction of the small-
// variance gradient magnitude retained during the backward pass.
inline double backward_retention(Act f, double var_u, long draws, Rng& rng) {
  const double g0 = act_first_deriv(f, 0.0);
  return backward_variance_sim(f, var_u, draws, rng).mean / (g0 * g0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct CoverageProbability {
  double single = 0.0;        // one feature lands near the target frequency
  double at_least_one = 0.0;  // any of n_features lands there
};

// P(|w| within rel_tol of target_w) for w ~ N(0, sigma^2), and the probability
// that at least one of n_features independent draws does.
inline CoverageProbability freq_coverage_probability(int n_features, double sigma, double target_w,
                                                     double rel_tol) {
  if (sigma <= 0.0) throw std::invalid_argument("freq_coverage_probability: sigma must be positive");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("freq_coverage_probability: rel_tol must be in (0, 1)");
  const double lo = target_w * (1.0 - rel_tol), hi = target_w * (1.0 + rel_tol);
  CoverageProbability cp;
  cp.single = 2.0 * (normal_cdf(hi / sigma) - normal_cdf(lo / sigma));
  cp.at_least_one = -std::expm1(n_features * std::log1p(-cp.single));
  return cp;
}

}  // namespace sfpinn
