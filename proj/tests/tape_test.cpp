#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfpinn/network.hpp"
#include "sfpinn/rng.hpp"
#include "sfpinn/tape.hpp"

using namespace sfpinn;

namespace {

bool close_rel(double a, double b, double rtol, double atol = 1e-10) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

}  // namespace

TEST_CASE("gradient of theta * x with a seeded constant") {
  std::vector<double> params = {3.0};
  Tape tape;
  tape.bind(params);
  tape.begin(JetShape::value_only());
  const TapeVar theta = tape.param(0);
  const TapeVar x = tape.constant(2.0);
  const TapeVar out = tape.mul(theta, x);
  CHECK(tape.value(out) == 6.0);
  const auto grad = tape.gradient(out);
  REQUIRE(grad.size() == 1);
  CHECK(grad[0] == 2.0);
}

TEST_CASE("gradient of sin(theta) at zero") {
  std::vector<double> params = {0.0};
  Tape tape;
  tape.bind(params);
  tape.begin(JetShape::value_only());
  const TapeVar theta = tape.param(0);
  const TapeVar out{tape.activation(theta.node, Act::Sin)};
  const auto grad = tape.gradient(out);
  CHECK(grad[0] == 1.0);
}

TEST_CASE("gradient without a designated output is a usage error") {
  Tape tape;
  CHECK_THROWS_AS(tape.gradient(TapeVar{}), std::invalid_argument);
}

TEST_CASE("37-parameter two-layer network gradient matches finite differences") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.input_labels = {"x", "y"};
  cfg.feature_map = FeatureMap::StandardDense;
  cfg.feature_width = 4;
  cfg.trunk = {4};
  cfg.branches = {{"u", {}}};
  const NetworkPlan plan = plan_network(cfg);
  REQUIRE(plan.weight_count == 37);

  Rng rng(5);
  ParameterSet ps = init_parameters(plan, rng);
  const double x[2] = {0.3, -0.8};

  Tape tape;
  tape.bind(ps.values);
  tape.begin(JetShape::value_only());
  const TapedOutputs outs = forward_on_tape(tape, plan, x);
  const auto grad = tape.gradient(outs.vars[0]);

  Workspace ws;
  double out[1];
  const double h = 1e-5;
  for (std::size_t i = 0; i < ps.values.size(); ++i) {
    const double orig = ps.values[i];
    ps.values[i] = orig + h;
    forward_plain(plan, ps.values, x, ws, out);
    const double hi = out[0];
    ps.values[i] = orig - h;
    forward_plain(plan, ps.values, x, ws, out);
    const double lo = out[0];
    ps.values[i] = orig;
    const double fd = (hi - lo) / (2 * h);
    INFO("param " << i << " grad " << grad[i] << " fd " << fd);
    CHECK(close_rel(grad[i], fd, 1e-6));
  }
}

TEST_CASE("gradients flow through jet planes used in residual-style outputs") {
  // d/dw of d(u)/dx for u = sin(w x): d(u)/dx = w cos(w x), so the parameter
  // gradient is cos(w x) - w x sin(w x).
  std::vector<double> params = {1.3};
  const double x = 0.7;
  Tape tape;
  tape.bind(params);
  tape.begin(JetShape::single(0, 1));
  const double xv[1] = {x};
  const std::uint32_t in = tape.input(xv);
  const TapeVar wx = tape.mul(tape.param(0), tape.pick(in, 0));
  const TapeVar u{tape.activation(wx.node, Act::Sin)};
  const TapeVar ux = tape.deriv(u, 0, 1);
  CHECK(close_rel(tape.value(ux), params[0] * std::cos(params[0] * x), 1e-14));
  const auto grad = tape.gradient(ux);
  const double expect = std::cos(params[0] * x) - params[0] * x * std::sin(params[0] * x);
  CHECK(close_rel(grad[0], expect, 1e-12));
}

TEST_CASE("input derivatives from a fused multi-direction pass match single seeds") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.input_labels = {"x", "t"};
  cfg.feature_map = FeatureMap::Sinusoidal;
  cfg.feature_width = 6;
  cfg.trunk = {5};
  cfg.branches = {{"u", {}}};
  cfg.sigma = 0.8;
  const NetworkPlan plan = plan_network(cfg);
  Rng rng(17);
  ParameterSet ps = init_parameters(plan, rng);

  const double x[2] = {0.4, 0.9};
  Tape fused;
  fused.bind(ps.values);
  const int orders[2] = {2, 2};
  fused.begin(JetShape::from_orders(orders));
  const TapedOutputs outs = forward_on_tape(fused, plan, x);
  const Jet jx = fused.jet(outs.vars[0].node, 0, 0);
  const Jet jt = fused.jet(outs.vars[0].node, 0, 1);

  Tape single;
  const auto sx = forward_with_jets(plan, ps, x, 0, 2, single);
  const auto st = forward_with_jets(plan, ps, x, 1, 2, single);
  for (int k = 0; k <= 2; ++k) {
    CHECK(jx.coeff(k) == sx[0].jet.coeff(k));
    CHECK(jt.coeff(k) == st[0].jet.coeff(k));
  }
}

TEST_CASE("third-order jet gradients match finite differences") {
  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.input_labels = {"x"};
  cfg.feature_map = FeatureMap::Sinusoidal;
  cfg.feature_width = 4;
  cfg.trunk = {3};
  cfg.branches = {{"u", {}}};
  cfg.sigma = 0.9;
  const NetworkPlan plan = plan_network(cfg);
  Rng rng(23);
  ParameterSet ps = init_parameters(plan, rng);
  const double x[1] = {0.31};

  Tape tape;
  auto third = [&](std::span<const double> values) {
    tape.bind(values);
    tape.begin(JetShape::single(0, 3));
    const TapedOutputs outs = forward_on_tape(tape, plan, x);
    return std::pair{tape.deriv(outs.vars[0], 0, 3), &tape};
  };
  auto [var, tp] = third(ps.values);
  const auto grad = tp->gradient(var);

  const double h = 2e-5;
  for (std::size_t i = 0; i < ps.values.size(); ++i) {
    const double orig = ps.values[i];
    ps.values[i] = orig + h;
    const double hi = tp->value(third(ps.values).first);
    ps.values[i] = orig - h;
    const double lo = tp->value(third(ps.values).first);
    ps.values[i] = orig;
    const double fd = (hi - lo) / (2 * h);
    INFO("param " << i);
    CHECK(close_rel(grad[i], fd, 2e-5, 1e-7));
  }
}

TEST_CASE("replaying a record reproduces values bit-exactly") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.input_labels = {"x", "y"};
  cfg.feature_map = FeatureMap::FourierPairs;
  cfg.feature_width = 6;
  cfg.trunk = {4};
  cfg.branches = {{"u", {}}, {"v", {}}};
  const NetworkPlan plan = plan_network(cfg);
  Rng rng(29);
  const ParameterSet ps = init_parameters(plan, rng);
  const double x[2] = {0.2, -0.4};

  auto run = [&](Tape& tape) {
    tape.bind(ps.values);
    const int orders[2] = {2, 1};
    tape.begin(JetShape::from_orders(orders));
    const TapedOutputs outs = forward_on_tape(tape, plan, x);
    return std::pair{tape.value(outs.vars[0]), tape.value(outs.vars[1])};
  };
  Tape t1, t2;
  const auto a = run(t1);
  const auto b = run(t2);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  // reuse of the same tape after begin() is also bit-stable
  const auto c = run(t1);
  CHECK(a.first == c.first);
}
