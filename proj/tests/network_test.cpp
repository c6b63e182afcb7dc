#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sfpinn/initlab.hpp"
#include "sfpinn/network.hpp"
#include "sfpinn/rng.hpp"

using namespace sfpinn;

TEST_CASE("architecture strings parse to feature width, trunk, and outputs") {
  const ArchSpec a = parse_architecture("(x)-32-10-10-10-(u)");
  CHECK(a.labels == std::vector<std::string>{"x"});
  CHECK(a.feature_width == 32);
  CHECK(a.trunk == std::vector<int>{10, 10, 10});
  REQUIRE(a.branches.size() == 1);
  CHECK(a.branches[0].output == "u");
  CHECK(a.branches[0].hidden.empty());

  const ArchSpec b =
      parse_architecture("(x,y,t)-64-50-50-50-[50-50-50-(u),50-50-50-(v),50-50-50-(p)]");
  CHECK(b.labels == std::vector<std::string>{"x", "y", "t"});
  CHECK(b.feature_width == 64);
  CHECK(b.trunk == std::vector<int>{50, 50, 50});
  REQUIRE(b.branches.size() == 3);
  CHECK(b.branches[1].output == "v");
  CHECK(b.branches[2].hidden == std::vector<int>{50, 50, 50});

  const ArchSpec c = parse_architecture(" ( x , t ) - 64 - 50 - ( u ) ");
  CHECK(c.labels == std::vector<std::string>{"x", "t"});
  CHECK(c.trunk == std::vector<int>{50});

  CHECK_THROWS_AS(parse_architecture("x-32-(u)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_architecture("(x)-(u)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_architecture("(x)-32-10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_architecture("(x)-32-[10-(u),]"), std::invalid_argument);
}

TEST_CASE("variant table maps to feature map, activation, and initializer") {
  const auto std_cfg = make_network_config("(x)-32-10-(u)", Variant::Standard, 1.0);
  CHECK(std_cfg.feature_map == FeatureMap::StandardDense);
  CHECK(std_cfg.activation == Act::Tanh);
  CHECK(std_cfg.hidden_init == InitScheme::Xavier);

  const auto sf = make_network_config("(x)-32-10-(u)", Variant::Sf, 1.0);
  CHECK(sf.feature_map == FeatureMap::Sinusoidal);
  CHECK(sf.activation == Act::Tanh);

  const auto ff = make_network_config("(x)-32-10-(u)", Variant::Ff, 1.0);
  CHECK(ff.feature_map == FeatureMap::FourierPairs);

  const auto rf = make_network_config("(x)-32-10-(u)", Variant::Rf, 1.0);
  CHECK(rf.feature_map == FeatureMap::RandomFrozen);

  const auto siren = make_network_config("(x)-32-10-(u)", Variant::Siren, 1.0);
  CHECK(siren.feature_map == FeatureMap::Sinusoidal);
  CHECK(siren.activation == Act::Sin);
  CHECK(siren.hidden_init == InitScheme::He);

  // Fourier pair widths must be even
  CHECK_THROWS_AS(make_network_config("(x)-31-10-(u)", Variant::Ff, 1.0), std::invalid_argument);
}

TEST_CASE("init_layer variances match the schemes") {
  Rng rng(99);
  auto sample_var = [&](InitScheme scheme, int fi, int fo, double sigma, int repeats) {
    double s1 = 0.0, s2 = 0.0;
    long n = 0;
    for (int r = 0; r < repeats; ++r) {
      const auto w = init_layer(fi, fo, scheme, sigma, rng);
      for (double v : w) {
        s1 += v;
        s2 += v * v;
        ++n;
      }
    }
    const double mean = s1 / n;
    return std::pair{s2 / n - mean * mean, n};
  };

  {  // Xavier(10, 10): variance 2/20 = 0.1
    const auto [var, n] = sample_var(InitScheme::Xavier, 10, 10, 0.0, 1000);
    const double se = 0.1 * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - 0.1) <= 3 * se);
  }
  {  // He(1, 64): variance 2/1 = 2
    const auto [var, n] = sample_var(InitScheme::He, 1, 64, 0.0, 1600);
    const double se = 2.0 * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - 2.0) <= 3 * se);
  }
  {  // Normal(0.5): variance 0.25 over 1e5 draws
    const auto [var, n] = sample_var(InitScheme::Normal, 100, 10, 0.5, 100);
    REQUIRE(n == 100000);
    const double se = 0.25 * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - 0.25) <= 3 * se);
  }
  CHECK_THROWS_AS(init_layer(2, 2, InitScheme::Normal, 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(init_layer(0, 2, InitScheme::Xavier, 0.0, rng), std::invalid_argument);
}

TEST_CASE("feature maps evaluate their defining formulas") {
  // Single feature, weights picked so the pre-activation is controlled.
  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.input_labels = {"x"};
  cfg.feature_map = FeatureMap::Sinusoidal;
  cfg.feature_width = 1;
  cfg.branches = {{"u", {}}};
  const NetworkPlan plan = plan_network(cfg);
  // params: w1, b1, w2, b2 with w2 = 1, b2 = 0 so u equals the feature
  ParameterSet ps;
  ps.values = {1.0, 0.0, 1.0, 0.0};
  ps.trainable.assign(4, 1);

  Workspace ws;
  double out[1];
  double x = 0.0;
  forward_plain(plan, ps.values, std::span<const double>(&x, 1), ws, out);
  CHECK(out[0] == 0.0);  // sin(0)

  x = 0.25;  // W1 x + b1 = 0.25 -> sin(pi/2) = 1
  forward_plain(plan, ps.values, std::span<const double>(&x, 1), ws, out);
  CHECK(std::abs(out[0] - 1.0) < 1e-15);

  // Fourier pairs: [sin, cos] at arg 0 -> [0, 1]
  NetworkConfig fcfg = cfg;
  fcfg.feature_map = FeatureMap::FourierPairs;
  fcfg.feature_width = 2;
  const NetworkPlan fplan = plan_network(fcfg);
  ParameterSet fps;
  fps.values = {0.0, 0.0, 1.0, 0.0, 0.0};  // w1, b1, head w (2), head b
  fps.trainable.assign(5, 1);
  x = 0.7;
  forward_plain(fplan, fps.values, std::span<const double>(&x, 1), ws, out);
  CHECK(out[0] == 0.0);  // picks up the sin slot only
  fps.values[2] = 0.0;
  fps.values[3] = 1.0;
  forward_plain(fplan, fps.values, std::span<const double>(&x, 1), ws, out);
  CHECK(out[0] == 1.0);  // picks up the cos slot only
}

TEST_CASE("zero weights give zero outputs; unit linear path is the identity") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.input_labels = {"x", "y"};
  cfg.feature_map = FeatureMap::StandardDense;
  cfg.feature_width = 8;
  cfg.trunk = {4};
  cfg.branches = {{"u", {}}, {"v", {}}};
  const NetworkPlan plan = plan_network(cfg);
  ParameterSet ps;
  ps.values.assign(plan.weight_count, 0.0);
  ps.trainable.assign(plan.weight_count, 1);
  Workspace ws;
  double out[2];
  const double x[2] = {1.3, -0.4};
  forward_plain(plan, ps.values, x, ws, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);

  NetworkConfig lin;
  lin.input_dim = 1;
  lin.input_labels = {"x"};
  lin.feature_map = FeatureMap::NoneDirect;
  lin.feature_width = 0;
  lin.branches = {{"u", {}}};
  const NetworkPlan lplan = plan_network(lin);
  ParameterSet lps;
  lps.values = {1.0, 0.0};  // single head weight 1, bias 0
  lps.trainable.assign(2, 1);
  const double two = 2.0;
  forward_plain(lplan, lps.values, std::span<const double>(&two, 1), ws, out);
  CHECK(out[0] == 2.0);
}

TEST_CASE("plain forward agrees with the jet forward value bit-exactly") {
  Rng rng(123);
  for (int rep = 0; rep < 20; ++rep) {
    NetworkConfig cfg;
    cfg.input_dim = 1 + static_cast<int>(rng.below(3));
    for (int d = 0; d < cfg.input_dim; ++d) cfg.input_labels.push_back("x" + std::to_string(d));
    const FeatureMap maps[4] = {FeatureMap::StandardDense, FeatureMap::Sinusoidal,
                                FeatureMap::FourierPairs, FeatureMap::NoneDirect};
    cfg.feature_map = maps[rng.below(4)];
    cfg.feature_width = 2 * (1 + static_cast<int>(rng.below(3)));
    if (rng.below(2)) cfg.trunk.push_back(2 + static_cast<int>(rng.below(4)));
    cfg.branches = {{"u", {}}};
    if (rng.below(2)) cfg.branches.push_back({"v", {3}});
    cfg.activation = rng.below(2) ? Act::Tanh : Act::Sin;
    cfg.sigma = rng.uniform(0.3, 2.0);
    const NetworkPlan plan = plan_network(cfg);
    const ParameterSet ps = init_parameters(plan, rng);

    std::vector<double> x(cfg.input_dim);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);

    Workspace ws;
    std::vector<double> out(plan.branches.size());
    forward_plain(plan, ps.values, x, ws, out);

    Tape tape;
    const auto jets = forward_with_jets(plan, ps, x, 0, 2, tape);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == jets[i].jet.value());
  }
}

TEST_CASE("one-hidden-layer sinusoidal feature derivative has the closed form") {
  // u = v sin(2 pi w x) with zero biases: du/dx = v w 2 pi cos(2 pi w x)
  const NetworkPlan plan = sf_one_layer_plan(1, 1.0);
  ParameterSet ps;
  ps.values = {0.8, 0.0, 1.7, 0.0};  // w, b1, v, b2
  ps.trainable.assign(4, 1);
  const double x = 0.37;
  Tape tape;
  const auto jets = forward_with_jets(plan, ps, std::span<const double>(&x, 1), 0, 1, tape);
  const double expect = 1.7 * 0.8 * kTwoPi * std::cos(kTwoPi * 0.8 * x);
  CHECK(std::abs(jets[0].jet.deriv(1) - expect) < 1e-14);
}

TEST_CASE("constant network has zero derivative coefficients") {
  NetworkConfig cfg;
  cfg.input_dim = 1;
  cfg.input_labels = {"x"};
  cfg.feature_map = FeatureMap::Sinusoidal;
  cfg.feature_width = 4;
  cfg.trunk = {4};
  cfg.branches = {{"u", {}}};
  const NetworkPlan plan = plan_network(cfg);
  ParameterSet ps;
  ps.values.assign(plan.weight_count, 0.0);
  ps.trainable.assign(plan.weight_count, 1);
  const double x = 0.61;
  Tape tape;
  const auto jets = forward_with_jets(plan, ps, std::span<const double>(&x, 1), 0, 3, tape);
  for (int k = 1; k <= 3; ++k) CHECK(jets[0].jet.coeff(k) == 0.0);
}

TEST_CASE("random frozen features mark their parameters non-trainable") {
  const auto cfg = make_network_config("(x,t)-8-4-(u)", Variant::Rf, 1.0);
  const NetworkPlan plan = plan_network(cfg);
  Rng rng(5);
  const ParameterSet ps = init_parameters(plan, rng);
  const std::size_t feat_n =
      static_cast<std::size_t>(plan.feature.n_in) * plan.feature.n_out + plan.feature.n_out;
  for (std::size_t i = 0; i < feat_n; ++i) CHECK(ps.trainable[plan.feature.w_off + i] == 0);
  for (std::size_t i = plan.feature.w_off + feat_n; i < plan.weight_count; ++i)
    CHECK(ps.trainable[i] == 1);
}

TEST_CASE("mean input gradient at initialization is zero within three standard errors") {
  Rng rng(777);
  for (const Variant v : {Variant::Standard, Variant::Sf, Variant::Ff, Variant::Rf, Variant::Siren}) {
    const auto cfg = make_network_config("(x)-8-6-(u)", v, 1.0);
    const NetworkPlan plan = plan_network(cfg);
    for (const double x : {0.0, 0.6}) {
      const McStats st = mc_input_gradient_variance(plan, x, 4000, rng);
      INFO(variant_name(v) << " at x=" << x << ": mean " << st.mean << " se " << st.mean_se);
      CHECK(std::abs(st.mean) <= 3.0 * st.mean_se);
    }
  }
}

TEST_CASE("physics scalars append to the flat vector with their own mask") {
  const auto cfg = make_network_config("(x)-4-(u)", Variant::Sf, 1.0);
  const NetworkPlan plan = plan_network(cfg);
  Rng rng(1);
  const ScalarParam scalars[2] = {{"c", 1.5, true}, {"k", 2.0, false}};
  const ParameterSet ps = init_parameters(plan, rng, scalars);
  CHECK(ps.values.size() == plan.weight_count + 2);
  CHECK(ps.scalar("c") == 1.5);
  CHECK(ps.scalar("k") == 2.0);
  CHECK(ps.trainable[ps.scalar_index("c")] == 1);
  CHECK(ps.trainable[ps.scalar_index("k")] == 0);
  CHECK_THROWS_AS(ps.scalar("missing"), std::invalid_argument);
}
