#pragma once

// MLP construction: input feature maps, trunk, branched output heads,
// initializers, and forward evaluation in plain and jet modes.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfpinn/jet.hpp"
#include "sfpinn/rng.hpp"
#include "sfpinn/tape.hpp"

namespace sfpinn {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class FeatureMap : std::uint8_t {
  StandardDense,  // tanh(W1 x + b1)
  Sinusoidal,     // sin(2 pi (W1 x + b1))
  FourierPairs,   // [sin, cos] of 2 pi (W1 x + b1), shared W1/b1, width n1/2 each
  RandomFrozen,   // FourierPairs with W1, b1 excluded from training
  NoneDirect      // inputs pass straight to the trunk
};

enum class InitScheme : std::uint8_t { Xavier, He, Normal };

enum class Variant : std::uint8_t { Standard, Sf, Ff, Rf, Siren };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Standard: return "standard";
    case Variant::Sf: return "sf";
    case Variant::Ff: return "ff";
    case Variant::Rf: return "rf";
    case Variant::Siren: return "siren";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "standard") return Variant::Standard;
  if (s == "sf") return Variant::Sf;
  if (s == "ff") return Variant::Ff;
  if (s == "rf") return Variant::Rf;
  if (s == "siren") return Variant::Siren;
  throw std::invalid_argument("unknown variant: " + std::string(s));
}

struct BranchSpec {
  std::string output;
  std::vector<int> hidden;
};

struct NetworkConfig {
  int input_dim = 1;
  std::vector<std::string> input_labels;
  FeatureMap feature_map = FeatureMap::StandardDense;
  int feature_width = 0;
  std::vector<int> trunk;
  std::vector<BranchSpec> branches;
  Act activation = Act::Tanh;
  InitScheme hidden_init = InitScheme::Xavier;
  double sigma = 1.0;              // feature-layer weight stddev
  bool feature_uses_sigma = true;  // false: feature layer follows hidden_init

  void validate() const {
    if (input_dim < 1) throw std::invalid_argument("NetworkConfig: input_dim must be >= 1");
    if (branches.empty()) throw std::invalid_argument("NetworkConfig: needs at least one output");
    if (feature_map != FeatureMap::NoneDirect && feature_width < 1)
      throw std::invalid_argument("NetworkConfig: feature width must be >= 1");
    if ((feature_map == FeatureMap::FourierPairs || feature_map == FeatureMap::RandomFrozen) &&
        feature_width % 2 != 0)
      throw std::invalid_argument("NetworkConfig: Fourier feature maps need an even width");
    for (int w : trunk)
      if (w < 1) throw std::invalid_argument("NetworkConfig: widths must be >= 1");
    for (const auto& b : branches)
      for (int w : b.hidden)
        if (w < 1) throw std::invalid_argument("NetworkConfig: widths must be >= 1");
    if (feature_uses_sigma && sigma <= 0.0)
      throw std::invalid_argument("NetworkConfig: sigma must be positive");
  }
};

// ---- architecture strings ------------------------------------------------
//
// Grammar (whitespace ignored):
//   arch    := "(" label ("," label)* ")" ("-" width)+ "-" outputs
//   outputs := "(" label ")" | "[" branch ("," branch)* "]"
//   branch  := (width "-")* "(" label ")"
// The first width is the feature width, remaining widths form the trunk.
// Example: "(x,t)-64-50-50-50-(u)" or
//          "(x,y,t)-64-50-50-50-[50-50-50-(u),50-50-50-(v),50-50-50-(p)]"

struct ArchSpec {
  std::vector<std::string> labels;
  int feature_width = 0;
  std::vector<int> trunk;
  std::vector<BranchSpec> branches;
};

namespace detail {

class ArchParser {
 public:
  explicit ArchParser(std::string_view s) : s_(s) {}

  ArchSpec parse() {
    ArchSpec spec;
    expect('(');
    spec.labels.push_back(label());
    while (peek() == ',') {
      ++pos_;
      spec.labels.push_back(label());
    }
    expect(')');
    std::vector<int> widths;
    for (;;) {
      expect('-');
      const char c = peek();
      if (c == '(') {
        spec.branches.push_back({paren_label(), {}});
        break;
      }
      if (c == '[') {
        ++pos_;
        spec.branches.push_back(branch());
        while (peek() == ',') {
          ++pos_;
          spec.branches.push_back(branch());
        }
        expect(']');
        break;
      }
      widths.push_back(number());
    }
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    if (widths.empty()) fail("architecture needs at least one hidden width");
    spec.feature_width = widths.front();
    spec.trunk.assign(widths.begin() + 1, widths.end());
    return spec;
  }

 private:
  BranchSpec branch() {
    BranchSpec b;
    while (peek() != '(') {
      b.hidden.push_back(number());
      expect('-');
    }
    b.output = paren_label();
    return b;
  }

  std::string paren_label() {
    expect('(');
    std::string name = label();
    expect(')');
    return name;
  }

  std::string label() {
    skip_ws();
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == ',' || c == ')' || c == '(' || c == '-' || c == '[' || c == ']') break;
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
      ++pos_;
    }
    if (out.empty()) fail("expected a name");
    return out;
  }

  int number() {
    skip_ws();
    int v = 0;
    bool any = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
      any = true;
    }
    if (!any) fail("expected a layer width");
    return v;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("architecture \"" + std::string(s_) + "\": " + what +
                                " at offset " + std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ArchSpec parse_architecture(std::string_view s) { return detail::ArchParser(s).parse(); }

inline NetworkConfig make_network_config(std::string_view arch, Variant variant, double sigma) {
  const ArchSpec spec = parse_architecture(arch);
  NetworkConfig cfg;
  cfg.input_labels = spec.labels;
  cfg.input_dim = static_cast<int>(spec.labels.size());
  cfg.feature_width = spec.feature_width;
  cfg.trunk = spec.trunk;
  cfg.branches = spec.branches;
  cfg.sigma = sigma;
  switch (variant) {
    case Variant::Standard:
      cfg.feature_map = FeatureMap::StandardDense;
      cfg.activation = Act::Tanh;
      cfg.hidden_init = InitScheme::Xavier;
      break;
    case Variant::Sf:
      cfg.feature_map = FeatureMap::Sinusoidal;
      cfg.activation = Act::Tanh;
      cfg.hidden_init = InitScheme::Xavier;
      break;
    case Variant::Ff:
      cfg.feature_map = FeatureMap::FourierPairs;
      cfg.activation = Act::Tanh;
      cfg.hidden_init = InitScheme::Xavier;
      break;
    case Variant::Rf:
      cfg.feature_map = FeatureMap::RandomFrozen;
      cfg.activation = Act::Tanh;
      cfg.hidden_init = InitScheme::Xavier;
      break;
    case Variant::Siren:
      cfg.feature_map = FeatureMap::Sinusoidal;
      cfg.activation = Act::Sin;
      cfg.hidden_init = InitScheme::He;
      break;
  }
  cfg.validate();
  return cfg;
}

// ---- parameter layout ------------------------------------------------------

struct NetworkPlan {
  NetworkConfig config;
  bool has_feature = false;
  LayerView feature;
  std::vector<LayerView> trunk;
  struct BranchPlan {
    std::string name;
    std::vector<LayerView> hidden;
    LayerView head;
  };
  std::vector<BranchPlan> branches;
  std::size_t weight_count = 0;

  std::vector<std::string> output_names() const {
    std::vector<std::string> names;
    names.reserve(branches.size());
    for (const auto& b : branches) names.push_back(b.name);
    return names;
  }
};

inline NetworkPlan plan_network(const NetworkConfig& cfg) {
  cfg.validate();
  NetworkPlan plan;
  plan.config = cfg;
  std::size_t off = 0;
  auto layer = [&off](int n_in, int n_out) {
    LayerView lv;
    lv.n_in = n_in;
    lv.n_out = n_out;
    lv.w_off = off;
    off += static_cast<std::size_t>(n_in) * n_out;
    lv.b_off = off;
    off += static_cast<std::size_t>(n_out);
    return lv;
  };

  int width = cfg.input_dim;
  if (cfg.feature_map != FeatureMap::NoneDirect) {
    const bool pairs =
        cfg.feature_map == FeatureMap::FourierPairs || cfg.feature_map == FeatureMap::RandomFrozen;
    plan.has_feature = true;
    plan.feature = layer(width, pairs ? cfg.feature_width / 2 : cfg.feature_width);
    width = cfg.feature_width;
  }
  for (int w : cfg.trunk) {
    plan.trunk.push_back(layer(width, w));
    width = w;
  }
  for (const auto& b : cfg.branches) {
    NetworkPlan::BranchPlan bp;
    bp.name = b.output;
    int bw = width;
    for (int w : b.hidden) {
      bp.hidden.push_back(layer(bw, w));
      bw = w;
    }
    bp.head = layer(bw, 1);
    plan.branches.push_back(std::move(bp));
  }
  plan.weight_count = off;
  return plan;
}

// ---- initialization --------------------------------------------------------

// Weight matrix for one dense layer; biases are zero and not drawn.
inline std::vector<double> init_layer(int fan_in, int fan_out, InitScheme scheme, double sigma,
                                      Rng& rng) {
  if (fan_in < 1 || fan_out < 1) throw std::invalid_argument("init_layer: fans must be >= 1");
  double sd = 0.0;
  switch (scheme) {
    case InitScheme::Xavier: sd = std::sqrt(2.0 / (fan_in + fan_out)); break;
    case InitScheme::He: sd = std::sqrt(2.0 / fan_in); break;
    case InitScheme::Normal:
      if (sigma <= 0.0) throw std::invalid_argument("init_layer: sigma must be positive");
      sd = sigma;
      break;
  }
  std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
  for (auto& v : w) v = rng.normal(0.0, sd);
  return w;
}

struct ScalarParam {
  std::string name;
  double value = 0.0;
  bool trainable = false;
};

struct ParameterSet {
  std::vector<double> values;
  std::vector<std::uint8_t> trainable;
  std::size_t scalar_offset = 0;
  std::vector<std::string> scalar_names;

  std::size_t scalar_index(std::string_view name) const {
    for (std::size_t i = 0; i < scalar_names.size(); ++i)
      if (scalar_names[i] == name) return scalar_offset + i;
    throw std::invalid_argument("ParameterSet: unknown scalar " + std::string(name));
  }
  double scalar(std::string_view name) const { return values[scalar_index(name)]; }
};

inline ParameterSet init_parameters(const NetworkPlan& plan, Rng& rng,
                                    std::span<const ScalarParam> scalars = {}) {
  const NetworkConfig& cfg = plan.config;
  ParameterSet ps;
  ps.values.assign(plan.weight_count + scalars.size(), 0.0);
  ps.trainable.assign(ps.values.size(), 1);
  ps.scalar_offset = plan.weight_count;

  auto fill = [&](const LayerView& lv, InitScheme scheme, double sigma) {
    const auto w = init_layer(lv.n_in, lv.n_out, scheme, sigma, rng);
    std::copy(w.begin(), w.end(), ps.values.begin() + static_cast<std::ptrdiff_t>(lv.w_off));
  };

  if (plan.has_feature) {
    if (cfg.feature_uses_sigma)
      fill(plan.feature, InitScheme::Normal, cfg.sigma);
    else
      fill(plan.feature, cfg.hidden_init, 0.0);
    if (cfg.feature_map == FeatureMap::RandomFrozen) {
      const std::size_t n =
          static_cast<std::size_t>(plan.feature.n_in) * plan.feature.n_out + plan.feature.n_out;
      for (std::size_t i = 0; i < n; ++i) ps.trainable[plan.feature.w_off + i] = 0;
    }
  }
  for (const auto& lv : plan.trunk) fill(lv, cfg.hidden_init, 0.0);
  for (const auto& b : plan.branches) {
    for (const auto& lv : b.hidden) fill(lv, cfg.hidden_init, 0.0);
    fill(b.head, cfg.hidden_init, 0.0);
  }
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    ps.values[ps.scalar_offset + i] = scalars[i].value;
    ps.trainable[ps.scalar_offset + i] = scalars[i].trainable ? 1 : 0;
    ps.scalar_names.push_back(scalars[i].name);
  }
  return ps;
}

// ---- forward passes --------------------------------------------------------

struct TapedOutputs {
  std::vector<std::string> names;
  std::vector<TapeVar> vars;

  TapeVar at(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return vars[i];
    throw std::invalid_argument("TapedOutputs: unknown output " + std::string(name));
  }
};

// Records the whole network onto the tape; the tape must be begin()'d with the
// desired jet shape and bound to the parameter vector behind `plan`.
inline TapedOutputs forward_on_tape(Tape& tape, const NetworkPlan& plan,
                                    std::span<const double> x) {
  if (static_cast<int>(x.size()) != plan.config.input_dim)
    throw std::invalid_argument("forward_on_tape: input dimension mismatch");
  std::uint32_t cur = tape.input(x);
  if (plan.has_feature) {
    const std::uint32_t pre = tape.affine(cur, plan.feature);
    switch (plan.config.feature_map) {
      case FeatureMap::StandardDense:
        cur = tape.activation(pre, Act::Tanh);
        break;
      case FeatureMap::Sinusoidal:
        cur = tape.activation(tape.scale(pre, kTwoPi), Act::Sin);
        break;
      case FeatureMap::FourierPairs:
      case FeatureMap::RandomFrozen: {
        const std::uint32_t arg = tape.scale(pre, kTwoPi);
        cur = tape.concat(tape.activation(arg, Act::Sin), tape.activation(arg, Act::Cos));
        break;
      }
      case FeatureMap::NoneDirect:
        break;
    }
  }
  for (const auto& lv : plan.trunk) cur = tape.activation(tape.affine(cur, lv), plan.config.activation);

  TapedOutputs outs;
  for (const auto& b : plan.branches) {
    std::uint32_t h = cur;
    for (const auto& lv : b.hidden) h = tape.activation(tape.affine(h, lv), plan.config.activation);
    const std::uint32_t head = tape.affine(h, b.head);
    outs.names.push_back(b.name);
    outs.vars.push_back(TapeVar{head});
  }
  return outs;
}

struct Workspace {
  std::vector<double> a, b, trunk_out;
};

// Plain forward pass, no derivatives. Accumulation order matches the taped
// value plane bit for bit.
inline void forward_plain(const NetworkPlan& plan, std::span<const double> params,
                          std::span<const double> x, Workspace& ws, std::span<double> out) {
  const NetworkConfig& cfg = plan.config;
  auto affine = [&params](const LayerView& lv, const double* in, double* o) {
    detail::affine_apply(params.data() + lv.w_off, params.data() + lv.b_off, in, o, lv.n_in,
                         lv.n_out);
  };

  ws.a.assign(x.begin(), x.end());
  if (plan.has_feature) {
    ws.b.resize(static_cast<std::size_t>(cfg.feature_width));
    switch (cfg.feature_map) {
      case FeatureMap::StandardDense:
        affine(plan.feature, ws.a.data(), ws.b.data());
        for (int i = 0; i < cfg.feature_width; ++i) ws.b[i] = act_value(Act::Tanh, ws.b[i]);
        break;
      case FeatureMap::Sinusoidal:
        affine(plan.feature, ws.a.data(), ws.b.data());
        for (int i = 0; i < cfg.feature_width; ++i)
          ws.b[i] = act_value(Act::Sin, kTwoPi * ws.b[i]);
        break;
      case FeatureMap::FourierPairs:
      case FeatureMap::RandomFrozen: {
        const int half = cfg.feature_width / 2;
        affine(plan.feature, ws.a.data(), ws.b.data() + half);  // stash pre-activations
        for (int i = 0; i < half; ++i) {
          const double arg = kTwoPi * ws.b[half + i];
          ws.b[i] = act_value(Act::Sin, arg);
          ws.b[half + i] = act_value(Act::Cos, arg);
        }
        break;
      }
      case FeatureMap::NoneDirect:
        break;
    }
    if (cfg.feature_map != FeatureMap::NoneDirect) std::swap(ws.a, ws.b);
  }
  for (const auto& lv : plan.trunk) {
    ws.b.resize(static_cast<std::size_t>(lv.n_out));
    affine(lv, ws.a.data(), ws.b.data());
    for (int i = 0; i < lv.n_out; ++i) ws.b[i] = act_value(cfg.activation, ws.b[i]);
    std::swap(ws.a, ws.b);
  }
  ws.trunk_out = ws.a;
  for (std::size_t bi = 0; bi < plan.branches.size(); ++bi) {
    const auto& br = plan.branches[bi];
    ws.a = ws.trunk_out;
    for (const auto& lv : br.hidden) {
      ws.b.resize(static_cast<std::size_t>(lv.n_out));
      affine(lv, ws.a.data(), ws.b.data());
      for (int i = 0; i < lv.n_out; ++i) ws.b[i] = act_value(cfg.activation, ws.b[i]);
      std::swap(ws.a, ws.b);
    }
    double o;
    affine(br.head, ws.a.data(), &o);
    out[bi] = o;
  }
}

struct JetOutput {
  std::string name;
  Jet jet;
};

// Named output jets along one seeded input dimension. The scratch tape is the
// adjoint record for the evaluation; call scratch.gradient() afterwards for
// parameter sensitivities.
inline std::vector<JetOutput> forward_with_jets(const NetworkPlan& plan, const ParameterSet& ps,
                                                std::span<const double> x, int seeded_dim,
                                                int order, Tape& scratch) {
  if (seeded_dim < 0 || seeded_dim >= plan.config.input_dim)
    throw std::invalid_argument("forward_with_jets: seeded_dim out of range");
  if (order < 0 || order > kMaxJetOrder)
    throw std::invalid_argument("forward_with_jets: order out of range");
  scratch.bind(ps.values);
  scratch.begin(JetShape::single(seeded_dim, order));
  const TapedOutputs outs = forward_on_tape(scratch, plan, x);
  std::vector<JetOutput> jets;
  jets.reserve(outs.names.size());
  for (std::size_t i = 0; i < outs.names.size(); ++i)
    jets.push_back({outs.names[i], scratch.jet(outs.vars[i].node, 0, seeded_dim)});
  return jets;
}

}  // namespace sfpinn
