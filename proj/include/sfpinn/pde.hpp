#pragma once

// Benchmark problem machinery: domains, boundary/initial condition specs,
// residual operators evaluated either on plain jets (oracle checks) or on a
// tape (training), and inverse-problem variants with trainable coefficients.

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfpinn/jet.hpp"
#include "sfpinn/network.hpp"
#include "sfpinn/tape.hpp"

namespace sfpinn {

struct Domain {
  std::vector<std::array<double, 2>> bounds;
  std::vector<std::string> labels;
  bool has_time = false;  // when set, the last dimension is time

  int dim() const { return static_cast<int>(bounds.size()); }
  double lo(int d) const { return bounds[d][0]; }
  double hi(int d) const { return bounds[d][1]; }
  int time_dim() const { return has_time ? dim() - 1 : -1; }

  void validate() const {
    if (bounds.empty()) throw std::invalid_argument("Domain: needs at least one dimension");
    for (const auto& b : bounds)
      if (!(b[0] < b[1])) throw std::invalid_argument("Domain: lower bound must be below upper");
  }
};

enum class CondKind : std::uint8_t {
  Dirichlet,
  Neumann,
  InitialValue,
  InitialTimeDerivative,
  PeriodicPair
};

struct CondTerm {
  CondKind kind;
  int field = 0;
  int dim = 0;    // derivative dimension for Neumann / match dimension for periodic
  int order = 0;  // derivative order: 0 value, 1 first derivative
  std::function<double(std::span<const double>)> target;  // unused for PeriodicPair
};

// One sampled location class (a boundary face, the t=0 slice, or a periodic
// face pair) together with every condition term enforced there.
struct ConditionSet {
  enum class Location : std::uint8_t { Face, TimeZero, Periodic };
  Location loc = Location::Face;
  int dim = 0;   // face / pair dimension
  int side = 0;  // 0 = lower, 1 = upper (Face only)
  bool exclude_corners = false;
  bool is_ic = false;  // accumulate into the IC bucket instead of BC
  std::vector<CondTerm> terms;
};

struct PhysicsScalar {
  std::string name;
  double true_value = 0.0;
  double initial_guess = 1.0;
  bool invertible = false;  // designated for inverse-problem estimation
  bool trainable = false;
};

// ---- residual contexts -----------------------------------------------------

// Residual operators are written once as generic lambdas over a context and
// instantiated for both evaluation modes below.

class PlainResidualCtx {
 public:
  using Var = double;

  // jets[field][dim] seeded along dim; scalars resolved by name.
  PlainResidualCtx(const std::vector<std::vector<Jet>>& jets,
                   const std::vector<PhysicsScalar>& scalars, std::span<const double> pt,
                   std::span<const double> scalar_values = {})
      : jets_(jets), scalars_(scalars), pt_(pt), scalar_values_(scalar_values) {}

  double d(int field, int dim, int k) const { return jets_[field][dim].deriv(k); }

  double point(int dim) const { return pt_[dim]; }

  double coeff(std::string_view name) const {
    for (std::size_t i = 0; i < scalars_.size(); ++i)
      if (scalars_[i].name == name)
        return scalar_values_.empty() ? scalars_[i].true_value : scalar_values_[i];
    throw std::invalid_argument("residual: unknown coefficient " + std::string(name));
  }

  double lit(double v) const { return v; }

 private:
  const std::vector<std::vector<Jet>>& jets_;
  const std::vector<PhysicsScalar>& scalars_;
  std::span<const double> pt_;
  std::span<const double> scalar_values_;
};

class TapeResidualCtx {
 public:
  using Var = TapeExpr;

  TapeResidualCtx(Tape& tape, const TapedOutputs& outs, const std::vector<PhysicsScalar>& scalars,
                  const ParameterSet& params, std::span<const double> pt)
      : tape_(tape), outs_(outs), scalars_(scalars), params_(params), pt_(pt) {}

  TapeExpr d(int field, int dim, int k) {
    return {&tape_, tape_.deriv(outs_.vars[field], dim, k)};
  }

  double point(int dim) const { return pt_[dim]; }

  TapeExpr coeff(std::string_view name) {
    for (const auto& s : scalars_)
      if (s.name == name) return {&tape_, tape_.param(params_.scalar_index(name))};
    throw std::invalid_argument("residual: unknown coefficient " + std::string(name));
  }

  TapeExpr lit(double v) { return {&tape_, tape_.constant(v)}; }

 private:
  Tape& tape_;
  const TapedOutputs& outs_;
  const std::vector<PhysicsScalar>& scalars_;
  const ParameterSet& params_;
  std::span<const double> pt_;
};

struct ResidualDef {
  std::function<std::vector<double>(PlainResidualCtx&)> plain;
  std::function<std::vector<TapeExpr>(TapeResidualCtx&)> taped;
};

template <class F>
ResidualDef make_residual(F f) {
  return {[f](PlainResidualCtx& c) { return f(c); }, [f](TapeResidualCtx& c) { return f(c); }};
}

// ---- problem definition ----------------------------------------------------

enum class MseKind : std::uint8_t { Scalar, VelocityMagnitude, MeanUV, Reference, None };

struct ProblemDefaults {
  std::string arch;
  double sigma = 1.0;
  double lambda = 1.0;
  double lr = 5e-3;
  long iters_paper = 0;
  long iters_desk = 0;
  int n_pde = 0, n_ic = 0, n_bc = 0, n_data = 0;
  std::vector<int> sample_shape;  // grid resolution per dimension, or {n} for a
                                  // Latin hypercube pool
};

struct ObservationSet {
  int count = 0;
  std::vector<double> points;  // count x dim
  std::vector<double> values;  // count x fields
};

struct ReferenceTable;  // kdv_reference.hpp

struct PdeProblem {
  std::string name;
  Domain domain;
  std::vector<std::string> fields;
  std::vector<int> jet_orders;  // per dimension, highest derivative in the residual
  int n_equations = 1;
  ResidualDef residual;
  std::vector<ConditionSet> conditions;
  std::function<std::vector<double>(std::span<const double>)> exact;
  std::function<std::vector<Jet>(std::span<const Jet>)> exact_jets;
  std::vector<PhysicsScalar> scalars;
  MseKind mse_kind = MseKind::Scalar;
  ProblemDefaults defaults;
  bool inverse_mode = false;
  ObservationSet observations;
  std::shared_ptr<const ReferenceTable> reference;

  bool has_exact() const { return static_cast<bool>(exact); }
  int n_fields() const { return static_cast<int>(fields.size()); }

  std::vector<ScalarParam> scalar_params() const {
    std::vector<ScalarParam> out;
    for (const auto& s : scalars)
      out.push_back({s.name, s.trainable ? s.initial_guess : s.true_value, s.trainable});
    return out;
  }

  // Residual values on plain per-dimension jets of the fields.
  std::vector<double> residual_plain(const std::vector<std::vector<Jet>>& jets,
                                     std::span<const double> pt,
                                     std::span<const double> scalar_values = {}) const {
    PlainResidualCtx ctx(jets, scalars, pt, scalar_values);
    return residual.plain(ctx);
  }
};

// Per-dimension jets of the exact solution at a point: jets[field][dim] is
// seeded along dim with the problem's required order.
inline std::vector<std::vector<Jet>> exact_solution_jets(const PdeProblem& p,
                                                         std::span<const double> pt) {
  if (!p.exact_jets) throw std::runtime_error(p.name + ": no analytic solution");
  const int dim = p.domain.dim();
  std::vector<std::vector<Jet>> jets(p.fields.size(), std::vector<Jet>(dim));
  for (int d = 0; d < dim; ++d) {
    std::vector<Jet> args;
    args.reserve(dim);
    const int order = p.jet_orders[d];
    for (int k = 0; k < dim; ++k)
      args.push_back(k == d ? Jet::seed(pt[k], order) : Jet::constant(pt[k], order));
    const std::vector<Jet> vals = p.exact_jets(args);
    for (std::size_t f = 0; f < vals.size(); ++f) jets[f][d] = vals[f];
  }
  return jets;
}

// Inverse variant: designated coefficients become trainable, IC/BC terms are
// dropped, and the data term runs over the supplied observations.
inline PdeProblem make_inverse_variant(const PdeProblem& base, ObservationSet obs) {
  bool any = false;
  for (const auto& s : base.scalars) any = any || s.invertible;
  if (!any) throw std::runtime_error(base.name + ": no physics scalar designated for inversion");
  if (obs.count <= 0) throw std::invalid_argument(base.name + ": inverse variant needs observations");
  PdeProblem p = base;
  for (auto& s : p.scalars) s.trainable = s.invertible;
  p.conditions.clear();
  p.inverse_mode = true;
  p.observations = std::move(obs);
  return p;
}

}  // namespace sfpinn
