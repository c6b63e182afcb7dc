#pragma once

// The benchmark catalogue: 1D convection-diffusion, lid-driven cavity,
// 1D transient wave, Taylor-Green vortex, 1D transient KdV, 2D Helmholtz.
// Residuals and closed-form solutions are written once as generic lambdas and
// instantiated for plain-jet and taped evaluation.

#include <cmath>
#include <string_view>
#include <vector>

#include "sfpinn/pde.hpp"

namespace sfpinn {

inline constexpr double kPi = 3.14159265358979323846264338328;

template <class F>
void set_exact(PdeProblem& p, F f) {
  p.exact = [f](std::span<const double> x) { return f(x); };
  p.exact_jets = [f](std::span<const Jet> x) { return f(x); };
}

inline std::function<double(std::span<const double>)> exact_target(const PdeProblem& p, int field) {
  auto fn = p.exact;
  return [fn, field](std::span<const double> pt) { return fn(pt)[field]; };
}

// Target for a Neumann-type term: d(exact field)/d(dim) at the point.
inline std::function<double(std::span<const double>)> exact_deriv_target(const PdeProblem& p,
                                                                         int field, int dim) {
  auto fn = p.exact_jets;
  return [fn, field, dim](std::span<const double> pt) {
    std::vector<Jet> args;
    args.reserve(pt.size());
    for (int k = 0; k < static_cast<int>(pt.size()); ++k)
      args.push_back(k == dim ? Jet::seed(pt[k], 1) : Jet::constant(pt[k], 1));
    return fn(args)[field].deriv(1);
  };
}

// ---- 1D steady convection-diffusion: v u_x = k u_xx, v=50, k=1 -------------

inline PdeProblem make_convdiff() {
  PdeProblem p;
  p.name = "convdiff";
  p.domain = {{{0.0, 1.0}}, {"x"}, false};
  p.fields = {"u"};
  p.jet_orders = {2};
  p.n_equations = 1;
  p.scalars = {{"v", 50.0, 1.0, false, false}, {"k", 1.0, 1.0, false, false}};
  p.residual = make_residual([](auto& c) {
    auto v = c.coeff("v");
    auto k = c.coeff("k");
    return std::vector{v * c.d(0, 0, 1) - k * c.d(0, 0, 2)};
  });
  set_exact(p, [](auto x) {
    using std::exp;
    const double r = 50.0;
    const double den = std::exp(r) - 1.0;
    return std::vector{(exp(r * x[0]) - 1.0) * (1.0 / den)};
  });

  ConditionSet left;
  left.loc = ConditionSet::Location::Face;
  left.dim = 0;
  left.side = 0;
  left.terms = {{CondKind::Dirichlet, 0, 0, 0, [](std::span<const double>) { return 0.0; }}};
  ConditionSet right = left;
  right.side = 1;
  right.terms = {{CondKind::Dirichlet, 0, 0, 0, [](std::span<const double>) { return 1.0; }}};
  p.conditions = {left, right};

  p.mse_kind = MseKind::Scalar;
  p.defaults = {"(x)-32-10-10-10-(u)", 0.5, 500.0, 5e-3, 50000, 20000, 499, 0, 1, 50, {5000}};
  return p;
}

// ---- 1D transient wave: u_tt = c^2 u_xx, c=2 --------------------------------

inline PdeProblem make_wave1d() {
  PdeProblem p;
  p.name = "wave1d";
  p.domain = {{{0.0, 2.0}, {0.0, 1.0}}, {"x", "t"}, true};
  p.fields = {"u"};
  p.jet_orders = {2, 2};
  p.n_equations = 1;
  p.scalars = {{"c", 2.0, 1.0, true, false}};
  p.residual = make_residual([](auto& c) {
    auto cc = c.coeff("c");
    return std::vector{c.d(0, 1, 2) - cc * cc * c.d(0, 0, 2)};
  });
  set_exact(p, [](auto x) {
    using std::sin;
    using std::cos;
    const double c = 2.0;
    return std::vector{sin(kPi * x[0]) * cos(c * kPi * x[1]) +
                       0.5 * (sin(4.0 * kPi * x[0]) * cos(4.0 * c * kPi * x[1]))};
  });

  ConditionSet ic;
  ic.loc = ConditionSet::Location::TimeZero;
  ic.is_ic = true;
  ic.terms = {{CondKind::InitialValue, 0, 0, 0,
               [](std::span<const double> pt) {
                 return std::sin(kPi * pt[0]) + 0.5 * std::sin(4.0 * kPi * pt[0]);
               }},
              {CondKind::InitialTimeDerivative, 0, 1, 1,
               [](std::span<const double>) { return 0.0; }}};
  ConditionSet left;
  left.loc = ConditionSet::Location::Face;
  left.dim = 0;
  left.side = 0;
  left.terms = {{CondKind::Dirichlet, 0, 0, 0, [](std::span<const double>) { return 0.0; }}};
  ConditionSet right = left;
  right.side = 1;
  p.conditions = {ic, left, right};

  p.mse_kind = MseKind::Scalar;
  p.defaults = {"(x,t)-64-50-50-50-(u)", 2.5, 180.0, 5e-3, 200000, 50000, 450, 40, 10, 50,
                {256, 256}};
  return p;
}

// ---- 2D transient Navier-Stokes, Taylor-Green vortex, Re=100 ---------------

inline PdeProblem make_taylor_green() {
  PdeProblem p;
  p.name = "taylor-green";
  p.domain = {{{0.5, 4.5}, {0.5, 4.5}, {0.0, 10.0}}, {"x", "y", "t"}, true};
  p.fields = {"u", "v", "p"};
  p.jet_orders = {2, 2, 1};
  p.n_equations = 3;
  p.scalars = {{"nu", 0.01, 0.05, true, false}};  // nu = 1/Re
  p.residual = make_residual([](auto& c) {
    auto nu = c.coeff("nu");
    auto u = c.d(0, 0, 0);
    auto v = c.d(1, 0, 0);
    auto cont = c.d(0, 0, 1) + c.d(1, 1, 1);
    auto mom_x = c.d(0, 2, 1) + u * c.d(0, 0, 1) + v * c.d(0, 1, 1) + c.d(2, 0, 1) -
                 nu * (c.d(0, 0, 2) + c.d(0, 1, 2));
    auto mom_y = c.d(1, 2, 1) + u * c.d(1, 0, 1) + v * c.d(1, 1, 1) + c.d(2, 1, 1) -
                 nu * (c.d(1, 0, 2) + c.d(1, 1, 2));
    return std::vector{cont, mom_x, mom_y};
  });
  set_exact(p, [](auto x) {
    using std::sin;
    using std::cos;
    using std::exp;
    const double nu = 0.01;
    auto decay = exp((-2.0 * kPi * kPi * nu) * x[2]);
    auto decay2 = decay * decay;
    auto u = -(cos(kPi * x[0]) * sin(kPi * x[1]) * decay);
    auto v = sin(kPi * x[0]) * (cos(kPi * x[1]) * decay);
    auto pr = -0.25 * ((cos(2.0 * kPi * x[0]) + cos(2.0 * kPi * x[1])) * decay2);
    return std::vector{u, v, pr};
  });

  ConditionSet ic;
  ic.loc = ConditionSet::Location::TimeZero;
  ic.is_ic = true;
  for (int f = 0; f < 3; ++f) ic.terms.push_back({CondKind::InitialValue, f, 0, 0, exact_target(p, f)});
  p.conditions.push_back(ic);
  for (int d = 0; d < 2; ++d) {
    for (int side = 0; side < 2; ++side) {
      ConditionSet face;
      face.loc = ConditionSet::Location::Face;
      face.dim = d;
      face.side = side;
      face.terms = {{CondKind::Dirichlet, 0, 0, 0, exact_target(p, 0)},
                    {CondKind::Dirichlet, 1, 0, 0, exact_target(p, 1)},
                    {CondKind::Neumann, 2, d, 1, exact_deriv_target(p, 2, d)}};
      p.conditions.push_back(face);
    }
  }

  p.mse_kind = MseKind::VelocityMagnitude;
  p.defaults = {"(x,y,t)-64-50-50-50-[50-50-50-(u),50-50-50-(v),50-50-50-(p)]",
                0.68, 1.0, 5e-3, 100000, 20000, 450, 40, 10, 50, {101, 101, 51}};
  return p;
}

// ---- 1D transient KdV: u_t + u u_x + nu u_xxx = 0, nu=0.0005 ----------------

inline PdeProblem make_kdv() {
  PdeProblem p;
  p.name = "kdv";
  p.domain = {{{-1.0, 1.0}, {0.0, 1.25}}, {"x", "t"}, true};
  p.fields = {"u"};
  p.jet_orders = {3, 1};
  p.n_equations = 1;
  p.scalars = {{"nu", 0.0005, 0.001, false, false}};
  p.residual = make_residual([](auto& c) {
    auto nu = c.coeff("nu");
    auto u = c.d(0, 0, 0);
    return std::vector{c.d(0, 1, 1) + u * c.d(0, 0, 1) + nu * c.d(0, 0, 3)};
  });

  ConditionSet ic;
  ic.loc = ConditionSet::Location::TimeZero;
  ic.is_ic = true;
  ic.terms = {{CondKind::InitialValue, 0, 0, 0,
               [](std::span<const double> pt) { return std::cos(kPi * pt[0]); }}};
  ConditionSet periodic;
  periodic.loc = ConditionSet::Location::Periodic;
  periodic.dim = 0;
  periodic.terms = {{CondKind::PeriodicPair, 0, 0, 0, nullptr},
                    {CondKind::PeriodicPair, 0, 0, 1, nullptr}};
  p.conditions = {ic, periodic};

  p.mse_kind = MseKind::Reference;
  p.defaults = {"(x,t)-64-50-50-50-(u)", 1.0, 180.0, 5e-3, 100000, 20000, 480, 10, 10, 50,
                {257, 251}};
  return p;
}

// ---- 2D Helmholtz: u_xx + u_yy + u = q ---------------------------------------

inline double helmholtz_source(double x, double y) {
  return (1.0 - kPi * kPi - 36.0 * kPi * kPi) * std::sin(kPi * x) * std::sin(6.0 * kPi * y);
}

inline PdeProblem make_helmholtz2d() {
  PdeProblem p;
  p.name = "helmholtz2d";
  p.domain = {{{-1.0, 1.0}, {-1.0, 1.0}}, {"x", "y"}, false};
  p.fields = {"u"};
  p.jet_orders = {2, 2};
  p.n_equations = 1;
  p.residual = make_residual([](auto& c) {
    return std::vector{c.d(0, 0, 2) + c.d(0, 1, 2) + c.d(0, 0, 0) -
                       helmholtz_source(c.point(0), c.point(1))};
  });
  set_exact(p, [](auto x) {
    using std::sin;
    return std::vector{sin(kPi * x[0]) * sin(6.0 * kPi * x[1])};
  });

  for (int d = 0; d < 2; ++d) {
    for (int side = 0; side < 2; ++side) {
      ConditionSet face;
      face.loc = ConditionSet::Location::Face;
      face.dim = d;
      face.side = side;
      face.terms = {{CondKind::Dirichlet, 0, 0, 0, exact_target(p, 0)}};
      p.conditions.push_back(face);
    }
  }

  p.mse_kind = MseKind::Scalar;
  p.defaults = {"(x,y)-64-20-20-20-(u)", 2.5, 1000.0, 5e-3, 100000, 50000, 450, 0, 50, 50,
                {256, 256}};
  return p;
}

// ---- 2D steady Navier-Stokes, lid-driven cavity, Re=400 ---------------------

inline PdeProblem make_cavity() {
  PdeProblem p;
  p.name = "cavity";
  p.domain = {{{0.0, 1.0}, {0.0, 1.0}}, {"x", "y"}, false};
  p.fields = {"u", "v", "p"};
  p.jet_orders = {2, 2};
  p.n_equations = 3;
  p.scalars = {{"nu", 1.0 / 400.0, 0.01, false, false}};
  p.residual = make_residual([](auto& c) {
    auto nu = c.coeff("nu");
    auto u = c.d(0, 0, 0);
    auto v = c.d(1, 0, 0);
    auto cont = c.d(0, 0, 1) + c.d(1, 1, 1);
    auto mom_x = u * c.d(0, 0, 1) + v * c.d(0, 1, 1) + c.d(2, 0, 1) -
                 nu * (c.d(0, 0, 2) + c.d(0, 1, 2));
    auto mom_y = u * c.d(1, 0, 1) + v * c.d(1, 1, 1) + c.d(2, 1, 1) -
                 nu * (c.d(1, 0, 2) + c.d(1, 1, 2));
    return std::vector{cont, mom_x, mom_y};
  });

  auto zero = [](std::span<const double>) { return 0.0; };
  ConditionSet lid;
  lid.loc = ConditionSet::Location::Face;
  lid.dim = 1;
  lid.side = 1;
  lid.exclude_corners = true;  // open top face, corners stay with the walls
  lid.terms = {{CondKind::Dirichlet, 0, 0, 0, [](std::span<const double>) { return 1.0; }},
               {CondKind::Dirichlet, 1, 0, 0, zero}};
  p.conditions.push_back(lid);
  const int walls[3][2] = {{1, 0}, {0, 0}, {0, 1}};  // bottom, left, right
  for (const auto& w : walls) {
    ConditionSet face;
    face.loc = ConditionSet::Location::Face;
    face.dim = w[0];
    face.side = w[1];
    face.terms = {{CondKind::Dirichlet, 0, 0, 0, zero}, {CondKind::Dirichlet, 1, 0, 0, zero}};
    p.conditions.push_back(face);
  }

  p.mse_kind = MseKind::None;
  p.defaults = {"(x,y)-64-20-20-20-[20-20-20-(u),20-20-20-(v),20-20-20-(p)]",
                1.0, 1.0, 1e-3, 200000, 20000, 475, 0, 25, 50, {52, 52}};
  return p;
}

// ---- registry ----------------------------------------------------------------

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"convdiff",     "cavity", "wave1d",
                                                 "taylor-green", "kdv",    "helmholtz2d"};
  return names;
}

inline PdeProblem make_problem(std::string_view name) {
  if (name == "convdiff") return make_convdiff();
  if (name == "cavity") return make_cavity();
  if (name == "wave1d") return make_wave1d();
  if (name == "taylor-green") return make_taylor_green();
  if (name == "kdv") return make_kdv();
  if (name == "helmholtz2d") return make_helmholtz2d();
  throw std::invalid_argument("unknown problem: " + std::string(name));
}

}  // namespace sfpinn
