#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfpinn/problems.hpp"
#include "sfpinn/rng.hpp"

using namespace sfpinn;

namespace {

// Jets of a manually specified field: per-dimension jets assembled from a
// generic closed form, used to exercise residual operators directly.
template <class F>
std::vector<std::vector<Jet>> field_jets(const F& f, std::span<const double> pt,
                                         std::span<const int> orders, int n_fields) {
  const int dim = static_cast<int>(pt.size());
  std::vector<std::vector<Jet>> jets(n_fields, std::vector<Jet>(dim));
  for (int d = 0; d < dim; ++d) {
    std::vector<Jet> args;
    for (int k = 0; k < dim; ++k)
      args.push_back(k == d ? Jet::seed(pt[k], orders[d]) : Jet::constant(pt[k], orders[d]));
    const auto vals = f(args);
    for (int fi = 0; fi < n_fields; ++fi) jets[fi][d] = vals[fi];
  }
  return jets;
}

// Two-point boundary value oracle for v u' = k u'' on [0, 1] with u(0)=0,
// u(1)=1: second-order central differences and a Thomas solve.
std::vector<double> convdiff_fd_oracle(int nodes, double v, double k) {
  const int n = nodes;
  const double h = 1.0 / (n - 1);
  std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    a[i] = k / (h * h) + v / (2 * h);
    b[i] = -2 * k / (h * h);
    c[i] = k / (h * h) - v / (2 * h);
    d[i] = 0.0;
  }
  d[0] = 0.0;
  d[n - 1] = 1.0;
  // Thomas algorithm
  for (int i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  std::vector<double> u(n);
  u[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = (d[i] - c[i] * u[i + 1]) / b[i];
  return u;
}

}  // namespace

TEST_CASE("convection-diffusion residual") {
  const PdeProblem p = make_convdiff();
  const double pt[1] = {0.4};

  auto constant = [](const std::vector<Jet>& args) {
    return std::vector{Jet::constant(3.7, args[0].order())};
  };
  auto jets = field_jets(constant, pt, p.jet_orders, 1);
  CHECK(p.residual_plain(jets, pt)[0] == 0.0);

  auto linear = [](const std::vector<Jet>& args) { return std::vector{args[0]}; };
  jets = field_jets(linear, pt, p.jet_orders, 1);
  CHECK(p.residual_plain(jets, pt)[0] == 50.0);
}

TEST_CASE("exact solutions zero their residuals at random interior points") {
  Rng rng(101);
  for (const char* name : {"convdiff", "wave1d", "taylor-green", "helmholtz2d"}) {
    const PdeProblem p = make_problem(name);
    const int dim = p.domain.dim();
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> pt(dim);
      for (int d = 0; d < dim; ++d) pt[d] = rng.uniform(p.domain.lo(d), p.domain.hi(d));
      const auto jets = exact_solution_jets(p, pt);
      const auto res = p.residual_plain(jets, pt);
      for (const double r : res) {
        INFO(name << " at rep " << rep);
        CHECK(std::abs(r) <= 1e-7);
      }
    }
  }
}

TEST_CASE("wave residual on simple fields") {
  const PdeProblem p = make_wave1d();
  const double pt[2] = {0.3, 0.8};

  auto linear_x = [](const std::vector<Jet>& a) { return std::vector{a[0]}; };
  auto jets = field_jets(linear_x, pt, p.jet_orders, 1);
  CHECK(p.residual_plain(jets, pt)[0] == 0.0);

  // u = t^2 with c = 1: residual u_tt - u_xx = 2
  auto tsq = [](const std::vector<Jet>& a) { return std::vector{a[1] * a[1]}; };
  jets = field_jets(tsq, pt, p.jet_orders, 1);
  const double c_override[1] = {1.0};
  CHECK(p.residual_plain(jets, pt, c_override)[0] == 2.0);
}

TEST_CASE("kdv residual example") {
  const PdeProblem p = make_kdv();
  const double pt[2] = {0.0, 0.5};
  auto sine = [](const std::vector<Jet>& a) { return std::vector{sin(a[0])}; };
  const auto jets = field_jets(sine, pt, p.jet_orders, 1);
  // u_t = 0, u u_x = 0, u_xxx = -cos(0) = -1 -> residual = -nu
  CHECK(std::abs(p.residual_plain(jets, pt)[0] - (-0.0005)) < 1e-18);
}

TEST_CASE("transient Navier-Stokes residuals on contrived fields") {
  const PdeProblem p = make_taylor_green();
  const double pt[3] = {1.2, 0.9, 0.5};

  auto constants = [](const std::vector<Jet>& a) {
    const int o = a[0].order();
    return std::vector{Jet::constant(0.3, o), Jet::constant(-1.1, o), Jet::constant(2.0, o)};
  };
  auto jets = field_jets(constants, pt, p.jet_orders, 3);
  for (const double r : p.residual_plain(jets, pt)) CHECK(r == 0.0);

  // u = y, v = x, p = 0 steady: continuity 0, x-momentum u u_x + v u_y = x
  auto swirl = [](const std::vector<Jet>& a) {
    return std::vector{a[1], a[0], Jet::constant(0.0, a[0].order())};
  };
  jets = field_jets(swirl, pt, p.jet_orders, 3);
  const auto res = p.residual_plain(jets, pt);
  CHECK(std::abs(res[0]) < 1e-15);
  CHECK(std::abs(res[1] - pt[0]) < 1e-15);
  CHECK(std::abs(res[2] - pt[1]) < 1e-15);
}

TEST_CASE("steady Navier-Stokes residuals include the rigid rotation identity") {
  const PdeProblem p = make_cavity();
  const double pt[2] = {0.3, 0.7};

  auto constants = [](const std::vector<Jet>& a) {
    const int o = a[0].order();
    return std::vector{Jet::constant(1.0, o), Jet::constant(2.0, o), Jet::constant(-0.5, o)};
  };
  auto jets = field_jets(constants, pt, p.jet_orders, 3);
  for (const double r : p.residual_plain(jets, pt)) CHECK(r == 0.0);

  auto swirl = [](const std::vector<Jet>& a) {
    return std::vector{a[1], a[0], Jet::constant(0.0, a[0].order())};
  };
  jets = field_jets(swirl, pt, p.jet_orders, 3);
  auto res = p.residual_plain(jets, pt);
  CHECK(std::abs(res[0]) < 1e-15);
  CHECK(std::abs(res[1] - pt[0]) < 1e-15);

  // u = -y, v = x, p = (x^2 + y^2)/2: momentum residuals vanish
  auto rotation = [](const std::vector<Jet>& a) {
    return std::vector{-a[1], a[0], 0.5 * (a[0] * a[0] + a[1] * a[1])};
  };
  jets = field_jets(rotation, pt, p.jet_orders, 3);
  res = p.residual_plain(jets, pt);
  CHECK(std::abs(res[1]) < 1e-15);
  CHECK(std::abs(res[2]) < 1e-15);
}

TEST_CASE("helmholtz residual constants and source sign") {
  const PdeProblem p = make_helmholtz2d();
  const double pt[2] = {0.5, 0.25};
  auto zero = [](const std::vector<Jet>& a) {
    return std::vector{Jet::constant(0.0, a[0].order())};
  };
  auto jets = field_jets(zero, pt, p.jet_orders, 1);
  const double r = p.residual_plain(jets, pt)[0];
  CHECK(r == -helmholtz_source(0.5, 0.25));
  // q(0.5, 0.25) = (1 - 37 pi^2) sin(pi/2) sin(3 pi / 2) = 37 pi^2 - 1
  CHECK(std::abs(r - (1.0 - 37.0 * kPi * kPi)) < 1e-12);

  // the source vanishes where sin(pi x) = 0
  const double pt2[2] = {0.0, 0.77};
  jets = field_jets(zero, pt2, p.jet_orders, 1);
  CHECK(p.residual_plain(jets, pt2)[0] == 0.0);
}

TEST_CASE("exact solution spot values") {
  const PdeProblem wave = make_wave1d();
  const double w0[2] = {0.5, 0.0};
  CHECK(std::abs(wave.exact(w0)[0] - 1.0) < 1e-15);

  const PdeProblem tg = make_taylor_green();
  const double t0[3] = {0.5, 0.5, 0.0};
  CHECK(std::abs(tg.exact(t0)[0]) < 1e-15);

  const PdeProblem cd = make_convdiff();
  const double c0[1] = {0.9};
  CHECK(std::abs(cd.exact(c0)[0] - 6.7379e-3) < 1e-7);
}

TEST_CASE("closed-form convection-diffusion profile matches a fine BVP solve") {
  const PdeProblem p = make_convdiff();
  const int nodes = 100001;
  const auto u = convdiff_fd_oracle(nodes, 50.0, 1.0);
  const double h = 1.0 / (nodes - 1);
  for (const int i : {10000, 50000, 85000, 90000, 99000}) {
    const double x = i * h;
    const double closed = p.exact(std::span<const double>(&x, 1))[0];
    INFO("x = " << x << " fd " << u[i] << " closed " << closed);
    CHECK(std::abs(u[i] - closed) <= 1e-7);
  }
}

TEST_CASE("boundary and initial condition targets") {
  const PdeProblem wave = make_wave1d();
  REQUIRE(wave.conditions.size() == 3);
  const auto& ic = wave.conditions[0];
  CHECK(ic.is_ic);
  REQUIRE(ic.terms.size() == 2);
  const double p1[2] = {0.5, 0.0};
  CHECK(std::abs(ic.terms[0].target(p1) - 1.0) < 1e-15);  // sin(pi/2) + 0.5 sin(2pi)
  CHECK(ic.terms[1].target(p1) == 0.0);
  CHECK(ic.terms[1].kind == CondKind::InitialTimeDerivative);
  CHECK(ic.terms[1].order == 1);

  const PdeProblem cavity = make_cavity();
  const auto& lid = cavity.conditions[0];
  CHECK(lid.exclude_corners);
  const double lid_pt[2] = {0.4, 1.0};
  CHECK(lid.terms[0].target(lid_pt) == 1.0);
  CHECK(lid.terms[1].target(lid_pt) == 0.0);

  const PdeProblem tg = make_taylor_green();
  // every face carries Dirichlet u, v and a Neumann condition on p
  int neumann = 0;
  for (const auto& cs : tg.conditions)
    for (const auto& t : cs.terms)
      if (t.kind == CondKind::Neumann) {
        ++neumann;
        // the exact pressure gradient vanishes on these faces
        const double face_pt[3] = {cs.dim == 0 ? (cs.side ? 4.5 : 0.5) : 1.3,
                                   cs.dim == 1 ? (cs.side ? 4.5 : 0.5) : 1.3, 0.7};
        CHECK(std::abs(t.target(face_pt)) < 1e-12);
      }
  CHECK(neumann == 4);

  const PdeProblem kdv = make_kdv();
  const auto& periodic = kdv.conditions[1];
  CHECK(periodic.loc == ConditionSet::Location::Periodic);
  REQUIRE(periodic.terms.size() == 2);
  CHECK(periodic.terms[0].order == 0);
  CHECK(periodic.terms[1].order == 1);
}

TEST_CASE("inverse variants flip designated scalars and drop conditions") {
  const PdeProblem wave = make_wave1d();
  ObservationSet obs;
  obs.count = 2;
  obs.points = {0.1, 0.2, 0.3, 0.4};
  obs.values = {1.0, 2.0};
  const PdeProblem inv = make_inverse_variant(wave, obs);
  CHECK(inv.inverse_mode);
  CHECK(inv.conditions.empty());
  CHECK(inv.scalars[0].trainable);
  CHECK(inv.observations.count == 2);

  CHECK_THROWS_AS(make_inverse_variant(wave, ObservationSet{}), std::invalid_argument);
  CHECK_THROWS_AS(make_inverse_variant(make_convdiff(), obs), std::runtime_error);
}
