#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfpinn/jet.hpp"
#include "sfpinn/rng.hpp"

using namespace sfpinn;

namespace {

bool close_rel(double a, double b, double rtol, double atol = 1e-9) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

// picks one of the smooth activations from a parameter in [0, 1)
Jet apply_or(double sel, const Jet& a) {
  const Act acts[5] = {Act::Tanh, Act::Sin, Act::Cos, Act::Sigmoid, Act::Exp};
  return apply(acts[static_cast<int>(sel * 4.999)], a);
}
double apply_or(double sel, double a) {
  const Act acts[5] = {Act::Tanh, Act::Sin, Act::Cos, Act::Sigmoid, Act::Exp};
  return act_value(acts[static_cast<int>(sel * 4.999)], a);
}

// A randomized smooth scalar computation built from the jet operation set:
// two "layers" of activations with products mixed in.
template <class S>
S random_expr(const std::vector<double>& p, S x) {
  S h1 = apply_or(p[0], x * p[1] + p[2]);
  S h2 = apply_or(p[3], x * p[4] + p[5]);
  S h3 = h1 * h2;
  S h4 = apply_or(p[6], h1 * p[7] + h3 * p[8]);
  return h4 * p[9] + h3 * p[10] + x * p[11];
}

double fd_deriv(const std::vector<double>& p, double x, int order) {
  const double h = 1e-3;
  auto f = [&](double v) { return random_expr<double>(p, v); };
  switch (order) {
    case 1:
      return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    case 2:
      return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
             (12 * h * h);
    case 3:
      return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h * h * h);
  }
  return 0.0;
}

}  // namespace

TEST_CASE("jet_seed lays down the identity function") {
  const Jet a = Jet::seed(2.0, 3);
  CHECK(a.coeff(0) == 2.0);
  CHECK(a.coeff(1) == 1.0);
  CHECK(a.coeff(2) == 0.0);
  CHECK(a.coeff(3) == 0.0);

  const Jet b = Jet::seed(0.0, 1);
  CHECK(b.order() == 1);
  CHECK(b.coeff(0) == 0.0);
  CHECK(b.coeff(1) == 1.0);

  const Jet c = Jet::seed(-1.0, 2);
  CHECK(c.coeff(0) == -1.0);
  CHECK(c.coeff(1) == 1.0);
  CHECK(c.coeff(2) == 0.0);

  CHECK_THROWS_AS(Jet::seed(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Jet::seed(0.0, -1), std::invalid_argument);
}

TEST_CASE("jet arithmetic identities") {
  const Jet x = Jet::seed(3.0, 2);
  const Jet sq = jet_arith(x, x, JetArithOp::Mul);
  CHECK(sq.coeff(0) == 9.0);
  CHECK(sq.coeff(1) == 6.0);
  CHECK(sq.coeff(2) == 1.0);
  CHECK(sq.deriv(1) == 6.0);
  CHECK(sq.deriv(2) == 2.0);

  const Jet zero = Jet::constant(0.0, 2);
  CHECK(jet_arith(x, zero, JetArithOp::Add) == x);

  const Jet one = Jet::constant(1.0, 2);
  CHECK(jet_arith(x, one, JetArithOp::Mul) == x);

  CHECK_THROWS_AS(x + Jet::seed(0.0, 1), std::invalid_argument);
}

TEST_CASE("activation jets reproduce symbolic derivatives at zero") {
  const Jet x = Jet::seed(0.0, 3);

  const Jet t = tanh(x);
  CHECK(t.deriv(0) == 0.0);
  CHECK(t.deriv(1) == 1.0);
  CHECK(t.deriv(2) == 0.0);
  CHECK(t.deriv(3) == -2.0);

  const Jet s = sin(x);
  CHECK(s.deriv(0) == 0.0);
  CHECK(s.deriv(1) == 1.0);
  CHECK(s.deriv(2) == 0.0);
  CHECK(s.deriv(3) == -1.0);

  const Jet g = sigmoid(x);
  CHECK(g.deriv(0) == 0.5);
  CHECK(g.deriv(1) == 0.25);
  CHECK(std::abs(g.deriv(2)) < 1e-16);
  CHECK(close_rel(g.deriv(3), -0.125, 1e-15));
}

TEST_CASE("activation derivative chains match finite differences") {
  // validates act_derivs up to the fourth derivative, which the tape's
  // backward sweep relies on for order-3 jets
  Rng rng(7);
  for (const Act f : {Act::Tanh, Act::Sin, Act::Cos, Act::Sigmoid, Act::Exp}) {
    for (int rep = 0; rep < 20; ++rep) {
      const double x = rng.uniform(-2.0, 2.0);
      double d[5];
      act_derivs(f, x, d, 4);
      const double h = 1e-3;
      for (int j = 1; j <= 4; ++j) {
        double lo[5], hi[5];
        act_derivs(f, x - h, lo, 3);
        act_derivs(f, x + h, hi, 3);
        const double fd = (hi[j - 1] - lo[j - 1]) / (2 * h);
        CHECK(close_rel(d[j], fd, 1e-5, 1e-7));
      }
    }
  }
}

TEST_CASE("composed computations match finite differences to order 3") {
  Rng rng(42);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> p(12);
    for (auto& v : p) v = rng.uniform(0.0, 1.0);
    for (std::size_t i = 1; i < p.size(); ++i) p[i] = rng.uniform(-1.5, 1.5);
    p[0] = rng.uniform(0.0, 1.0);
    p[3] = rng.uniform(0.0, 1.0);
    p[6] = rng.uniform(0.0, 1.0);
    const double x = rng.uniform(-1.0, 1.0);

    const Jet jx = Jet::seed(x, 3);
    const Jet out = random_expr<Jet>(p, jx);
    for (int order = 1; order <= 3; ++order) {
      const double fd = fd_deriv(p, x, order);
      const double rtol = order == 3 ? 1e-4 : 1e-6;
      INFO("rep " << rep << " order " << order << " jet " << out.deriv(order) << " fd " << fd);
      CHECK(close_rel(out.deriv(order), fd, rtol, order == 3 ? 1e-5 : 1e-7));
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("order-0 restriction of every operation reproduces plain arithmetic bit-exactly") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = rng.uniform(-3.0, 3.0);
    const double b = rng.uniform(-3.0, 3.0);
    for (int order = 0; order <= 3; ++order) {
      const Jet ja = Jet::seed(a, order);
      const Jet jb = Jet::constant(b, order);
      CHECK((ja + jb).value() == a + b);
      CHECK((ja - jb).value() == a - b);
      CHECK((ja * jb).value() == a * b);
      CHECK((ja * 1.7).value() == a * 1.7);
      for (const Act f : {Act::Tanh, Act::Sin, Act::Cos, Act::Sigmoid, Act::Exp})
        CHECK(apply(f, ja).value() == act_value(f, a));
    }
  }
}

TEST_CASE("independently seeded evaluations agree bit-exactly") {
  Rng rng(11);
  std::vector<double> p(12);
  for (auto& v : p) v = rng.uniform(-1.0, 1.0);
  p[0] = p[3] = p[6] = 0.4;
  const double x = 0.7;
  const Jet a = random_expr<Jet>(p, Jet::seed(x, 1));
  const Jet b = random_expr<Jet>(p, Jet::seed(x, 3));
  CHECK(a.deriv(1) == b.deriv(1));
  CHECK(a.value() == b.value());
}
