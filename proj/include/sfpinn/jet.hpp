#pragma once

// Truncated univariate Taylor expansions ("jets") up to third order.
//
// A Jet carries the Taylor coefficients a_j = (d^j u / d s^j) / j! of some
// quantity u along a single seeded scalar direction s. Arithmetic and smooth
// activations propagate the coefficients exactly, so deriv(j) of any composed
// expression equals the exact j-th derivative of that expression.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sfpinn {

inline constexpr int kMaxJetOrder = 3;
inline constexpr double kFactorial[kMaxJetOrder + 1] = {1.0, 1.0, 2.0, 6.0};

enum class Act : std::uint8_t { Tanh, Sin, Cos, Sigmoid, Exp };

inline const char* act_name(Act f) {
  switch (f) {
    case Act::Tanh: return "tanh";
    case Act::Sin: return "sin";
    case Act::Cos: return "cos";
    case Act::Sigmoid: return "sigmoid";
    case Act::Exp: return "exp";
  }
  return "?";
}

inline double act_value(Act f, double x) {
  switch (f) {
    case Act::Tanh: return std::tanh(x);
    case Act::Sin: return std::sin(x);
    case Act::Cos: return std::cos(x);
    case Act::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Act::Exp: return std::exp(x);
  }
  return 0.0;
}

// d[0] = f(x), d[j] = f^(j)(x) for j = 1..n. Requires n <= 4.
inline void act_derivs(Act f, double x, double* d, int n) {
  switch (f) {
    case Act::Tanh: {
      const double t = std::tanh(x);
      const double s = 1.0 - t * t;  // sech^2
      d[0] = t;
      if (n >= 1) d[1] = s;
      if (n >= 2) d[2] = -2.0 * t * s;
      if (n >= 3) d[3] = s * (6.0 * t * t - 2.0);
      if (n >= 4) d[4] = t * s * (12.0 * s - 12.0 * t * t + 4.0);
      break;
    }
    case Act::Sin: {
      const double sn = std::sin(x), cs = std::cos(x);
      const double cyc[4] = {sn, cs, -sn, -cs};
      for (int j = 0; j <= n; ++j) d[j] = cyc[j % 4];
      break;
    }
    case Act::Cos: {
      const double sn = std::sin(x), cs = std::cos(x);
      const double cyc[4] = {cs, -sn, -cs, sn};
      for (int j = 0; j <= n; ++j) d[j] = cyc[j % 4];
      break;
    }
    case Act::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      const double s1 = s * (1.0 - s);
      d[0] = s;
      if (n >= 1) d[1] = s1;
      if (n >= 2) d[2] = s1 * (1.0 - 2.0 * s);
      if (n >= 3) d[3] = s1 * (1.0 - 6.0 * s + 6.0 * s * s);
      if (n >= 4) d[4] = s1 * (1.0 - 2.0 * s) * (1.0 - 12.0 * s + 12.0 * s * s);
      break;
    }
    case Act::Exp: {
      const double e = std::exp(x);
      for (int j = 0; j <= n; ++j) d[j] = e;
      break;
    }
  }
}

class Jet {
 public:
  Jet() = default;

  explicit Jet(int order) : order_(check_order(order)) {}

  // Identity function of the seeded variable: coeffs [x, 1, 0, ...].
  static Jet seed(double x, int order) {
    Jet j(order);
    j.c_[0] = x;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  // Constant along the seeded direction: coeffs [x, 0, 0, ...].
  static Jet constant(double x, int order) {
    Jet j(order);
    j.c_[0] = x;
    return j;
  }

  int order() const { return order_; }
  double value() const { return c_[0]; }

  double coeff(int j) const { return c_[j]; }
  double& coeff(int j) { return c_[j]; }

  // Raw derivative d^j u / d s^j = a_j * j!
  double deriv(int j) const {
    if (j < 0 || j > order_) throw std::invalid_argument("Jet::deriv: order out of range");
    return c_[j] * kFactorial[j];
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    const int n = match(a, b);
    Jet r(n);
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    const int n = match(a, b);
    Jet r(n);
    for (int k = 0; k <= n; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }

  // Truncated Cauchy product of the coefficient series.
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = match(a, b);
    Jet r(n);
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator-(const Jet& a) {
    Jet r(a.order_);
    for (int k = 0; k <= a.order_; ++k) r.c_[k] = -a.c_[k];
    return r;
  }

  friend Jet operator*(double s, const Jet& a) {
    Jet r(a.order_);
    for (int k = 0; k <= a.order_; ++k) r.c_[k] = s * a.c_[k];
    return r;
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }

  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return s + (-a); }

  friend bool operator==(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_) return false;
    for (int k = 0; k <= a.order_; ++k)
      if (a.c_[k] != b.c_[k]) return false;
    return true;
  }

 private:
  static int check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("Jet: order must be in [0, 3]");
    return order;
  }
  static int match(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_) throw std::invalid_argument("Jet: order mismatch");
    return a.order_;
  }

  int order_ = 0;
  std::array<double, kMaxJetOrder + 1> c_{};
};

// Composition c = f(a) by the order-3 Faa di Bruno formulas expressed on
// Taylor coefficients. fd[0..order] must hold f and its raw derivatives at
// a.value().
inline Jet compose(const Jet& a, const double* fd) {
  const int n = a.order();
  Jet r(n);
  r.coeff(0) = fd[0];
  if (n >= 1) r.coeff(1) = fd[1] * a.coeff(1);
  if (n >= 2) r.coeff(2) = 0.5 * fd[2] * a.coeff(1) * a.coeff(1) + fd[1] * a.coeff(2);
  if (n >= 3)
    r.coeff(3) = fd[3] * a.coeff(1) * a.coeff(1) * a.coeff(1) / 6.0 +
                 fd[2] * a.coeff(1) * a.coeff(2) + fd[1] * a.coeff(3);
  return r;
}

inline Jet apply(Act f, const Jet& a) {
  double fd[kMaxJetOrder + 1];
  act_derivs(f, a.value(), fd, a.order());
  return compose(a, fd);
}

inline Jet sin(const Jet& a) { return apply(Act::Sin, a); }
inline Jet cos(const Jet& a) { return apply(Act::Cos, a); }
inline Jet tanh(const Jet& a) { return apply(Act::Tanh, a); }
inline Jet exp(const Jet& a) { return apply(Act::Exp, a); }
inline Jet sigmoid(const Jet& a) { return apply(Act::Sigmoid, a); }

enum class JetArithOp { Add, Sub, Mul };

inline Jet jet_arith(const Jet& a, const Jet& b, JetArithOp op) {
  switch (op) {
    case JetArithOp::Add: return a + b;
    case JetArithOp::Sub: return a - b;
    case JetArithOp::Mul: return a * b;
  }
  throw std::invalid_argument("jet_arith: bad op");
}

}  // namespace sfpinn
