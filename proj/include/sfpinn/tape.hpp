#pragma once

// Recorded computation graph whose primal values are truncated Taylor jets.
//
// Every node stores, per slot, a value plane plus independent derivative
// planes for each seeded input dimension (no cross-derivatives; the PDE suite
// never needs them). A reverse sweep over the record yields the exact
// gradient of any recorded scalar with respect to the bound parameter vector.
//
// Nodes are recorded at the granularity the network works at: whole affine
// layers and elementwise activation maps, plus scalar ops for residual
// assembly. One Tape is owned by one thread and reused across points by
// calling begin().

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfpinn/jet.hpp"

namespace sfpinn {

// Plane layout of a jet value: plane 0 is the value, direction d occupies
// planes [dirs[d].first, dirs[d].first + dirs[d].order).
struct JetShape {
  struct Dir {
    int dim;    // seeded input dimension
    int order;  // derivative order carried for this dimension, 1..3
    int first;  // absolute index of the first-derivative plane
  };
  std::vector<Dir> dirs;
  int ncoef = 1;

  static JetShape value_only() { return {}; }

  static JetShape single(int dim, int order) {
    JetShape s;
    if (order > 0) s.add(dim, order);
    return s;
  }

  // orders[d] = derivative order wanted for input dimension d (0 = none).
  static JetShape from_orders(std::span<const int> orders) {
    JetShape s;
    for (int d = 0; d < static_cast<int>(orders.size()); ++d)
      if (orders[d] > 0) s.add(d, orders[d]);
    return s;
  }

  void add(int dim, int order) {
    if (order < 1 || order > kMaxJetOrder)
      throw std::invalid_argument("JetShape: order must be in [1, 3]");
    dirs.push_back({dim, order, ncoef});
    ncoef += order;
  }

  const Dir* find(int dim) const {
    for (const auto& d : dirs)
      if (d.dim == dim) return &d;
    return nullptr;
  }

  int max_order() const {
    int m = 0;
    for (const auto& d : dirs) m = d.order > m ? d.order : m;
    return m;
  }
};

namespace detail {

// Fixed-order blocked dot product: eight independent accumulators so the loop
// vectorizes, summed in a fixed tree. Both the taped and the plain forward
// pass call this, which keeps them bit-identical.
inline double dot_blocked(const double* a, const double* b, int n) {
  double acc[8] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  int i = 0;
  for (; i + 8 <= n; i += 8)
    for (int k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return (((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))) +
         tail;
}

inline void affine_apply(const double* w, const double* bias, const double* in, double* out,
                         int n_in, int n_out) {
  for (int i = 0; i < n_out; ++i) {
    const double s = dot_blocked(w + static_cast<std::size_t>(i) * n_in, in, n_in);
    out[i] = bias != nullptr ? bias[i] + s : s;
  }
}

}  // namespace detail

struct LayerView {
  std::size_t w_off = 0;  // weights, row-major [n_out][n_in]
  std::size_t b_off = 0;  // biases, n_out
  int n_in = 0;
  int n_out = 0;
};

struct TapeVar {
  std::uint32_t node = UINT32_MAX;
  bool valid() const { return node != UINT32_MAX; }
};

class Tape {
 public:
  struct Seed {
    TapeVar var;
    double weight;
  };

  Tape() = default;

  void bind(std::span<const double> params) { params_ = params; }

  // Resets the record while keeping allocated capacity.
  void begin(const JetShape& shape) {
    shape_ = shape;
    nodes_.clear();
    layers_.clear();
    vals_used_ = 0;
    dvals_used_ = 0;
  }

  const JetShape& shape() const { return shape_; }
  std::size_t node_count() const { return nodes_.size(); }

  // ---- leaves ----------------------------------------------------------

  // Input vector: value plane from x, each direction seeded on its own dim.
  std::uint32_t input(std::span<const double> x) {
    const auto n = static_cast<std::uint32_t>(x.size());
    const std::uint32_t id = push(Op::Input, shape_.ncoef, n);
    double* v = val(id);
    std::fill(v, v + static_cast<std::size_t>(shape_.ncoef) * n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = x[i];
    for (const auto& dir : shape_.dirs) {
      if (dir.dim < static_cast<int>(n)) v[static_cast<std::size_t>(dir.first) * n + dir.dim] = 1.0;
    }
    return id;
  }

  TapeVar constant(double value) {
    const std::uint32_t id = push(Op::Constant, 1, 1);
    val(id)[0] = value;
    return {id};
  }

  // Scalar leaf bound to params[index]; backward accumulates into grad[index].
  TapeVar param(std::size_t index) {
    const std::uint32_t id = push(Op::Param, 1, 1);
    nodes_[id].aux = static_cast<std::uint32_t>(index);
    val(id)[0] = params_[index];
    return {id};
  }

  // ---- vector ops ------------------------------------------------------

  std::uint32_t affine(std::uint32_t a, const LayerView& layer) {
    const std::uint32_t a_ncoef = nodes_[a].ncoef;
    if (static_cast<int>(nodes_[a].count) != layer.n_in)
      throw std::invalid_argument("Tape::affine: input width mismatch");
    const std::uint32_t id = push(Op::Affine, a_ncoef, static_cast<std::uint32_t>(layer.n_out));
    nodes_[id].a = a;
    nodes_[id].aux = static_cast<std::uint32_t>(layers_.size());
    layers_.push_back(layer);
    const double* w = params_.data() + layer.w_off;
    const double* bs = params_.data() + layer.b_off;
    const int ni = layer.n_in, no = layer.n_out;
    for (int k = 0; k < static_cast<int>(a_ncoef); ++k) {
      const double* in = val(a) + static_cast<std::size_t>(k) * ni;
      double* out = val(id) + static_cast<std::size_t>(k) * no;
      detail::affine_apply(w, k == 0 ? bs : nullptr, in, out, ni, no);
    }
    return id;
  }

  std::uint32_t scale(std::uint32_t a, double factor) {
    const std::uint32_t a_ncoef = nodes_[a].ncoef;
    const std::uint32_t a_count = nodes_[a].count;
    const std::uint32_t id = push(Op::Scale, a_ncoef, a_count);
    nodes_[id].a = a;
    nodes_[id].s = factor;
    const std::size_t n = static_cast<std::size_t>(a_ncoef) * a_count;
    const double* in = val(a);
    double* out = val(id);
    for (std::size_t i = 0; i < n; ++i) out[i] = factor * in[i];
    return id;
  }

  std::uint32_t activation(std::uint32_t a, Act f) {
    const std::uint32_t a_ncoef = nodes_[a].ncoef;
    const std::uint32_t count = nodes_[a].count;
    const std::uint32_t id = push(Op::ActMap, a_ncoef, count, /*with_dval=*/true);
    nodes_[id].a = a;
    nodes_[id].aux = static_cast<std::uint32_t>(f);
    const int maxo = a_ncoef > 1 ? shape_.max_order() : 0;
    double fd[kMaxJetOrder + 2];
    const double* in = val(a);
    double* out = val(id);
    double* dj = dval(id);
    for (std::uint32_t s = 0; s < count; ++s) {
      act_derivs(f, in[s], fd, maxo + 1);
      out[s] = fd[0];
      dj[s] = fd[1];
      if (a_ncoef > 1) {
        for (const auto& dir : shape_.dirs) {
          compose_dir(in, out, fd, dir, count, s);
          compose_dir(in, dj, fd + 1, dir, count, s);
        }
      }
    }
    return id;
  }

  std::uint32_t concat(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t nc = nodes_[a].ncoef;
    const std::uint32_t ca = nodes_[a].count;
    const std::uint32_t cb = nodes_[b].count;
    if (nc != nodes_[b].ncoef) throw std::invalid_argument("Tape::concat: shape mismatch");
    const std::uint32_t count = ca + cb;
    const std::uint32_t id = push(Op::Concat, nc, count);
    nodes_[id].a = a;
    nodes_[id].b = b;
    for (int k = 0; k < static_cast<int>(nc); ++k) {
      double* out = val(id) + static_cast<std::size_t>(k) * count;
      const double* pa = val(a) + static_cast<std::size_t>(k) * ca;
      const double* pb = val(b) + static_cast<std::size_t>(k) * cb;
      for (std::uint32_t i = 0; i < ca; ++i) out[i] = pa[i];
      for (std::uint32_t i = 0; i < cb; ++i) out[ca + i] = pb[i];
    }
    return id;
  }

  // Single slot of a vector node, keeping all planes.
  TapeVar pick(std::uint32_t a, std::uint32_t slot) {
    const std::uint32_t nc = nodes_[a].ncoef;
    const std::uint32_t ca = nodes_[a].count;
    if (slot >= ca) throw std::invalid_argument("Tape::pick: slot out of range");
    const std::uint32_t id = push(Op::Pick, nc, 1);
    nodes_[id].a = a;
    nodes_[id].aux = slot;
    for (int k = 0; k < static_cast<int>(nc); ++k)
      val(id)[k] = val(a)[static_cast<std::size_t>(k) * ca + slot];
    return {id};
  }

  // ---- scalar ops (single-slot nodes) ----------------------------------

  // Raw derivative of order j along input dimension dim; order-0 result.
  TapeVar deriv(TapeVar v, int dim, int j) {
    const std::uint32_t a_ncoef = nodes_[v.node].ncoef;
    if (nodes_[v.node].count != 1) throw std::invalid_argument("Tape::deriv: needs a scalar node");
    int plane = 0;
    if (j != 0) {
      const JetShape::Dir* dir = a_ncoef > 1 ? shape_.find(dim) : nullptr;
      if (dir == nullptr || j < 0 || j > dir->order)
        throw std::invalid_argument("Tape::deriv: derivative not carried by this evaluation");
      plane = dir->first + j - 1;
    }
    const std::uint32_t id = push(Op::Deriv, 1, 1);
    nodes_[id].a = v.node;
    nodes_[id].aux = static_cast<std::uint32_t>(plane);
    nodes_[id].s = kFactorial[j];
    val(id)[0] = val(v.node)[plane] * nodes_[id].s;
    return {id};
  }

  TapeVar add(TapeVar x, TapeVar y) { return binary(Op::Add, x, y); }
  TapeVar sub(TapeVar x, TapeVar y) { return binary(Op::Sub, x, y); }
  TapeVar mul(TapeVar x, TapeVar y) { return binary(Op::Mul, x, y); }

  // m*x + c
  TapeVar axpb(TapeVar x, double m, double c) {
    require_scalar(nodes_[x.node]);
    const std::uint32_t nc = nodes_[x.node].ncoef;
    const std::uint32_t id = push(Op::Axpb, nc, 1);
    nodes_[id].a = x.node;
    nodes_[id].s = m;
    val(id)[0] = m * val(x.node)[0] + c;
    for (int k = 1; k < static_cast<int>(nc); ++k) val(id)[k] = m * val(x.node)[k];
    return {id};
  }

  // ---- reads -----------------------------------------------------------

  double value(TapeVar v) const { return cval(v.node)[0]; }
  double value(std::uint32_t node, std::uint32_t slot) const { return cval(node)[slot]; }
  int slots(std::uint32_t node) const { return static_cast<int>(nodes_[node].count); }

  // Single-direction jet view of one slot.
  Jet jet(std::uint32_t node, std::uint32_t slot, int dim) const {
    const Node& n = nodes_[node];
    const JetShape::Dir* dir = n.ncoef > 1 ? shape_.find(dim) : nullptr;
    const int order = dir ? dir->order : 0;
    Jet j(order);
    j.coeff(0) = cval(node)[slot];
    for (int k = 1; k <= order; ++k)
      j.coeff(k) = cval(node)[static_cast<std::size_t>(dir->first + k - 1) * n.count + slot];
    return j;
  }

  // ---- reverse sweep ---------------------------------------------------

  // Accumulates sum_i weight_i * d(value(var_i))/d(params) into grad.
  void backward(std::span<const Seed> seeds, std::span<double> grad) {
    adj_.assign(vals_used_, 0.0);
    for (const auto& s : seeds) {
      const Node& n = nodes_[s.var.node];
      require_scalar(n);
      adj_[n.val] += s.weight;
    }
    for (std::size_t i = nodes_.size(); i-- > 0;) backward_node(static_cast<std::uint32_t>(i), grad);
  }

  // Gradient of one recorded scalar with respect to every parameter.
  std::vector<double> gradient(TapeVar output) {
    if (!output.valid() || output.node >= nodes_.size())
      throw std::invalid_argument("Tape::gradient: no output designated");
    std::vector<double> grad(params_.size(), 0.0);
    const Seed s{output, 1.0};
    backward(std::span<const Seed>(&s, 1), grad);
    return grad;
  }

 private:
  enum class Op : std::uint8_t {
    Input,
    Constant,
    Param,
    Affine,
    Scale,
    ActMap,
    Concat,
    Pick,
    Add,
    Sub,
    Mul,
    Axpb,
    Deriv
  };

  struct Node {
    Op op;
    std::uint32_t ncoef;
    std::uint32_t count;
    std::uint32_t val;
    std::uint32_t dval = 0;
    std::uint32_t a = UINT32_MAX;
    std::uint32_t b = UINT32_MAX;
    std::uint32_t aux = 0;
    double s = 0.0;
  };

  static void require_scalar(const Node& n) {
    if (n.count != 1) throw std::invalid_argument("Tape: scalar op on vector node");
  }

  std::uint32_t push(Op op, std::uint32_t ncoef, std::uint32_t count, bool with_dval = false) {
    Node n;
    n.op = op;
    n.ncoef = ncoef;
    n.count = count;
    n.val = alloc(vals_, vals_used_, static_cast<std::size_t>(ncoef) * count);
    if (with_dval) n.dval = alloc(dvals_, dvals_used_, static_cast<std::size_t>(ncoef) * count);
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  static std::uint32_t alloc(std::vector<double>& arena, std::size_t& used, std::size_t n) {
    const std::size_t off = used;
    used += n;
    if (arena.size() < used) arena.resize(used * 2);
    return static_cast<std::uint32_t>(off);
  }

  double* val(std::uint32_t id) { return vals_.data() + nodes_[id].val; }
  const double* cval(std::uint32_t id) const { return vals_.data() + nodes_[id].val; }
  double* dval(std::uint32_t id) { return dvals_.data() + nodes_[id].dval; }
  const double* cdval(std::uint32_t id) const { return dvals_.data() + nodes_[id].dval; }

  // Composition along one direction: out coefficients of F(a) where fd holds
  // F and raw derivatives at the slot value. Writes planes dir.first..,
  // leaves the value plane untouched.
  void compose_dir(const double* in, double* out, const double* fd, const JetShape::Dir& dir,
                   std::uint32_t count, std::uint32_t s) {
    const std::size_t p1 = static_cast<std::size_t>(dir.first) * count + s;
    const double a1 = in[p1];
    out[p1] = fd[1] * a1;
    if (dir.order >= 2) {
      const double a2 = in[p1 + count];
      out[p1 + count] = 0.5 * fd[2] * a1 * a1 + fd[1] * a2;
      if (dir.order >= 3) {
        const double a3 = in[p1 + 2 * count];
        out[p1 + 2 * count] = fd[3] * a1 * a1 * a1 / 6.0 + fd[2] * a1 * a2 + fd[1] * a3;
      }
    }
  }

  TapeVar binary(Op op, TapeVar x, TapeVar y) {
    require_scalar(nodes_[x.node]);
    require_scalar(nodes_[y.node]);
    const std::uint32_t na = nodes_[x.node].ncoef;
    const std::uint32_t nb = nodes_[y.node].ncoef;
    const std::uint32_t nc = na > nb ? na : nb;
    const std::uint32_t id = push(op, nc, 1);
    nodes_[id].a = x.node;
    nodes_[id].b = y.node;
    const double* a = cval(x.node);
    const double* b = cval(y.node);
    double* o = val(id);
    auto ca = [&](std::uint32_t k) { return k < na ? a[k] : 0.0; };
    auto cb = [&](std::uint32_t k) { return k < nb ? b[k] : 0.0; };
    switch (op) {
      case Op::Add:
        for (std::uint32_t k = 0; k < nc; ++k) o[k] = ca(k) + cb(k);
        break;
      case Op::Sub:
        for (std::uint32_t k = 0; k < nc; ++k) o[k] = ca(k) - cb(k);
        break;
      case Op::Mul: {
        o[0] = a[0] * b[0];
        for (const auto& dir : shape_.dirs) {
          if (static_cast<std::uint32_t>(dir.first) >= nc) continue;
          for (int m = 1; m <= dir.order; ++m) {
            const std::uint32_t pm = static_cast<std::uint32_t>(dir.first + m - 1);
            double s = a[0] * cb(pm) + ca(pm) * b[0];
            for (int i = 1; i < m; ++i)
              s += ca(static_cast<std::uint32_t>(dir.first + i - 1)) *
                   cb(static_cast<std::uint32_t>(dir.first + m - i - 1));
            o[pm] = s;
          }
        }
        break;
      }
      default:
        throw std::logic_error("Tape::binary: bad op");
    }
    return {id};
  }

  void backward_node(std::uint32_t id, std::span<double> grad) {
    const Node& n = nodes_[id];
    const double* ao = adj_.data() + n.val;
    switch (n.op) {
      case Op::Input:
      case Op::Constant:
        break;
      case Op::Param:
        grad[n.aux] += ao[0];
        break;
      case Op::Affine: {
        const LayerView& lv = layers_[n.aux];
        const Node& an = nodes_[n.a];
        const double* w = params_.data() + lv.w_off;
        double* gw = grad.data() + lv.w_off;
        double* gb = grad.data() + lv.b_off;
        const int ni = lv.n_in, no = lv.n_out;
        for (int k = 0; k < static_cast<int>(n.ncoef); ++k) {
          const double* aok = ao + static_cast<std::size_t>(k) * no;
          const double* in = vals_.data() + an.val + static_cast<std::size_t>(k) * ni;
          double* ain = adj_.data() + an.val + static_cast<std::size_t>(k) * ni;
          for (int i = 0; i < no; ++i) {
            const double g = aok[i];
            const double* wr = w + static_cast<std::size_t>(i) * ni;
            double* gwr = gw + static_cast<std::size_t>(i) * ni;
            for (int j = 0; j < ni; ++j) {
              ain[j] += wr[j] * g;
              gwr[j] += in[j] * g;
            }
            if (k == 0) gb[i] += g;
          }
        }
        break;
      }
      case Op::Scale: {
        const Node& an = nodes_[n.a];
        double* aa = adj_.data() + an.val;
        const std::size_t cnt = static_cast<std::size_t>(n.ncoef) * n.count;
        for (std::size_t i = 0; i < cnt; ++i) aa[i] += n.s * ao[i];
        break;
      }
      case Op::ActMap: {
        const Node& an = nodes_[n.a];
        double* aa = adj_.data() + an.val;
        const double* dj = cdval(id);
        const std::uint32_t count = n.count;
        for (std::uint32_t s = 0; s < count; ++s) {
          double av = ao[s] * dj[s];
          for (const auto& dir : shape_.dirs) {
            if (n.ncoef == 1) break;
            const std::size_t p1 = static_cast<std::size_t>(dir.first) * count + s;
            for (int m = 1; m <= dir.order; ++m) {
              const double aom = ao[p1 + static_cast<std::size_t>(m - 1) * count];
              av += aom * dj[p1 + static_cast<std::size_t>(m - 1) * count];
              // within-direction correlation: adj_a[j] += adj_o[m] * d[m - j]
              for (int j = 1; j <= m; ++j) {
                const double dmj = m - j == 0
                                       ? dj[s]
                                       : dj[p1 + static_cast<std::size_t>(m - j - 1) * count];
                aa[p1 + static_cast<std::size_t>(j - 1) * count] += aom * dmj;
              }
            }
          }
          aa[s] += av;
        }
        break;
      }
      case Op::Concat: {
        const Node& an = nodes_[n.a];
        const Node& bn = nodes_[n.b];
        double* aa = adj_.data() + an.val;
        double* ab = adj_.data() + bn.val;
        for (int k = 0; k < static_cast<int>(n.ncoef); ++k) {
          const double* aok = ao + static_cast<std::size_t>(k) * n.count;
          for (std::uint32_t i = 0; i < an.count; ++i)
            aa[static_cast<std::size_t>(k) * an.count + i] += aok[i];
          for (std::uint32_t i = 0; i < bn.count; ++i)
            ab[static_cast<std::size_t>(k) * bn.count + i] += aok[an.count + i];
        }
        break;
      }
      case Op::Pick: {
        const Node& an = nodes_[n.a];
        double* aa = adj_.data() + an.val;
        for (int k = 0; k < static_cast<int>(n.ncoef); ++k)
          aa[static_cast<std::size_t>(k) * an.count + n.aux] += ao[k];
        break;
      }
      case Op::Add: {
        accumulate_linear(n.a, ao, n.ncoef, 1.0);
        accumulate_linear(n.b, ao, n.ncoef, 1.0);
        break;
      }
      case Op::Sub: {
        accumulate_linear(n.a, ao, n.ncoef, 1.0);
        accumulate_linear(n.b, ao, n.ncoef, -1.0);
        break;
      }
      case Op::Mul: {
        mul_backward(n, n.a, n.b, ao);
        mul_backward(n, n.b, n.a, ao);
        break;
      }
      case Op::Axpb: {
        accumulate_linear(n.a, ao, n.ncoef, n.s);
        break;
      }
      case Op::Deriv: {
        adj_[nodes_[n.a].val + n.aux] += n.s * ao[0];
        break;
      }
    }
  }

  void accumulate_linear(std::uint32_t src, const double* ao, std::uint32_t ncoef, double w) {
    const Node& sn = nodes_[src];
    double* aa = adj_.data() + sn.val;
    const std::uint32_t k = sn.ncoef < ncoef ? sn.ncoef : ncoef;
    for (std::uint32_t i = 0; i < k; ++i) aa[i] += w * ao[i];
  }

  // d(c)/d(x) part of c = x*y for scalar jets: correlation with y coefficients.
  void mul_backward(const Node& n, std::uint32_t xid, std::uint32_t yid, const double* ao) {
    const Node& xn = nodes_[xid];
    const Node& yn = nodes_[yid];
    double* ax = adj_.data() + xn.val;
    const double* y = vals_.data() + yn.val;
    auto cy = [&](std::uint32_t k) { return k < yn.ncoef ? y[k] : 0.0; };
    double a0 = ao[0] * y[0];
    for (const auto& dir : shape_.dirs) {
      if (static_cast<std::uint32_t>(dir.first) >= n.ncoef) continue;
      for (int m = 1; m <= dir.order; ++m) {
        const std::uint32_t pm = static_cast<std::uint32_t>(dir.first + m - 1);
        const double aom = ao[pm];
        a0 += aom * cy(pm);
        for (int j = 1; j <= m; ++j) {
          const std::uint32_t pj = static_cast<std::uint32_t>(dir.first + j - 1);
          if (pj >= xn.ncoef) continue;
          const double ymj =
              m - j == 0 ? y[0] : cy(static_cast<std::uint32_t>(dir.first + m - j - 1));
          ax[pj] += aom * ymj;
        }
      }
    }
    ax[0] += a0;
  }

  std::span<const double> params_;
  JetShape shape_;
  std::vector<Node> nodes_;
  std::vector<LayerView> layers_;
  std::vector<double> vals_;
  std::vector<double> dvals_;
  std::vector<double> adj_;
  std::size_t vals_used_ = 0;
  std::size_t dvals_used_ = 0;
};

// Expression handles for residual assembly; each TapeExpr carries its tape.
struct TapeExpr {
  Tape* tape = nullptr;
  TapeVar var;
};

inline TapeExpr operator+(TapeExpr a, TapeExpr b) { return {a.tape, a.tape->add(a.var, b.var)}; }
inline TapeExpr operator-(TapeExpr a, TapeExpr b) { return {a.tape, a.tape->sub(a.var, b.var)}; }
inline TapeExpr operator*(TapeExpr a, TapeExpr b) { return {a.tape, a.tape->mul(a.var, b.var)}; }
inline TapeExpr operator*(double s, TapeExpr a) { return {a.tape, a.tape->axpb(a.var, s, 0.0)}; }
inline TapeExpr operator*(TapeExpr a, double s) { return s * a; }
inline TapeExpr operator+(TapeExpr a, double c) { return {a.tape, a.tape->axpb(a.var, 1.0, c)}; }
inline TapeExpr operator-(TapeExpr a, double c) { return a + (-c); }
inline TapeExpr operator-(TapeExpr a) { return {a.tape, a.tape->axpb(a.var, -1.0, 0.0)}; }

}  // namespace sfpinn
