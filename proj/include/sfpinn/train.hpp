#pragma once

// Loss assembly over collocation batches, ADAM optimization with plateau
// scheduling, the training loop, test-grid MSE evaluation, and observation
// sampling for inverse problems.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfpinn/kdv_reference.hpp"
#include "sfpinn/network.hpp"
#include "sfpinn/pde.hpp"
#include "sfpinn/sampling.hpp"
#include "sfpinn/threading.hpp"

namespace sfpinn {

struct LossSpec {
  double lambda = 1.0;  // the PDE term enters the total as (1/lambda) * L_PDE
  double lambda_ic = 1.0;
  double lambda_bc = 1.0;
  bool data_term = false;
  int n_pde = 0, n_ic = 0, n_bc = 0, n_data = 0;

  void validate() const {
    if (lambda <= 0.0 || lambda_ic <= 0.0 || lambda_bc <= 0.0)
      throw std::invalid_argument("LossSpec: relative weights must be positive");
    if (n_pde < 0 || n_ic < 0 || n_bc < 0 || n_data < 0)
      throw std::invalid_argument("LossSpec: batch counts must be >= 0");
    if (n_pde + n_ic + n_bc + (data_term ? n_data : 0) == 0)
      throw std::invalid_argument("LossSpec: at least one active term");
  }

  static LossSpec forward_defaults(const PdeProblem& p, double lambda) {
    LossSpec s;
    s.lambda = lambda;
    s.n_pde = p.defaults.n_pde;
    s.n_ic = p.defaults.n_ic;
    s.n_bc = p.defaults.n_bc;
    return s;
  }

  static LossSpec inverse_defaults(const PdeProblem& p, double lambda) {
    LossSpec s;
    s.lambda = lambda;
    s.n_pde = p.defaults.n_pde;
    s.data_term = true;
    s.n_data = p.defaults.n_data;
    return s;
  }
};

struct LossReport {
  double total = 0.0;
  double pde = 0.0, ic = 0.0, bc = 0.0, data = 0.0;
  std::vector<double> gradient;
};

struct Batch {
  std::vector<double> pde;
  std::vector<std::vector<double>> cond;  // per condition set
  std::vector<double> data_pts;
  std::vector<double> data_vals;
  int n_pde = 0, n_ic = 0, n_bc = 0, n_data = 0;
};

// ---- pools -----------------------------------------------------------------

class IndexPool {
 public:
  IndexPool() = default;
  explicit IndexPool(std::size_t n) : order_(n) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<std::uint32_t>(i);
  }
  std::size_t size() const { return order_.size(); }
  std::uint32_t draw(Rng& rng) {
    if (cursor_ == order_.size()) {
      rng.shuffle(order_);
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

 private:
  std::vector<std::uint32_t> order_;
  std::size_t cursor_ = 0;
};

// Condition points of one loss bucket (IC or BC): the points of every
// condition set in the bucket pooled together, so each draw covers all faces
// evenly over an epoch.
class CondBucketPool {
 public:
  CondBucketPool() = default;

  void add_set(std::size_t set_index, std::vector<double> pts, int dim) {
    const std::size_t n = pts.size() / dim;
    for (std::size_t i = 0; i < n; ++i)
      entries_.push_back({static_cast<std::uint32_t>(set_index), static_cast<std::uint32_t>(i)});
    if (set_index >= pts_.size()) pts_.resize(set_index + 1);
    pts_[set_index] = std::move(pts);
    dim_ = dim;
  }

  bool empty() const { return entries_.empty(); }

  // Appends `count` points into out[set], drawing without replacement across
  // the whole bucket and reshuffling per epoch.
  void draw(int count, Rng& rng, std::vector<std::vector<double>>& out) {
    for (int k = 0; k < count; ++k) {
      if (cursor_ == entries_.size()) {
        rng.shuffle(entries_);
        cursor_ = 0;
      }
      const auto [set, idx] = entries_[cursor_++];
      const double* p = pts_[set].data() + static_cast<std::size_t>(idx) * dim_;
      out[set].insert(out[set].end(), p, p + dim_);
    }
  }

 private:
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;
  std::vector<std::vector<double>> pts_;
  int dim_ = 0;
  std::size_t cursor_ = 0;
};

struct TrainingPools {
  SamplePool pde;
  CondBucketPool ic;
  CondBucketPool bc;
  IndexPool data;
};

inline TrainingPools build_pools(const PdeProblem& p, Rng& rng) {
  TrainingPools pools;
  const auto& shape = p.defaults.sample_shape;
  const int dim = p.domain.dim();
  if (static_cast<int>(shape.size()) == dim)
    pools.pde = SamplePool(uniform_grid(p.domain, shape), dim);
  else if (shape.size() == 1)
    pools.pde = SamplePool(latin_hypercube(p.domain, shape[0], rng), dim);
  else
    throw std::invalid_argument(p.name + ": bad sample_shape");

  for (std::size_t s = 0; s < p.conditions.size(); ++s) {
    const auto& cs = p.conditions[s];
    std::vector<double> pts;
    switch (cs.loc) {
      case ConditionSet::Location::TimeZero:
        pts = time_zero_grid(p.domain, shape);
        break;
      case ConditionSet::Location::Face:
        pts = face_grid(p.domain, shape, cs.dim, cs.side, cs.exclude_corners);
        break;
      case ConditionSet::Location::Periodic:
        pts = face_grid(p.domain, shape, cs.dim, 0, false);
        break;
    }
    (cs.is_ic ? pools.ic : pools.bc).add_set(s, std::move(pts), dim);
  }
  if (p.inverse_mode) pools.data = IndexPool(static_cast<std::size_t>(p.observations.count));
  return pools;
}

inline void draw_batch(const PdeProblem& p, TrainingPools& pools, const LossSpec& spec, Rng& rng,
                       Batch& batch) {
  const int dim = p.domain.dim();
  batch.pde.clear();
  batch.cond.assign(p.conditions.size(), {});
  batch.data_pts.clear();
  batch.data_vals.clear();
  batch.n_pde = spec.n_pde;
  batch.n_ic = spec.n_ic;
  batch.n_bc = spec.n_bc;
  batch.n_data = spec.data_term ? spec.n_data : 0;

  if (spec.n_pde > 0) pools.pde.draw(spec.n_pde, rng, batch.pde);

  if (spec.n_ic > 0 && pools.ic.empty())
    throw std::invalid_argument(p.name + ": IC batch requested but no initial conditions");
  if (spec.n_bc > 0 && pools.bc.empty())
    throw std::invalid_argument(p.name + ": BC batch requested but no boundary conditions");
  if (spec.n_ic > 0) pools.ic.draw(spec.n_ic, rng, batch.cond);
  if (spec.n_bc > 0) pools.bc.draw(spec.n_bc, rng, batch.cond);

  if (batch.n_data > 0) {
    if (p.observations.count == 0)
      throw std::invalid_argument(p.name + ": data term active but no observations");
    const int nf = p.n_fields();
    for (int k = 0; k < batch.n_data; ++k) {
      const std::uint32_t i = pools.data.draw(rng);
      const double* pt = p.observations.points.data() + static_cast<std::size_t>(i) * dim;
      const double* val = p.observations.values.data() + static_cast<std::size_t>(i) * nf;
      batch.data_pts.insert(batch.data_pts.end(), pt, pt + dim);
      batch.data_vals.insert(batch.data_vals.end(), val, val + nf);
    }
  }
}

// ---- loss ------------------------------------------------------------------

class LossContext {
 public:
  LossContext(const PdeProblem& p, std::size_t n_params, ThreadPool* pool)
      : n_params_(n_params), pool_(pool) {
    pde_shape_ = JetShape::from_orders(p.jet_orders);
    const int dim = p.domain.dim();
    for (const auto& cs : p.conditions) {
      std::vector<int> orders(dim, 0);
      for (const auto& t : cs.terms)
        if (t.order > 0) orders[t.dim] = std::max(orders[t.dim], t.order);
      cond_shapes_.push_back(JetShape::from_orders(orders));
    }
  }

  const JetShape& pde_shape() const { return pde_shape_; }
  const JetShape& cond_shape(std::size_t i) const { return cond_shapes_[i]; }

  void ensure(std::size_t njobs) {
    if (tapes_.size() < njobs) {
      tapes_.resize(njobs);
      grads_.resize(njobs);
      sums_.resize(njobs);
    }
    for (std::size_t i = 0; i < njobs; ++i) {
      grads_[i].assign(n_params_, 0.0);
      sums_[i] = {0.0, 0.0, 0.0, 0.0};
    }
  }

  ThreadPool* pool_;
  JetShape pde_shape_;
  std::vector<JetShape> cond_shapes_;
  std::vector<Tape> tapes_;
  std::vector<std::vector<double>> grads_;
  std::vector<std::array<double, 4>> sums_;  // pde, ic, bc, data
  std::size_t n_params_;
  int tile_ = 32;
};

inline LossReport compute_loss(const PdeProblem& prob, const NetworkPlan& plan,
                               const ParameterSet& ps, const LossSpec& spec, const Batch& batch,
                               LossContext& ctx) {
  spec.validate();
  const int dim = prob.domain.dim();
  const int tile = ctx.tile_;

  struct JobSlice {
    int kind;  // 0 pde, 1 cond, 2 data
    int set;
    int begin, end;
  };
  std::vector<JobSlice> jobs;
  auto add_jobs = [&](int kind, int set, int count) {
    for (int b = 0; b < count; b += tile)
      jobs.push_back({kind, set, b, std::min(count, b + tile)});
  };
  add_jobs(0, 0, batch.n_pde);
  for (std::size_t s = 0; s < batch.cond.size(); ++s)
    add_jobs(1, static_cast<int>(s), static_cast<int>(batch.cond[s].size()) / dim);
  add_jobs(2, 0, batch.n_data);

  ctx.ensure(jobs.size());
  const double w_pde = 1.0 / spec.lambda;
  const int nf = prob.n_fields();

  auto body = [&](int j) {
    const JobSlice job = jobs[j];
    Tape& tape = ctx.tapes_[j];
    tape.bind(ps.values);
    auto& grad = ctx.grads_[j];
    auto& sums = ctx.sums_[j];
    std::vector<Tape::Seed> seeds;

    for (int i = job.begin; i < job.end; ++i) {
      if (job.kind == 0) {
        const std::span<const double> pt(batch.pde.data() + static_cast<std::size_t>(i) * dim,
                                         static_cast<std::size_t>(dim));
        tape.begin(ctx.pde_shape());
        const TapedOutputs outs = forward_on_tape(tape, plan, pt);
        TapeResidualCtx rc(tape, outs, prob.scalars, ps, pt);
        const std::vector<TapeExpr> rs = prob.residual.taped(rc);
        seeds.clear();
        double s2 = 0.0;
        for (const auto& r : rs) {
          const double v = tape.value(r.var);
          s2 += v * v;
          seeds.push_back({r.var, 2.0 * w_pde * v / batch.n_pde});
        }
        sums[0] += s2;
        tape.backward(seeds, grad);
      } else if (job.kind == 1) {
        const auto& cs = prob.conditions[job.set];
        const auto& pts = batch.cond[job.set];
        const std::span<const double> pt(pts.data() + static_cast<std::size_t>(i) * dim,
                                         static_cast<std::size_t>(dim));
        const int bucket = cs.is_ic ? 1 : 2;
        const double w = cs.is_ic ? spec.lambda_ic : spec.lambda_bc;
        const int n = cs.is_ic ? batch.n_ic : batch.n_bc;
        tape.begin(ctx.cond_shape(job.set));
        seeds.clear();
        if (cs.loc == ConditionSet::Location::Periodic) {
          std::vector<double> hi(pt.begin(), pt.end());
          hi[cs.dim] = prob.domain.hi(cs.dim);
          const TapedOutputs lo_out = forward_on_tape(tape, plan, pt);
          const TapedOutputs hi_out = forward_on_tape(tape, plan, hi);
          for (const auto& term : cs.terms) {
            TapeVar a = term.order == 0 ? lo_out.vars[term.field]
                                        : tape.deriv(lo_out.vars[term.field], cs.dim, term.order);
            TapeVar b = term.order == 0 ? hi_out.vars[term.field]
                                        : tape.deriv(hi_out.vars[term.field], cs.dim, term.order);
            const double m = tape.value(a) - tape.value(b);
            sums[bucket] += m * m;
            seeds.push_back({a, 2.0 * w * m / n});
            seeds.push_back({b, -2.0 * w * m / n});
          }
        } else {
          const TapedOutputs outs = forward_on_tape(tape, plan, pt);
          for (const auto& term : cs.terms) {
            TapeVar v = term.order == 0 ? outs.vars[term.field]
                                        : tape.deriv(outs.vars[term.field], term.dim, term.order);
            const double m = tape.value(v) - term.target(pt);
            sums[bucket] += m * m;
            seeds.push_back({v, 2.0 * w * m / n});
          }
        }
        tape.backward(seeds, grad);
      } else {
        const std::span<const double> pt(batch.data_pts.data() + static_cast<std::size_t>(i) * dim,
                                         static_cast<std::size_t>(dim));
        tape.begin(JetShape::value_only());
        const TapedOutputs outs = forward_on_tape(tape, plan, pt);
        seeds.clear();
        for (int f = 0; f < nf; ++f) {
          const double m =
              tape.value(outs.vars[f]) - batch.data_vals[static_cast<std::size_t>(i) * nf + f];
          sums[3] += m * m;
          seeds.push_back({outs.vars[f], 2.0 * m / batch.n_data});
        }
        tape.backward(seeds, grad);
      }
    }
  };

  if (ctx.pool_ != nullptr)
    ctx.pool_->run(static_cast<int>(jobs.size()), body);
  else
    for (std::size_t j = 0; j < jobs.size(); ++j) body(static_cast<int>(j));

  LossReport report;
  report.gradient.assign(ps.values.size(), 0.0);
  std::array<double, 4> sums{0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (int k = 0; k < 4; ++k) sums[k] += ctx.sums_[j][k];
    const auto& g = ctx.grads_[j];
    for (std::size_t i = 0; i < g.size(); ++i) report.gradient[i] += g[i];
  }
  report.pde = batch.n_pde > 0 ? sums[0] / batch.n_pde : 0.0;
  report.ic = batch.n_ic > 0 ? sums[1] / batch.n_ic : 0.0;
  report.bc = batch.n_bc > 0 ? sums[2] / batch.n_bc : 0.0;
  report.data = batch.n_data > 0 ? sums[3] / batch.n_data : 0.0;
  report.total = w_pde * report.pde + spec.lambda_ic * report.ic + spec.lambda_bc * report.bc +
                 (spec.data_term ? report.data : 0.0);
  return report;
}

// ---- optimizer ---------------------------------------------------------------

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(ParameterSet& ps, std::span<const double> grad, AdamState& st, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
  for (double g : grad)
    if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
  st.t += 1;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < ps.values.size(); ++i) {
    if (!ps.trainable[i]) continue;
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
    const double mhat = st.m[i] / c1;
    const double vhat = st.v[i] / c2;
    ps.values[i] -= lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

// Reduce-on-plateau: decay when the best loss has not improved by a relative
// threshold within the patience window, floored at min_lr.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, int patience, double decay, double rel_improve, double min_lr)
      : lr_(lr0), patience_(patience), decay_(decay), rel_(rel_improve), min_lr_(min_lr) {}

  double observe(double loss) {
    if (!seen_) {
      best_ = loss;
      seen_ = true;
      return lr_;
    }
    if (loss < best_ * (1.0 - rel_)) {
      best_ = loss;
      since_ = 0;
    } else if (++since_ >= patience_) {
      lr_ = std::max(lr_ * decay_, min_lr_);
      since_ = 0;
    }
    return lr_;
  }

  double lr() const { return lr_; }

 private:
  double lr_;
  int patience_;
  double decay_, rel_, min_lr_;
  double best_ = 0.0;
  bool seen_ = false;
  int since_ = 0;
};

// ---- test grid / MSE ----------------------------------------------------------

struct TestGrid {
  int n = 0;
  int fields = 0;
  std::vector<double> pts;
  std::vector<double> truth;
};

inline TestGrid make_test_grid(const PdeProblem& p) {
  TestGrid grid;
  const int dim = p.domain.dim();
  if (p.mse_kind == MseKind::None) return grid;
  if (p.mse_kind == MseKind::Reference) {
    if (!p.reference) throw std::runtime_error(p.name + ": reference table not loaded");
    const ReferenceTable& t = *p.reference;
    grid.fields = 1;
    grid.n = t.nx() * t.nt();
    grid.pts.reserve(static_cast<std::size_t>(grid.n) * 2);
    grid.truth.reserve(grid.n);
    for (int it = 0; it < t.nt(); ++it) {
      for (int ix = 0; ix < t.nx(); ++ix) {
        grid.pts.push_back(t.xs[ix]);
        grid.pts.push_back(t.ts[it]);
        grid.truth.push_back(t.at(it, ix));
      }
    }
    return grid;
  }
  if (!p.has_exact()) throw std::runtime_error(p.name + ": no ground truth for MSE");
  std::vector<int> counts = p.defaults.sample_shape;
  if (static_cast<int>(counts.size()) != dim) counts.assign(static_cast<std::size_t>(dim), 64);
  grid.pts = uniform_grid(p.domain, counts);
  grid.n = static_cast<int>(grid.pts.size()) / dim;
  grid.fields = p.n_fields();
  grid.truth.resize(static_cast<std::size_t>(grid.n) * grid.fields);
  for (int i = 0; i < grid.n; ++i) {
    const auto vals = p.exact(
        std::span<const double>(grid.pts.data() + static_cast<std::size_t>(i) * dim, dim));
    for (int f = 0; f < grid.fields; ++f) grid.truth[static_cast<std::size_t>(i) * grid.fields + f] = vals[f];
  }
  return grid;
}

// MSE against ground truth: plain MSE for scalar fields, MSE of sqrt(u^2+v^2)
// for transient flows, average of the u and v MSEs for the steady cavity.
inline double evaluate_mse(const NetworkPlan& plan, const ParameterSet& ps, const PdeProblem& prob,
                           const TestGrid& grid, ThreadPool* pool = nullptr) {
  if (prob.mse_kind == MseKind::None || grid.n == 0)
    throw std::runtime_error(prob.name + ": MSE unsupported (no ground truth)");
  const int dim = prob.domain.dim();
  const int nf = prob.n_fields();
  const int tile = 1024;
  const int njobs = (grid.n + tile - 1) / tile;
  std::vector<double> err(static_cast<std::size_t>(grid.n) * 2, 0.0);
  auto body = [&](int j) {
    Workspace ws;
    std::vector<double> out(nf);
    const int b = j * tile, e = std::min(grid.n, b + tile);
    for (int i = b; i < e; ++i) {
      forward_plain(plan, ps.values,
                    std::span<const double>(grid.pts.data() + static_cast<std::size_t>(i) * dim, dim),
                    ws, out);
      const double* tr = grid.truth.data() + static_cast<std::size_t>(i) * grid.fields;
      switch (prob.mse_kind) {
        case MseKind::Scalar:
        case MseKind::Reference: {
          const double d = out[0] - tr[0];
          err[i] = d * d;
          break;
        }
        case MseKind::VelocityMagnitude: {
          const double mh = std::sqrt(out[0] * out[0] + out[1] * out[1]);
          const double mt = std::sqrt(tr[0] * tr[0] + tr[1] * tr[1]);
          err[i] = (mh - mt) * (mh - mt);
          break;
        }
        case MseKind::MeanUV: {
          const double du = out[0] - tr[0];
          const double dv = out[1] - tr[1];
          err[i] = du * du;
          err[static_cast<std::size_t>(grid.n) + i] = dv * dv;
          break;
        }
        case MseKind::None:
          break;
      }
    }
  };
  if (pool != nullptr)
    pool->run(njobs, body);
  else
    for (int j = 0; j < njobs; ++j) body(j);

  if (prob.mse_kind == MseKind::MeanUV) {
    double su = 0.0, sv = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      su += err[i];
      sv += err[static_cast<std::size_t>(grid.n) + i];
    }
    return 0.5 * (su / grid.n + sv / grid.n);
  }
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += err[i];
  return s / grid.n;
}

// ---- observations ---------------------------------------------------------------

enum class ObservationScenario { Dense, Sparse };

inline ObservationSet sample_observations(const PdeProblem& p, ObservationScenario scenario,
                                          Rng& rng) {
  if (!p.has_exact())
    throw std::runtime_error(p.name + ": observations need a ground-truth solution");
  const int dim = p.domain.dim();
  ObservationSet obs;
  if (scenario == ObservationScenario::Dense) {
    std::vector<int> counts = p.defaults.sample_shape;
    if (static_cast<int>(counts.size()) != dim)
      throw std::runtime_error(p.name + ": dense observations need a grid sample shape");
    obs.points = uniform_grid(p.domain, counts);
  } else if (p.name == "wave1d") {
    // 200 points, x uniform, t ramped toward the end of the horizon.
    const double T = p.domain.hi(1);
    for (int i = 0; i < 200; ++i) {
      obs.points.push_back(rng.uniform(p.domain.lo(0), p.domain.hi(0)));
      obs.points.push_back(T * std::sqrt(rng.uniform()));
    }
  } else if (p.name == "taylor-green") {
    for (int i = 0; i < 600; ++i)
      for (int d = 0; d < dim; ++d) obs.points.push_back(rng.uniform(p.domain.lo(d), p.domain.hi(d)));
  } else {
    throw std::runtime_error(p.name + ": no sparse observation scenario defined");
  }
  obs.count = static_cast<int>(obs.points.size()) / dim;
  obs.values.resize(static_cast<std::size_t>(obs.count) * p.n_fields());
  for (int i = 0; i < obs.count; ++i) {
    const auto vals =
        p.exact(std::span<const double>(obs.points.data() + static_cast<std::size_t>(i) * dim, dim));
    for (int f = 0; f < p.n_fields(); ++f)
      obs.values[static_cast<std::size_t>(i) * p.n_fields() + f] = vals[f];
  }
  return obs;
}

// ---- training loop ---------------------------------------------------------------

struct TrainOptions {
  long iterations = 1000;
  double lr = 5e-3;
  int grad_accum = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  long eval_every = 0;  // 0: evaluate the test grid only at the last iteration
  int patience = 1000;
  double decay = 0.5;
  double rel_improve = 1e-3;
  double min_lr = 1e-6;
  double clip_norm = 0.0;  // 0: no clipping; otherwise rescale gradients above this L2 norm

  void validate() const {
    if (iterations < 0) throw std::invalid_argument("TrainOptions: iterations must be >= 0");
    if (grad_accum < 1) throw std::invalid_argument("TrainOptions: grad_accum must be >= 1");
    if (!(decay > 0.0 && decay < 1.0))
      throw std::invalid_argument("TrainOptions: decay factor must be in (0, 1)");
  }
};

struct HistoryRow {
  long iter = 0;
  double lr = 0.0;
  double total = 0.0, pde = 0.0, ic = 0.0, bc = 0.0, data = 0.0;
  double test_mse = std::numeric_limits<double>::quiet_NaN();
  double scalar_estimate = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  ParameterSet params;
  std::vector<HistoryRow> history;
  std::string status = "ok";
  double wall_seconds = 0.0;
};

inline TrainResult train(const PdeProblem& prob, const NetworkPlan& plan, ParameterSet params,
                         const LossSpec& spec, const TrainOptions& opts,
                         const TestGrid* test_grid = nullptr) {
  opts.validate();
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();

  TrainResult result;
  Rng pool_rng = Rng::stream(opts.seed, 2);
  Rng batch_rng = Rng::stream(opts.seed, 1);
  TrainingPools pools = build_pools(prob, pool_rng);

  ThreadPool pool(opts.threads);
  LossContext ctx(prob, params.values.size(), opts.threads > 1 ? &pool : nullptr);
  AdamState adam(params.values.size());
  PlateauScheduler sched(opts.lr, opts.patience, opts.decay, opts.rel_improve, opts.min_lr);

  std::ptrdiff_t scalar_idx = -1;
  for (std::size_t i = 0; i < params.values.size(); ++i)
    if (params.trainable[i] && i >= params.scalar_offset) {
      scalar_idx = static_cast<std::ptrdiff_t>(i);
      break;
    }

  Batch batch;
  std::vector<double> accum(params.values.size(), 0.0);
  int accum_n = 0;
  int bad_streak = 0;
  result.history.reserve(static_cast<std::size_t>(opts.iterations));

  for (long it = 0; it < opts.iterations; ++it) {
    draw_batch(prob, pools, spec, batch_rng, batch);
    const LossReport report = compute_loss(prob, plan, params, spec, batch, ctx);

    HistoryRow row;
    row.iter = it;
    row.total = report.total;
    row.pde = report.pde;
    row.ic = report.ic;
    row.bc = report.bc;
    row.data = report.data;
    row.lr = sched.lr();
    if (scalar_idx >= 0) row.scalar_estimate = params.values[static_cast<std::size_t>(scalar_idx)];

    if (!std::isfinite(report.total)) {
      if (++bad_streak >= 3) {
        result.history.push_back(row);
        result.status = "diverged";
        break;
      }
    } else {
      bad_streak = 0;
    }

    const double lr = sched.observe(report.total);
    row.lr = lr;

    for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += report.gradient[i];
    if (++accum_n == opts.grad_accum) {
      const double inv = 1.0 / accum_n;
      for (auto& g : accum) g *= inv;
      if (opts.clip_norm > 0.0) {
        double norm2 = 0.0;
        for (const double g : accum) norm2 += g * g;
        const double norm = std::sqrt(norm2);
        if (norm > opts.clip_norm) {
          const double scale = opts.clip_norm / norm;
          for (auto& g : accum) g *= scale;
        }
      }
      try {
        adam_step(params, accum, adam, lr);
      } catch (const std::runtime_error&) {
        result.history.push_back(row);
        result.status = "nan-gradient";
        break;
      }
      std::fill(accum.begin(), accum.end(), 0.0);
      accum_n = 0;
    }

    const bool last = it + 1 == opts.iterations;
    if (test_grid != nullptr && test_grid->n > 0 &&
        (last || (opts.eval_every > 0 && (it + 1) % opts.eval_every == 0))) {
      row.test_mse = evaluate_mse(plan, params, prob, *test_grid, opts.threads > 1 ? &pool : nullptr);
    }
    result.history.push_back(row);
  }

  result.params = std::move(params);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace sfpinn
