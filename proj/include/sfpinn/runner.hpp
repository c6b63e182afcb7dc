#pragma once

// Configuration-driven experiment orchestration: single runs, sigma/lambda
// sweeps with multi-seed aggregation, inverse scenarios, the proposition
// check suite, and report rendering.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "sfpinn/csv.hpp"
#include "sfpinn/initlab.hpp"
#include "sfpinn/problems.hpp"
#include "sfpinn/svg.hpp"
#include "sfpinn/train.hpp"

namespace sfpinn {

enum class RunMode { Forward, InverseDense, InverseSparse };
enum class Scale { Desk, Paper };

inline const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Forward: return "forward";
    case RunMode::InverseDense: return "inverse-dense";
    case RunMode::InverseSparse: return "inverse-sparse";
  }
  return "?";
}

inline RunMode parse_mode(std::string_view s) {
  if (s == "forward") return RunMode::Forward;
  if (s == "inverse-dense") return RunMode::InverseDense;
  if (s == "inverse-sparse") return RunMode::InverseSparse;
  throw std::invalid_argument("unknown mode: " + std::string(s));
}

struct SweepSpec {
  std::string axis;  // "sigma" or "lambda"
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

struct ExperimentConfig {
  std::string problem = "convdiff";
  Variant variant = Variant::Sf;
  std::string arch;    // empty: problem default
  double sigma = -1.0;  // < 0: problem default
  double lambda = -1.0;
  std::vector<std::uint64_t> seeds = {1};
  long iters = 0;  // 0: from scale preset
  RunMode mode = RunMode::Forward;
  Scale scale = Scale::Desk;
  std::string out_dir = "out";
  SweepSpec sweep;
  int jobs = 1;
  int threads = 0;  // 0: hardware concurrency
  long eval_every = 0;
  int grad_accum = 1;
};

struct RunRow {
  std::string run_id, problem, variant;
  double sigma = 0.0, lambda = 0.0;
  std::uint64_t seed = 0;
  std::string scale;
  long iters = 0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double loss_pde = 0.0, loss_ic = 0.0, loss_bc = 0.0, loss_data = 0.0;
  double physics_estimate = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  std::string status = "ok";
};

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "run_id", "problem", "variant", "sigma",     "lambda",           "seed",
      "scale",  "iters",   "mse",     "loss_pde",  "loss_ic",          "loss_bc",
      "loss_data", "physics_estimate", "wall_seconds", "status"};
  return cols;
}

inline std::vector<std::string> row_cells(const RunRow& r) {
  return {r.run_id,
          r.problem,
          r.variant,
          fmt_double(r.sigma),
          fmt_double(r.lambda),
          std::to_string(r.seed),
          r.scale,
          std::to_string(r.iters),
          fmt_double(r.mse),
          fmt_double(r.loss_pde),
          fmt_double(r.loss_ic),
          fmt_double(r.loss_bc),
          fmt_double(r.loss_data),
          fmt_double(r.physics_estimate),
          fmt_double(r.wall_seconds),
          r.status};
}

inline std::string default_kdv_cache_path() {
  if (const char* env = std::getenv("SFPINN_KDV_CACHE")) return env;
  return "kdv_reference.csv";
}

// Problem with mode applied: inverse variants get their observations, the KdV
// problem gets its reference table, and the test grid is prepared.
struct PreparedProblem {
  PdeProblem problem;
  TestGrid grid;
};

inline PreparedProblem prepare_problem(const std::string& name, RunMode mode) {
  PreparedProblem pp;
  pp.problem = make_problem(name);
  if (pp.problem.mse_kind == MseKind::Reference)
    pp.problem.reference = kdv_reference_cached(default_kdv_cache_path());
  if (mode != RunMode::Forward) {
    Rng obs_rng = Rng::stream(424242, mode == RunMode::InverseDense ? 0 : 1);
    const auto scenario = mode == RunMode::InverseDense ? ObservationScenario::Dense
                                                        : ObservationScenario::Sparse;
    pp.problem = make_inverse_variant(pp.problem, sample_observations(pp.problem, scenario, obs_rng));
  }
  if (pp.problem.mse_kind != MseKind::None) pp.grid = make_test_grid(pp.problem);
  return pp;
}

inline std::string make_run_id(const ExperimentConfig& cfg, double sigma, double lambda,
                               std::uint64_t seed) {
  std::string id = cfg.problem;
  id += "_";
  id += variant_name(cfg.variant);
  if (cfg.mode != RunMode::Forward)
    id += cfg.mode == RunMode::InverseDense ? "_invdense" : "_invsparse";
  id += "_sig" + fmt_double(sigma) + "_lam" + fmt_double(lambda);
  id += "_seed" + std::to_string(seed);
  id += cfg.scale == Scale::Desk ? "_desk" : "_paper";
  return id;
}

inline void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
  CsvWriter w(path, {"iteration", "lr", "loss_total", "loss_pde", "loss_ic", "loss_bc",
                     "loss_data", "test_mse", "physics_scalar_estimates"});
  for (const auto& h : history)
    w.row({std::to_string(h.iter), fmt_double(h.lr), fmt_double(h.total), fmt_double(h.pde),
           fmt_double(h.ic), fmt_double(h.bc), fmt_double(h.data), fmt_double(h.test_mse),
           std::isnan(h.scalar_estimate) ? std::string() : fmt_double(h.scalar_estimate)});
}

inline RunRow run_one(const ExperimentConfig& cfg, const PreparedProblem& pp, double sigma,
                      double lambda, std::uint64_t seed, int threads) {
  const PdeProblem& prob = pp.problem;
  RunRow row;
  row.problem = cfg.problem;
  row.variant = variant_name(cfg.variant);
  row.sigma = sigma;
  row.lambda = lambda;
  row.seed = seed;
  row.scale = cfg.scale == Scale::Desk ? "desk" : "paper";
  row.iters = cfg.iters > 0 ? cfg.iters
              : cfg.scale == Scale::Desk ? prob.defaults.iters_desk
                                         : prob.defaults.iters_paper;
  row.run_id = make_run_id(cfg, sigma, lambda, seed);

  try {
    const std::string arch = cfg.arch.empty() ? prob.defaults.arch : cfg.arch;
    const NetworkConfig ncfg = make_network_config(arch, cfg.variant, sigma);
    const NetworkPlan plan = plan_network(ncfg);
    Rng init_rng = Rng::stream(seed, 0);
    const auto scalars = prob.scalar_params();
    ParameterSet params = init_parameters(plan, init_rng, scalars);

    LossSpec spec = prob.inverse_mode ? LossSpec::inverse_defaults(prob, lambda)
                                      : LossSpec::forward_defaults(prob, lambda);
    TrainOptions opts;
    opts.iterations = row.iters;
    opts.lr = prob.defaults.lr;
    opts.seed = seed;
    opts.threads = threads;
    opts.grad_accum = cfg.grad_accum;
    opts.eval_every = cfg.eval_every > 0 ? cfg.eval_every : std::max<long>(500, row.iters / 50);

    const TestGrid* grid = pp.grid.n > 0 ? &pp.grid : nullptr;
    TrainResult tr = train(prob, plan, std::move(params), spec, opts, grid);

    row.status = tr.status;
    row.wall_seconds = tr.wall_seconds;
    if (!tr.history.empty()) {
      const HistoryRow& last = tr.history.back();
      row.loss_pde = last.pde;
      row.loss_ic = last.ic;
      row.loss_bc = last.bc;
      row.loss_data = last.data;
      row.physics_estimate = last.scalar_estimate;
      if (tr.status == "ok" && grid != nullptr) row.mse = last.test_mse;
    }
    const std::string run_dir = cfg.out_dir + "/runs/" + row.run_id;
    std::filesystem::create_directories(run_dir);
    write_history_csv(run_dir + "/history.csv", tr.history);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

inline void append_summary(const std::string& out_dir, const std::vector<RunRow>& rows) {
  std::filesystem::create_directories(out_dir);
  CsvWriter w(out_dir + "/summary.csv", summary_columns(), /*append=*/true);
  for (const auto& r : rows) w.row(row_cells(r));
}

inline std::vector<RunRow> run_single(const ExperimentConfig& cfg) {
  const PreparedProblem pp = prepare_problem(cfg.problem, cfg.mode);
  const double sigma = cfg.sigma > 0.0 ? cfg.sigma : pp.problem.defaults.sigma;
  const double lambda = cfg.lambda > 0.0 ? cfg.lambda : pp.problem.defaults.lambda;
  const int threads = cfg.threads > 0 ? cfg.threads : ThreadPool::hardware_threads();
  std::vector<RunRow> rows;
  for (const auto seed : cfg.seeds) rows.push_back(run_one(cfg, pp, sigma, lambda, seed, threads));
  append_summary(cfg.out_dir, rows);
  return rows;
}

// ---- sweeps ------------------------------------------------------------------

struct SweepCell {
  std::string problem, variant;
  double sigma = 0.0, lambda = 0.0;
  int n_seeds = 0;
  double best_mse = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::vector<RunRow> rows;
  std::vector<SweepCell> cells;
};

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("log_spaced: count must be >= 1");
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("log_spaced: needs 0 < lo <= hi");
  std::vector<double> v;
  if (count == 1) {
    v.push_back(lo);
    return v;
  }
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i) {
    if (i == 0)
      v.push_back(lo);
    else if (i == count - 1)
      v.push_back(hi);
    else
      v.push_back(std::exp(la + (lb - la) * i / (count - 1)));
  }
  return v;
}

// Best-over-seeds aggregation; NaN rows are excluded unless every seed failed.
inline std::vector<SweepCell> aggregate_cells(const std::vector<RunRow>& rows) {
  std::vector<SweepCell> cells;
  for (const auto& r : rows) {
    SweepCell* cell = nullptr;
    for (auto& c : cells)
      if (c.problem == r.problem && c.variant == r.variant && c.sigma == r.sigma &&
          c.lambda == r.lambda)
        cell = &c;
    if (cell == nullptr) {
      cells.push_back({r.problem, r.variant, r.sigma, r.lambda, 0,
                       std::numeric_limits<double>::quiet_NaN()});
      cell = &cells.back();
    }
    cell->n_seeds += 1;
    if (std::isfinite(r.mse) && !(cell->best_mse < r.mse)) cell->best_mse = r.mse;
    if (std::isfinite(r.mse) && std::isfinite(cell->best_mse))
      cell->best_mse = std::min(cell->best_mse, r.mse);
  }
  return cells;
}

inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep.axis != "sigma" && cfg.sweep.axis != "lambda")
    throw std::invalid_argument("sweep: axis must be sigma or lambda");
  const PreparedProblem pp = prepare_problem(cfg.problem, cfg.mode);
  const double base_sigma = cfg.sigma > 0.0 ? cfg.sigma : pp.problem.defaults.sigma;
  const double base_lambda = cfg.lambda > 0.0 ? cfg.lambda : pp.problem.defaults.lambda;
  const auto values = log_spaced(cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.count);

  struct Task {
    double sigma, lambda;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const double v : values)
    for (const auto seed : cfg.seeds)
      tasks.push_back({cfg.sweep.axis == "sigma" ? v : base_sigma,
                       cfg.sweep.axis == "lambda" ? v : base_lambda, seed});

  SweepResult result;
  result.rows.resize(tasks.size());
  const int jobs = std::max(1, cfg.jobs);
  const int per_run_threads = jobs > 1 ? 1 : (cfg.threads > 0 ? cfg.threads : ThreadPool::hardware_threads());
  ThreadPool pool(jobs);
  pool.run(static_cast<int>(tasks.size()), [&](int i) {
    const Task& t = tasks[i];
    result.rows[static_cast<std::size_t>(i)] = run_one(cfg, pp, t.sigma, t.lambda, t.seed, per_run_threads);
  });

  append_summary(cfg.out_dir, result.rows);
  result.cells = aggregate_cells(result.rows);
  CsvWriter w(cfg.out_dir + "/aggregate.csv",
              {"problem", "variant", "sigma", "lambda", "n_seeds", "best_mse"});
  for (const auto& c : result.cells)
    w.row({c.problem, c.variant, fmt_double(c.sigma), fmt_double(c.lambda),
           std::to_string(c.n_seeds), fmt_double(c.best_mse)});
  return result;
}

// ---- proposition suite --------------------------------------------------------

inline void run_props(const std::string& out_dir, double draws_scale = 1.0) {
  std::filesystem::create_directories(out_dir);
  Rng rng(20240901);

  {  // flat-initialization variance bound, tanh-Xavier
    CsvWriter w(out_dir + "/prop1.csv",
                {"n", "x", "draws", "var", "var_se", "mean", "mean_se", "bound"});
    std::vector<Series> series;
    const double xs[3] = {0.0, 0.5, 1.0};
    for (const int n : {16, 64, 256}) {
      const NetworkPlan plan = flat_init_plan(n);
      const long draws = static_cast<long>(10000 * draws_scale);
      const auto stats = mc_input_gradient_variance(plan, xs, draws, rng);
      Series emp{"n=" + std::to_string(n), {}, {}};
      for (int i = 0; i < 3; ++i) {
        w.row({std::to_string(n), fmt_double(xs[i]), std::to_string(draws),
               fmt_double(stats[i].var), fmt_double(stats[i].var_se), fmt_double(stats[i].mean),
               fmt_double(stats[i].mean_se), fmt_double(bound_flat_init(n))});
        emp.x.push_back(xs[i]);
        emp.y.push_back(stats[i].var);
      }
      series.push_back(emp);
    }
    write_line_chart(out_dir + "/prop1.svg",
                     {"input gradient variance at initialization", "x", "var(du/dx)", false, true},
                     series);
  }

  {  // sinusoidal-feature variance, one hidden layer (equality case)
    CsvWriter w(out_dir + "/prop3.csv",
                {"n", "sigma", "x", "draws", "var", "var_se", "bound"});
    const int n = 64;
    const long draws = static_cast<long>(100000 * draws_scale);
    const double xs[3] = {0.0, 0.3, 1.0};
    std::vector<Series> series;
    for (const double sigma : {0.5, 1.0, 2.0}) {
      const NetworkPlan plan = sf_one_layer_plan(n, sigma);
      const auto stats = mc_input_gradient_variance(plan, xs, draws, rng);
      Series emp{"sigma=" + fmt_double(sigma), {}, {}};
      for (int i = 0; i < 3; ++i) {
        w.row({std::to_string(n), fmt_double(sigma), fmt_double(xs[i]), std::to_string(draws),
               fmt_double(stats[i].var), fmt_double(stats[i].var_se),
               fmt_double(bound_sinusoidal(n, sigma, xs[i]))});
        emp.x.push_back(xs[i]);
        emp.y.push_back(stats[i].var);
      }
      series.push_back(emp);
    }
    write_line_chart(out_dir + "/prop3.svg",
                     {"sinusoidal feature input gradient variance", "x", "var(du/dx)", false, true},
                     series);
  }

  {  // backward-pass gradient retention per activation
    CsvWriter w(out_dir + "/activation_retention.csv",
                {"activation", "var_u", "draws", "value", "retention", "sin_closed_form"});
    const auto vars = log_spaced(1e-3, 1e2, 26);
    const long draws = static_cast<long>(200000 * draws_scale);
    std::vector<Series> series;
    for (const Act f : {Act::Tanh, Act::Sin, Act::Sigmoid}) {
      Series s{act_name(f), {}, {}};
      for (const double v : vars) {
        const McStats st = backward_variance_sim(f, v, draws, rng);
        const double g0 = act_first_deriv(f, 0.0);
        const double retention = st.mean / (g0 * g0);
        w.row({act_name(f), fmt_double(v), std::to_string(draws), fmt_double(st.mean),
               fmt_double(retention),
               f == Act::Sin ? fmt_double(sin_backward_closed_form(v)) : std::string()});
        s.x.push_back(v);
        s.y.push_back(retention);
      }
      series.push_back(s);
    }
    write_line_chart(out_dir + "/activation_retention.svg",
                     {"backward-pass retention var(f'(u)) + E[f'(u)]^2, normalized", "var(u)",
                      "retention", true, false},
                     series);
  }

  {  // feature-layer integrand expectation vs sigma
    CsvWriter w(out_dir + "/tanh_integrand.csv",
                {"sigma", "x", "tanh_value", "decay_bound", "sinusoidal_value"});
    const auto sigmas = log_spaced(1e-1, 1e2, 25);
    std::vector<Series> series;
    for (const double x : {0.5, 1.0, 2.0}) {
      Series st{"tanh x=" + fmt_double(x), {}, {}};
      Series ss{"sf x=" + fmt_double(x), {}, {}};
      for (const double s : sigmas) {
        const double val = expected_tanh_integrand(s, x);
        const double sf = expected_sinusoidal_integrand(s, x);
        w.row({fmt_double(s), fmt_double(x), fmt_double(val),
               fmt_double(tanh_integrand_bound(s, x)), fmt_double(sf)});
        st.x.push_back(s * s);
        st.y.push_back(val);
        ss.x.push_back(s * s);
        ss.y.push_back(sf);
      }
      series.push_back(st);
      series.push_back(ss);
    }
    write_line_chart(out_dir + "/tanh_integrand.svg",
                     {"E[w^2 f'(w x)^2] vs var(w)", "var(w1)", "E", true, true}, series);
  }

  {  // frequency coverage probability
    CsvWriter w(out_dir + "/frequency_coverage.csv",
                {"sigma", "n_features", "target_w", "rel_tol", "single", "at_least_one"});
    const auto sigmas = log_spaced(0.1, 10.0, 50);
    Series single{"single feature", {}, {}}, any{"at least one of 64", {}, {}};
    for (const double s : sigmas) {
      const auto cp = freq_coverage_probability(64, s, 3.0, 0.1);
      w.row({fmt_double(s), "64", "3", "0.1", fmt_double(cp.single), fmt_double(cp.at_least_one)});
      single.x.push_back(s);
      single.y.push_back(cp.single);
      any.x.push_back(s);
      any.y.push_back(cp.at_least_one);
    }
    write_line_chart(out_dir + "/frequency_coverage.svg",
                     {"probability of a feature near sin(6 pi y)", "sigma", "probability", true,
                      false},
                     {single, any});
  }
}

// ---- report -------------------------------------------------------------------

inline void run_report(const std::string& dir) {
  const std::string summary_path = dir + "/summary.csv";
  CsvTable table;
  try {
    table = read_csv(summary_path);
  } catch (const std::exception& e) {
    std::cerr << "report: skipping " << summary_path << " (" << e.what() << ")\n";
    return;
  }

  {  // plain-text summary
    std::ofstream out(dir + "/summary.txt");
    for (const auto& h : table.header) out << h << '\t';
    out << '\n';
    for (const auto& r : table.rows) {
      for (const auto& c : r) out << c << '\t';
      out << '\n';
    }
  }

  const int c_problem = table.col("problem"), c_variant = table.col("variant");
  const int c_sigma = table.col("sigma"), c_lambda = table.col("lambda"), c_mse = table.col("mse");

  for (const std::string axis : {"sigma", "lambda"}) {
    const int c_axis = axis == "sigma" ? c_sigma : c_lambda;
    std::vector<std::string> problems;
    for (const auto& r : table.rows)
      if (std::find(problems.begin(), problems.end(), r[c_problem]) == problems.end())
        problems.push_back(r[c_problem]);
    for (const auto& prob : problems) {
      // best MSE per (variant, axis value)
      struct Pt {
        std::string variant;
        double x, y;
      };
      std::vector<Pt> pts;
      for (const auto& r : table.rows) {
        if (r[c_problem] != prob) continue;
        const double x = parse_double(r[c_axis]);
        const double y = parse_double(r[c_mse]);
        if (!std::isfinite(y)) continue;
        bool merged = false;
        for (auto& p : pts)
          if (p.variant == r[c_variant] && p.x == x) {
            p.y = std::min(p.y, y);
            merged = true;
          }
        if (!merged) pts.push_back({r[c_variant], x, y});
      }
      std::vector<Series> series;
      for (const auto& p : pts) {
        Series* s = nullptr;
        for (auto& q : series)
          if (q.label == p.variant) s = &q;
        if (s == nullptr) {
          series.push_back({p.variant, {}, {}});
          s = &series.back();
        }
        s->x.push_back(p.x);
        s->y.push_back(p.y);
      }
      std::size_t distinct = 0;
      for (const auto& s : series) distinct = std::max(distinct, s.x.size());
      if (distinct < 2) continue;
      for (auto& s : series) {
        std::vector<std::size_t> idx(s.x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
        Series sorted{s.label, {}, {}};
        for (const auto i : idx) {
          sorted.x.push_back(s.x[i]);
          sorted.y.push_back(s.y[i]);
        }
        s = sorted;
      }
      write_line_chart(dir + "/mse_vs_" + axis + "_" + prob + ".svg",
                       {prob + ": best MSE vs " + axis, axis, "MSE", true, true}, series);
    }
  }

  // loss histories for up to 8 runs
  const std::string runs_dir = dir + "/runs";
  if (std::filesystem::is_directory(runs_dir)) {
    int emitted = 0;
    std::vector<std::string> run_ids;
    for (const auto& entry : std::filesystem::directory_iterator(runs_dir))
      if (entry.is_directory()) run_ids.push_back(entry.path().filename().string());
    std::sort(run_ids.begin(), run_ids.end());
    for (const auto& id : run_ids) {
      if (emitted >= 8) break;
      const std::string hpath = runs_dir + "/" + id + "/history.csv";
      CsvTable h;
      try {
        h = read_csv(hpath);
      } catch (const std::exception& e) {
        std::cerr << "report: skipping " << hpath << " (" << e.what() << ")\n";
        continue;
      }
      const int ci = h.col("iteration");
      std::vector<Series> series;
      for (const std::string name : {"loss_total", "loss_pde", "loss_ic", "loss_bc", "loss_data"}) {
        Series s{name, {}, {}};
        const int cc = h.col(name);
        for (const auto& r : h.rows) {
          const double y = parse_double(r[cc]);
          if (y > 0.0 && std::isfinite(y)) {
            s.x.push_back(parse_double(r[ci]) + 1.0);
            s.y.push_back(y);
          }
        }
        if (!s.x.empty()) series.push_back(s);
      }
      if (!series.empty())
        write_line_chart(dir + "/loss_history_" + id + ".svg",
                         {id, "iteration", "loss", false, true}, series);
      ++emitted;
    }
  }
}

}  // namespace sfpinn
