// Experiment runner for the sfpinn toolkit.
//
// Subcommands:
//   run    - train one configuration for each seed, write history + summary
//   sweep  - log-spaced sigma or lambda sweep with per-cell aggregation
//   props  - initialization-variance check suite (CSV + SVG)
//   report - render charts and a text table from a results directory
//   oracle - build or refresh the KdV reference cache
//
// Exit codes: 0 success, 1 configuration error, 2 total run failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "sfpinn/runner.hpp"

namespace {

using nlohmann::json;
using namespace sfpinn;

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  json j = json::parse(in);
  if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
  if (j.contains("variant")) cfg.variant = parse_variant(j["variant"].get<std::string>());
  if (j.contains("arch")) cfg.arch = j["arch"].get<std::string>();
  if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("iters")) cfg.iters = j["iters"].get<long>();
  if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
  if (j.contains("scale"))
    cfg.scale = j["scale"].get<std::string>() == "paper" ? Scale::Paper : Scale::Desk;
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("eval_every")) cfg.eval_every = j["eval_every"].get<long>();
  if (j.contains("grad_accum")) cfg.grad_accum = j["grad_accum"].get<int>();
  if (j.contains("sweep")) {
    cfg.sweep.axis = j["sweep"].value("axis", cfg.sweep.axis);
    cfg.sweep.lo = j["sweep"].value("min", cfg.sweep.lo);
    cfg.sweep.hi = j["sweep"].value("max", cfg.sweep.hi);
    cfg.sweep.count = j["sweep"].value("count", cfg.sweep.count);
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string tok = s.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds: needs at least one seed");
  return seeds;
}

void print_rows(const std::vector<RunRow>& rows) {
  for (const auto& r : rows) {
    std::cout << r.run_id << "  mse=" << fmt_double(r.mse) << "  pde=" << fmt_double(r.loss_pde);
    if (std::isfinite(r.physics_estimate))
      std::cout << "  estimate=" << fmt_double(r.physics_estimate);
    std::cout << "  wall=" << fmt_double(r.wall_seconds) << "s  [" << r.status << "]\n";
  }
}

int rows_exit_code(const std::vector<RunRow>& rows) {
  for (const auto& r : rows)
    if (r.status == "ok") return 0;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sinusoidal-feature PINN experiment runner"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path, seeds_str, variant_str = "sf", mode_str = "forward",
                           scale_str = "desk";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    sub->add_option("--problem", cfg.problem, "problem preset name");
    sub->add_option("--variant", variant_str, "standard | sf | ff | rf | siren");
    sub->add_option("--arch", cfg.arch, "architecture string override");
    sub->add_option("--sigma", cfg.sigma, "feature-layer weight stddev");
    sub->add_option("--lambda", cfg.lambda, "PDE loss weight enters as 1/lambda");
    sub->add_option("--seeds", seeds_str, "comma-separated seed list");
    sub->add_option("--iters", cfg.iters, "iteration count override");
    sub->add_option("--mode", mode_str, "forward | inverse-dense | inverse-sparse");
    sub->add_option("--scale", scale_str, "desk | paper");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--threads", cfg.threads, "compute threads per run (0 = auto)");
    sub->add_option("--eval-every", cfg.eval_every, "test MSE cadence in iterations");
    sub->add_option("--grad-accum", cfg.grad_accum, "loss evaluations per optimizer update");
  };

  CLI::App* c_run = app.add_subcommand("run", "train a single configuration");
  add_common(c_run);

  CLI::App* c_sweep = app.add_subcommand("sweep", "sigma or lambda sweep");
  add_common(c_sweep);
  c_sweep->add_option("--axis", cfg.sweep.axis, "sigma | lambda")->required(false);
  c_sweep->add_option("--min", cfg.sweep.lo, "axis range lower end");
  c_sweep->add_option("--max", cfg.sweep.hi, "axis range upper end");
  c_sweep->add_option("--count", cfg.sweep.count, "number of log-spaced values");
  c_sweep->add_option("--jobs", cfg.jobs, "parallel runs");

  CLI::App* c_props = app.add_subcommand("props", "initialization analysis suite");
  std::string props_out = "props";
  double draws_scale = 1.0;
  c_props->add_option("--out", props_out, "output directory");
  c_props->add_option("--draws-scale", draws_scale, "scale factor on Monte-Carlo draw counts");

  CLI::App* c_report = app.add_subcommand("report", "render charts from a results directory");
  std::string report_dir = "out";
  c_report->add_option("--in", report_dir, "results directory with summary.csv");

  CLI::App* c_oracle = app.add_subcommand("oracle", "build the KdV reference cache");
  KdvParams kp;
  std::string oracle_out = default_kdv_cache_path();
  bool no_verify = false;
  c_oracle->add_option("--out", oracle_out, "cache file path");
  c_oracle->add_option("--modes", kp.modes, "Fourier modes");
  c_oracle->add_option("--dt", kp.dt, "time step");
  c_oracle->add_option("--tend", kp.t_end, "final time");
  c_oracle->add_flag("--no-verify", no_verify, "skip the refinement convergence check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      ExperimentConfig from_file;
      apply_config_file(config_path, from_file);
      // flags already parsed into cfg win over file values
      ExperimentConfig merged = from_file;
      CLI::App* active = app.get_subcommands().front();
      auto passed = [&](const std::string& name) {
        const CLI::Option* o = active->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
      };
      if (passed("--problem")) merged.problem = cfg.problem;
      if (passed("--arch")) merged.arch = cfg.arch;
      if (passed("--sigma")) merged.sigma = cfg.sigma;
      if (passed("--lambda")) merged.lambda = cfg.lambda;
      if (passed("--iters")) merged.iters = cfg.iters;
      if (passed("--out")) merged.out_dir = cfg.out_dir;
      if (passed("--threads")) merged.threads = cfg.threads;
      if (passed("--eval-every")) merged.eval_every = cfg.eval_every;
      if (passed("--grad-accum")) merged.grad_accum = cfg.grad_accum;
      if (passed("--variant")) merged.variant = parse_variant(variant_str);
      if (passed("--mode")) merged.mode = parse_mode(mode_str);
      if (passed("--scale")) merged.scale = scale_str == "paper" ? Scale::Paper : Scale::Desk;
      if (passed("--seeds")) merged.seeds = parse_seeds(seeds_str);
      if (c_sweep->parsed()) {
        if (passed("--axis")) merged.sweep.axis = cfg.sweep.axis;
        if (passed("--min")) merged.sweep.lo = cfg.sweep.lo;
        if (passed("--max")) merged.sweep.hi = cfg.sweep.hi;
        if (passed("--count")) merged.sweep.count = cfg.sweep.count;
        if (passed("--jobs")) merged.jobs = cfg.jobs;
      }
      cfg = merged;
    } else {
      cfg.variant = parse_variant(variant_str);
      cfg.mode = parse_mode(mode_str);
      cfg.scale = scale_str == "paper" ? Scale::Paper : Scale::Desk;
      if (!seeds_str.empty()) cfg.seeds = parse_seeds(seeds_str);
    }

    if (c_run->parsed()) {
      const auto rows = run_single(cfg);
      print_rows(rows);
      return rows_exit_code(rows);
    }
    if (c_sweep->parsed()) {
      const auto result = run_sweep(cfg);
      print_rows(result.rows);
      std::cout << result.cells.size() << " cells aggregated into " << cfg.out_dir
                << "/aggregate.csv\n";
      return rows_exit_code(result.rows);
    }
    if (c_props->parsed()) {
      run_props(props_out, draws_scale);
      std::cout << "proposition suite written to " << props_out << "\n";
      return 0;
    }
    if (c_report->parsed()) {
      run_report(report_dir);
      std::cout << "report written to " << report_dir << "\n";
      return 0;
    }
    if (c_oracle->parsed()) {
      const auto table = kdv_reference_cached(oracle_out, kp);
      std::cout << "cache at " << oracle_out << ": " << table->nx() << " x " << table->nt()
                << " nodes\n";
      if (!no_verify) {
        const double rms = kdv_refinement_rms(kp, *table);
        std::cout << "refinement rms " << fmt_double(rms) << (rms <= 1e-6 ? " (converged)" : "")
                  << "\n";
        if (rms > 1e-6) {
          std::cerr << "oracle failure: field changes by more than 1e-6 RMS under refinement\n";
          return 2;
        }
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
