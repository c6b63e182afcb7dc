#pragma once

// Reference solution for u_t + u u_x + nu u_xxx = 0 on x in [-1, 1] with
// periodic boundaries and u(x, 0) = cos(pi x): Fourier pseudo-spectral
// semi-discretization (2/3-rule dealiasing) advanced by classical RK4.
// Solutions are tabulated on (x, t) slices and cached to a CSV file whose
// header pins the discretization.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfpinn {

struct KdvParams {
  int modes = 512;
  double nu = 0.0005;
  double t_end = 1.25;
  double dt = 5e-6;
  double save_dt = 0.01;
};

struct ReferenceTable {
  KdvParams params;
  std::vector<double> xs;  // modes
  std::vector<double> ts;  // slices
  std::vector<double> u;   // [it * nx + ix]

  int nx() const { return static_cast<int>(xs.size()); }
  int nt() const { return static_cast<int>(ts.size()); }
  double at(int it, int ix) const { return u[static_cast<std::size_t>(it) * nx() + ix]; }
};

namespace detail {

class KdvSolver {
 public:
  explicit KdvSolver(const KdvParams& p) : p_(p), n_(p.modes), nc_(p.modes / 2 + 1) {
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(nc_);
    fwd_ = fftw_plan_dft_r2c_1d(n_, real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n_, spec_, real_, FFTW_ESTIMATE);
    filtered_.resize(n_);
    ux_.resize(n_);
    uxxx_.resize(n_);
    k1_.resize(n_);
    k2_.resize(n_);
    k3_.resize(n_);
    k4_.resize(n_);
    tmp_.resize(n_);
    hat_.resize(nc_);
  }

  ~KdvSolver() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  KdvSolver(const KdvSolver&) = delete;
  KdvSolver& operator=(const KdvSolver&) = delete;

  ReferenceTable solve() {
    ReferenceTable table;
    table.params = p_;
    table.xs.resize(n_);
    for (int i = 0; i < n_; ++i) table.xs[i] = -1.0 + 2.0 * i / n_;

    std::vector<double> u(n_);
    for (int i = 0; i < n_; ++i) u[i] = std::cos(M_PI * table.xs[i]);

    const long steps_per_slice = std::lround(p_.save_dt / p_.dt);
    if (steps_per_slice < 1 || std::abs(steps_per_slice * p_.dt - p_.save_dt) > 1e-12)
      throw std::invalid_argument("kdv: dt must divide save_dt");
    const long slices = std::lround(p_.t_end / p_.save_dt);

    auto store = [&](double t) {
      table.ts.push_back(t);
      table.u.insert(table.u.end(), u.begin(), u.end());
    };
    store(0.0);
    for (long s = 1; s <= slices; ++s) {
      for (long q = 0; q < steps_per_slice; ++q) step(u);
      store(s * p_.save_dt);
      for (double v : u)
        if (!std::isfinite(v)) throw std::runtime_error("kdv reference solve diverged");
    }
    return table;
  }

 private:
  void rhs(const std::vector<double>& u, std::vector<double>& out) {
    for (int i = 0; i < n_; ++i) real_[i] = u[i];
    fftw_execute(fwd_);
    for (int k = 0; k < nc_; ++k) hat_[k] = {spec_[k][0] / n_, spec_[k][1] / n_};
    const int kcut = n_ / 3;
    for (int k = kcut + 1; k < nc_; ++k) hat_[k] = 0.0;

    // filtered field
    for (int k = 0; k < nc_; ++k) {
      spec_[k][0] = hat_[k].real();
      spec_[k][1] = hat_[k].imag();
    }
    fftw_execute(bwd_);
    for (int i = 0; i < n_; ++i) filtered_[i] = real_[i];

    // u_x: factor i pi k
    for (int k = 0; k < nc_; ++k) {
      const std::complex<double> d = std::complex<double>(0.0, M_PI * k) * hat_[k];
      spec_[k][0] = d.real();
      spec_[k][1] = d.imag();
    }
    fftw_execute(bwd_);
    for (int i = 0; i < n_; ++i) ux_[i] = real_[i];

    // u_xxx: factor (i pi k)^3
    for (int k = 0; k < nc_; ++k) {
      const double pk = M_PI * k;
      const std::complex<double> d = std::complex<double>(0.0, -pk * pk * pk) * hat_[k];
      spec_[k][0] = d.real();
      spec_[k][1] = d.imag();
    }
    fftw_execute(bwd_);
    for (int i = 0; i < n_; ++i) uxxx_[i] = real_[i];

    for (int i = 0; i < n_; ++i) out[i] = -filtered_[i] * ux_[i] - p_.nu * uxxx_[i];
  }

  void step(std::vector<double>& u) {
    const double dt = p_.dt;
    rhs(u, k1_);
    for (int i = 0; i < n_; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
    rhs(tmp_, k2_);
    for (int i = 0; i < n_; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
    rhs(tmp_, k3_);
    for (int i = 0; i < n_; ++i) tmp_[i] = u[i] + dt * k3_[i];
    rhs(tmp_, k4_);
    for (int i = 0; i < n_; ++i)
      u[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

  KdvParams p_;
  int n_, nc_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, bwd_;
  std::vector<double> filtered_, ux_, uxxx_, k1_, k2_, k3_, k4_, tmp_;
  std::vector<std::complex<double>> hat_;
};

}  // namespace detail

inline ReferenceTable kdv_reference_solve(const KdvParams& p = {}) {
  return detail::KdvSolver(p).solve();
}

// RMS field change under doubling the modes and halving dt, compared on the
// coarse nodes and stored slices.
inline double kdv_refinement_rms(const KdvParams& p, const ReferenceTable& base) {
  KdvParams fine = p;
  fine.modes = 2 * p.modes;
  fine.dt = 0.5 * p.dt;
  const ReferenceTable ref = detail::KdvSolver(fine).solve();
  double acc = 0.0;
  long count = 0;
  for (int it = 0; it < base.nt(); ++it) {
    for (int ix = 0; ix < base.nx(); ++ix) {
      const double d = base.at(it, ix) - ref.at(it, 2 * ix);
      acc += d * d;
      ++count;
    }
  }
  return std::sqrt(acc / count);
}

// Integral of u over the domain; exact for the periodic uniform grid.
inline double kdv_mass(const ReferenceTable& t, int it) {
  double s = 0.0;
  for (int ix = 0; ix < t.nx(); ++ix) s += t.at(it, ix);
  return s * 2.0 / t.nx();
}

inline void save_reference(const std::string& path, const ReferenceTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char head[256];
  std::snprintf(head, sizeof(head), "# kdv modes=%d nu=%.17g dt=%.17g t_end=%.17g save_dt=%.17g\n",
                t.params.modes, t.params.nu, t.params.dt, t.params.t_end, t.params.save_dt);
  out << head << "x,t,u\n";
  char row[128];
  for (int it = 0; it < t.nt(); ++it) {
    for (int ix = 0; ix < t.nx(); ++ix) {
      std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g\n", t.xs[ix], t.ts[it], t.at(it, ix));
      out << row;
    }
  }
}

inline ReferenceTable load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# kdv", 0) != 0)
    throw std::runtime_error(path + ": not a kdv reference file");
  ReferenceTable t;
  if (std::sscanf(line.c_str(), "# kdv modes=%d nu=%lg dt=%lg t_end=%lg save_dt=%lg",
                  &t.params.modes, &t.params.nu, &t.params.dt, &t.params.t_end,
                  &t.params.save_dt) != 5)
    throw std::runtime_error(path + ": bad header");
  std::getline(in, line);  // column names
  double last_t = -1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, tt, u;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &x, &tt, &u) != 3)
      throw std::runtime_error(path + ": bad row");
    if (tt != last_t) {
      t.ts.push_back(tt);
      last_t = tt;
    }
    if (t.ts.size() == 1) t.xs.push_back(x);
    t.u.push_back(u);
  }
  if (t.u.size() != t.xs.size() * t.ts.size()) throw std::runtime_error(path + ": truncated table");
  return t;
}

// Load the cache when it matches params, otherwise solve and refresh it.
inline std::shared_ptr<const ReferenceTable> kdv_reference_cached(const std::string& path,
                                                                  const KdvParams& p = {}) {
  {
    std::ifstream probe(path);
    if (probe) {
      try {
        ReferenceTable t = load_reference(path);
        if (t.params.modes == p.modes && t.params.nu == p.nu && t.params.dt == p.dt &&
            t.params.t_end == p.t_end && t.params.save_dt == p.save_dt)
          return std::make_shared<ReferenceTable>(std::move(t));
      } catch (const std::exception&) {
        // fall through and rebuild
      }
    }
  }
  ReferenceTable t = kdv_reference_solve(p);
  save_reference(path, t);
  return std::make_shared<ReferenceTable>(std::move(t));
}

}  // namespace sfpinn
