#include "dfrc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "dfrc/simulate.hpp"

#ifndef DFRC_VERSION
#define DFRC_VERSION "0.0.0"
#endif

namespace dfrc {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_op_curve(const std::filesystem::path& path, const std::vector<SweepPoint>& pts) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "power_dbw,op,ci95,mse_range,mse_velocity,trials,ci_lo,ci_hi,ubop,op_bessel,aubop,rate,converged\n";
  for (const auto& p : pts) {
    f << fmt(p.power_dbw) << ',' << fmt(p.sim.op_hat) << ',' << fmt(p.sim.ci95) << ',' << fmt(p.sim.mse_range_m2)
      << ',' << fmt(p.sim.mse_velocity_m2s2) << ',' << p.sim.trials << ',' << fmt(p.sim.ci_lo) << ','
      << fmt(p.sim.ci_hi) << ',' << fmt(p.ubop) << ',' << fmt(p.op_bessel) << ',' << fmt(p.aubop) << ','
      << fmt(p.rate) << ',' << (p.converged ? 1 : 0) << '\n';
  }
}

void write_allocation(const std::filesystem::path& path, const GaussianInput& g) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "k,m,pbar_R,pbar_I,sigma_R,sigma_I\n";
  char buf[256];
  for (int m = 0; m < g.M; ++m)
    for (int k = 0; k < g.K; ++k) {
      int r = g.index(0, k, m), i = g.index(1, k, m);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", k, m, g.pbar(r), g.pbar(i), g.sigma(r),
                    g.sigma(i));
      f << buf;
    }
}

}  // namespace

const char* version_string() { return DFRC_VERSION; }

std::string hash_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SweepPoint build_point(const ExperimentConfig& cfg, const CommChannel& ch, double power_dbw) {
  const OfdmConfig& o = cfg.ofdm;
  const double P = db_to_linear(power_dbw);
  const double s2 = o.radar_sigma2();
  const std::vector<double> eps = epsilon_samples(cfg.eps_samples);
  SweepPoint pt;
  pt.power_dbw = power_dbw;
  const Scheme& sc = cfg.scheme;

  if (!sc.gaussian()) {
    PowerGrid grid;
    if (sc.kind == Scheme::Kind::Psk) {
      PskResult r = optimize_psk(o, P, s2, eps, cfg.optimizer);
      grid = r.grid;
      pt.converged = r.converged;
      pt.diagnostic = r.diagnostic;
    } else {
      grid = baseline_allocation(sc.baseline, o, P, cfg.optimizer);
    }
    pt.ubop = ubop(grid, s2, eps, o.K_G);
    pt.op_bessel = op_bessel_approx(grid, s2, eps, o.K_G);
    pt.allocation = GaussianInput::from_power_grid(grid);
    pt.aubop = aubop(pt.allocation, s2, eps, o.K_G);
    return pt;
  }

  GaussianInput g;
  if (sc.kind == Scheme::Kind::GaussianOpt) {
    GaussianResult r = optimize_gaussian(o, P, s2, ch, cfg.rate_constraint, eps, cfg.optimizer);
    g = r.input;
    pt.converged = r.converged;
    pt.diagnostic = r.diagnostic;
    pt.warnings = r.warnings;
  } else if (sc.kind == Scheme::Kind::GaussianDecouple) {
    DecoupledResult r = optimize_decoupled(o, P, s2, ch, cfg.rate_constraint, eps, cfg.optimizer);
    g = r.input;
    pt.converged = r.converged;
    pt.diagnostic = r.diagnostic;
    pt.warnings = r.warnings;
  } else {
    g = baseline_gaussian(sc.baseline, o, P, ch, cfg.rate_constraint);
  }
  pt.aubop = aubop(g, s2, eps, o.K_G);
  pt.rate = achievable_rate(g.sigma, ch, o.K, o.M, o.B);
  pt.allocation = std::move(g);
  return pt;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CommChannel ch = make_channel(cfg);
  const std::size_t n = cfg.power_dbw.size();
  RunSummary out;
  out.points.resize(n);

  int workers = cfg.threads > 0 ? cfg.threads : int(std::max(1u, std::thread::hardware_concurrency()));
  const int point_workers = std::max(1, std::min(workers, int(n)));
  const int sim_threads = std::max(1, workers / point_workers);

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;
  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= n) return;
        i = next++;
      }
      try {
        SweepPoint pt = build_point(cfg, ch, cfg.power_dbw[i]);
        SymbolSource src =
            cfg.scheme.gaussian()
                ? SymbolSource::from_gaussian(pt.allocation)
                : SymbolSource::psk({pt.allocation.grid_power(), db_to_linear(cfg.power_dbw[i])}, cfg.psk_order);
        SimulationSpec spec;
        spec.amplitude = std::sqrt(cfg.ofdm.echo_gain());
        spec.sigma_n2 = cfg.ofdm.sigma_n2;
        spec.threads = sim_threads;
        pt.sim = simulate_op(cfg.ofdm, src, spec, cfg.trials, derive_seed(cfg.seed, i));
        pt.sim.snr_point = cfg.power_dbw[i];
        out.points[i] = std::move(pt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (point_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < point_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& p : out.points) out.converged = out.converged && p.converged;
  out.config_hash = hash_hex(cfg.canonical());
  std::filesystem::create_directories(cfg.out_dir);
  out.op_curve = cfg.out_dir / "op_curve.csv";
  out.allocation = cfg.out_dir / "allocation.csv";
  out.manifest = cfg.out_dir / "manifest";
  write_op_curve(out.op_curve, out.points);
  write_allocation(out.allocation, out.points.back().allocation);

  std::ofstream m(out.manifest);
  if (!m) throw std::runtime_error("cannot write " + out.manifest.string());
  m << "scenario = " << cfg.scenario << "\n"
    << "config_hash = " << out.config_hash << "\n"
    << "seed = " << cfg.seed << "\n"
    << "version = " << version_string() << "\n"
    << "scheme = " << cfg.scheme.str() << "\n"
    << "points = " << n << "\n"
    << "allocation_power_dbw = " << fmt(cfg.power_dbw.back()) << "\n"
    << "converged = " << (out.converged ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = out.points[i];
    if (!p.diagnostic.empty()) m << "diagnostic." << i << " = " << p.diagnostic << "\n";
    for (const auto& w : p.warnings) m << "warning." << i << " = " << w << "\n";
  }
  return out;
}

}  // namespace dfrc
