// dfrc: run delay-Doppler outlier experiments from a config file.
//
//   dfrc run configs/op_bounds.conf [--out DIR] [--threads N]
//   dfrc check-config configs/op_bounds.conf

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dfrc/experiment.hpp"
#include "dfrc/solvers.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;

void print_summary(const dfrc::RunSummary& s) {
  std::printf("%10s %10s %10s %12s %12s %12s\n", "power_dbw", "op", "ci95", "ubop", "op_bessel", "aubop");
  for (const auto& p : s.points)
    std::printf("%10.3f %10.4g %10.3g %12.4g %12.4g %12.4g\n", p.power_dbw, p.sim.op_hat, p.sim.ci95, p.ubop,
                p.op_bessel, p.aubop);
  std::printf("wrote %s, %s, %s\n", s.op_curve.c_str(), s.allocation.c_str(), s.manifest.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM DFRC input-distribution optimizer and outlier-probability simulator"};
  app.set_version_flag("--version", std::string(dfrc::version_string()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = -1;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "optimize, evaluate and simulate every sweep point");
  run->add_option("config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides out_dir)");
  run->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "no summary table");

  auto* check = app.add_subcommand("check-config", "parse and validate a config file");
  check->add_option("config", config_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  dfrc::ExperimentConfig cfg;
  try {
    cfg = dfrc::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads >= 0) cfg.threads = threads;
    cfg.validate();
    if (cfg.scheme.gaussian()) dfrc::make_channel(cfg);
  } catch (const dfrc::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  }

  if (*check) {
    std::cout << cfg.canonical() << "config_hash=" << dfrc::hash_hex(cfg.canonical()) << "\n";
    return kOk;
  }

  try {
    dfrc::RunSummary s = dfrc::run_experiment(cfg);
    if (!quiet) print_summary(s);
    if (!s.converged) {
      std::cerr << "warning: an optimizer hit its iteration cap; see " << s.manifest.string() << "\n";
      return kNotConverged;
    }
  } catch (const dfrc::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const dfrc::InfeasibleRate& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
