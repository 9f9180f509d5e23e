#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/grid.hpp"
#include "dfrc/metrics.hpp"
#include "dfrc/opt.hpp"

namespace dfrc {

struct ConfigError : std::runtime_error {
  int line = 0;        // 0 when not tied to a line
  std::string key;     // empty when not tied to a key
  ConfigError(const std::string& what, int line_no, std::string key_name = {})
      : std::runtime_error(what), line(line_no), key(std::move(key_name)) {}
};

struct Scheme {
  enum class Kind { Psk, GaussianOpt, GaussianDecouple, Baseline, BaselineGaussian };
  Kind kind = Kind::Psk;
  BaselineKind baseline = BaselineKind::Uniform;

  static Scheme parse(const std::string& s);
  std::string str() const;
  bool gaussian() const {
    return kind == Kind::GaussianOpt || kind == Kind::GaussianDecouple || kind == Kind::BaselineGaussian;
  }
};

struct ExperimentConfig {
  std::string scenario = "experiment";
  OfdmConfig ofdm;
  Scheme scheme;
  std::vector<double> power_dbw;
  double rate_constraint = 0.0;
  std::filesystem::path channel_file;
  int channel_taps = 18;
  std::uint64_t channel_seed = 0;
  bool channel_seed_set = false;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  int eps_samples = 8;
  int psk_order = 2;
  int threads = 0;
  std::filesystem::path out_dir = ".";
  OptimizerOptions optimizer;

  // key = value listing with every field, used for hashing
  std::string canonical() const;
  void validate() const;
};

// Line-based "key = value" with '#' comments.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

// Exponential power-delay profile, last tap 20 dB below the first, mean
// subcarrier gain normalized to the comm path loss.
CommChannel synthesize_channel(int taps, std::uint64_t seed, int K, double comm_loss_db, double sigma_c2);
// rows "k,gain" with linear power gains
CommChannel load_channel_file(const std::filesystem::path& path, int K, double sigma_c2);
CommChannel make_channel(const ExperimentConfig& cfg);

struct SweepPoint {
  double power_dbw = 0.0;
  ExperimentResult sim;
  double ubop = std::nan("");
  double op_bessel = std::nan("");
  double aubop = std::nan("");
  double rate = 0.0;
  bool converged = true;
  std::string diagnostic;
  std::vector<std::string> warnings;
  GaussianInput allocation;
};

struct RunSummary {
  std::vector<SweepPoint> points;
  bool converged = true;
  std::string config_hash;
  std::filesystem::path op_curve, allocation, manifest;
};

// Optimize, evaluate and simulate every sweep point, then write
// op_curve.csv, allocation.csv and manifest into cfg.out_dir.
RunSummary run_experiment(const ExperimentConfig& cfg);

// input distribution for one sweep point
SweepPoint build_point(const ExperimentConfig& cfg, const CommChannel& ch, double power_dbw);

std::string hash_hex(const std::string& s);
const char* version_string();

}  // namespace dfrc
