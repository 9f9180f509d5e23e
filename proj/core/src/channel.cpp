#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "dfrc/experiment.hpp"
#include "dfrc/random.hpp"

namespace dfrc {

CommChannel synthesize_channel(int taps, std::uint64_t seed, int K, double comm_loss_db, double sigma_c2) {
  if (taps < 1) throw std::invalid_argument("taps must be >= 1");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  Rng rng = derive_stream(seed, 0x636861ULL);
  std::vector<cd> h(taps);
  for (int l = 0; l < taps; ++l) {
    // -20 dB across the profile
    double pw = taps == 1 ? 1.0 : std::pow(10.0, -2.0 * l / double(taps - 1));
    h[l] = complex_normal(rng, pw);
  }
  CommChannel ch;
  ch.sigma_c2 = sigma_c2;
  ch.h.resize(K);
  for (int k = 0; k < K; ++k) {
    cd H = 0.0;
    for (int l = 0; l < taps; ++l) H += h[l] * std::polar(1.0, -2.0 * kPi * double((long long)k * l % K) / K);
    ch.h(k) = std::norm(H);
  }
  const double mean = ch.h.mean();
  if (mean > 0) ch.h *= db_to_linear(-comm_loss_db) / mean;
  else ch.h.setConstant(db_to_linear(-comm_loss_db));
  return ch;
}

CommChannel load_channel_file(const std::filesystem::path& path, int K, double sigma_c2) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read channel file '" + path.string() + "'", 0, "channel_file");
  CommChannel ch;
  ch.sigma_c2 = sigma_c2;
  ch.h = Eigen::VectorXd::Constant(K, -1.0);
  std::string raw;
  int line = 0;
  auto bad = [&](const std::string& msg) {
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + msg, line, "channel_file");
  };
  while (std::getline(f, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (s.find("k") != std::string::npos && s.find("gain") != std::string::npos) continue;
    std::istringstream in(s);
    std::string a, b;
    if (!std::getline(in, a, ',') || !std::getline(in, b)) bad("expected 'k,gain'");
    int k = 0;
    double g = 0.0;
    try {
      std::size_t pa = 0, pb = 0;
      k = std::stoi(a, &pa);
      g = std::stod(b, &pb);
      if (a.find_first_not_of(" \t\r", pa) != std::string::npos || b.find_first_not_of(" \t\r", pb) != std::string::npos)
        bad("trailing characters");
    } catch (const std::logic_error&) {
      bad("expected 'k,gain'");
    }
    if (k < 0 || k >= K) bad("subcarrier index out of range");
    if (!(g >= 0)) bad("gain must be nonnegative");
    if (ch.h(k) >= 0) bad("subcarrier " + std::to_string(k) + " listed twice");
    ch.h(k) = g;
  }
  for (int k = 0; k < K; ++k)
    if (ch.h(k) < 0) throw ConfigError("channel file misses subcarrier " + std::to_string(k), 0, "channel_file");
  return ch;
}

CommChannel make_channel(const ExperimentConfig& cfg) {
  const double n0 = cfg.ofdm.noise_density();
  if (!cfg.channel_file.empty()) return load_channel_file(cfg.channel_file, cfg.ofdm.K, n0);
  return synthesize_channel(cfg.channel_taps, cfg.channel_seed_set ? cfg.channel_seed : cfg.seed, cfg.ofdm.K,
                            cfg.ofdm.comm_loss_db, n0);
}

}  // namespace dfrc
