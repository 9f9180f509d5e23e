#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dfrc/experiment.hpp"

namespace dfrc {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v, int line) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + v + "'", line, key);
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("line " + std::to_string(line) + ": empty entry in '" + key + "'", line, key);
    out.push_back(parse_number<double>(key, item, line));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = [] {
    std::map<std::string, Setter> m;
#define DFRC_DOUBLE(key, expr) \
  m[key] = [](ExperimentConfig& c, const std::string& v, int line) { expr = parse_number<double>(key, v, line); }
#define DFRC_INT(key, expr) \
  m[key] = [](ExperimentConfig& c, const std::string& v, int line) { expr = parse_number<int>(key, v, line); }
    DFRC_INT("K", c.ofdm.K);
    DFRC_INT("K_G", c.ofdm.K_G);
    DFRC_INT("M", c.ofdm.M);
    DFRC_DOUBLE("bandwidth_hz", c.ofdm.B);
    DFRC_DOUBLE("carrier_hz", c.ofdm.f_c);
    DFRC_DOUBLE("noise_density_dbw_hz", c.ofdm.noise_density_dbw_hz);
    DFRC_DOUBLE("radar_loss_db", c.ofdm.radar_loss_db);
    DFRC_DOUBLE("comm_loss_db", c.ofdm.comm_loss_db);
    DFRC_DOUBLE("rcs_dbsm", c.ofdm.rcs_dbsm);
    DFRC_DOUBLE("rate_constraint_bps_hz", c.rate_constraint);
    DFRC_INT("eps_samples", c.eps_samples);
    DFRC_INT("channel_taps", c.channel_taps);
    DFRC_INT("psk_order", c.psk_order);
    DFRC_INT("threads", c.threads);
    DFRC_DOUBLE("optimizer.eps_s", c.optimizer.eps_s);
    DFRC_INT("optimizer.scp_max_iter", c.optimizer.scp_max_iter);
    DFRC_INT("optimizer.admm_max_iter", c.optimizer.admm_max_iter);
    DFRC_INT("optimizer.bcd_max_iter", c.optimizer.bcd_max_iter);
    DFRC_DOUBLE("optimizer.rho", c.optimizer.rho);
    DFRC_DOUBLE("optimizer.rho_scale", c.optimizer.rho_scale);
    DFRC_DOUBLE("optimizer.primal_tol", c.optimizer.primal_tol);
    DFRC_DOUBLE("optimizer.kaiser_beta", c.optimizer.kaiser_beta);
    DFRC_DOUBLE("optimizer.qp_tol", c.optimizer.qp_tol);
    DFRC_DOUBLE("optimizer.g_floor", c.optimizer.g_floor);
#undef DFRC_DOUBLE
#undef DFRC_INT
    m["scenario"] = [](ExperimentConfig& c, const std::string& v, int) { c.scenario = v; };
    m["scheme"] = [](ExperimentConfig& c, const std::string& v, int line) {
      try {
        c.scheme = Scheme::parse(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line, "scheme");
      }
    };
    m["power_dbw_list"] = [](ExperimentConfig& c, const std::string& v, int line) {
      c.power_dbw = parse_list("power_dbw_list", v, line);
    };
    m["trials"] = [](ExperimentConfig& c, const std::string& v, int line) {
      long long t = parse_number<long long>("trials", v, line);
      if (t < 0) throw ConfigError("line " + std::to_string(line) + ": trials must be positive", line, "trials");
      c.trials = std::size_t(t);
    };
    m["seed"] = [](ExperimentConfig& c, const std::string& v, int line) {
      c.seed = parse_number<std::uint64_t>("seed", v, line);
    };
    m["channel_seed"] = [](ExperimentConfig& c, const std::string& v, int line) {
      c.channel_seed = parse_number<std::uint64_t>("channel_seed", v, line);
      c.channel_seed_set = true;
    };
    m["channel_file"] = [](ExperimentConfig& c, const std::string& v, int) { c.channel_file = v; };
    m["out_dir"] = [](ExperimentConfig& c, const std::string& v, int) { c.out_dir = v; };
    return m;
  }();
  return s;
}

const char* kRequired[] = {"K", "K_G", "M", "bandwidth_hz", "carrier_hz", "scheme", "power_dbw_list", "trials", "seed"};

}  // namespace

Scheme Scheme::parse(const std::string& s) {
  Scheme sc;
  if (s == "psk") {
    sc.kind = Kind::Psk;
  } else if (s == "gaussian-opt") {
    sc.kind = Kind::GaussianOpt;
  } else if (s == "gaussian-decouple") {
    sc.kind = Kind::GaussianDecouple;
  } else if (s.rfind("baseline:", 0) == 0) {
    sc.kind = Kind::Baseline;
    sc.baseline = parse_baseline_kind(s.substr(9));
  } else if (s.rfind("baseline-gaussian:", 0) == 0) {
    sc.kind = Kind::BaselineGaussian;
    sc.baseline = parse_baseline_kind(s.substr(18));
  } else {
    throw std::invalid_argument("unknown scheme '" + s + "'");
  }
  return sc;
}

std::string Scheme::str() const {
  switch (kind) {
    case Kind::Psk: return "psk";
    case Kind::GaussianOpt: return "gaussian-opt";
    case Kind::GaussianDecouple: return "gaussian-decouple";
    case Kind::Baseline: return "baseline:" + to_string(baseline);
    case Kind::BaselineGaussian: return "baseline-gaussian:" + to_string(baseline);
  }
  return "?";
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "scenario=" << scenario << "\nK=" << ofdm.K << "\nK_G=" << ofdm.K_G << "\nM=" << ofdm.M
     << "\nbandwidth_hz=" << ofdm.B << "\ncarrier_hz=" << ofdm.f_c
     << "\nnoise_density_dbw_hz=" << ofdm.noise_density_dbw_hz << "\nradar_loss_db=" << ofdm.radar_loss_db
     << "\ncomm_loss_db=" << ofdm.comm_loss_db << "\nrcs_dbsm=" << ofdm.rcs_dbsm << "\nscheme=" << scheme.str()
     << "\npower_dbw_list=";
  for (std::size_t i = 0; i < power_dbw.size(); ++i) os << (i ? "," : "") << power_dbw[i];
  os << "\nrate_constraint_bps_hz=" << rate_constraint << "\nchannel_file=" << channel_file.string()
     << "\nchannel_taps=" << channel_taps << "\nchannel_seed=" << (channel_seed_set ? channel_seed : seed)
     << "\ntrials=" << trials << "\nseed=" << seed << "\neps_samples=" << eps_samples
     << "\npsk_order=" << psk_order << "\noptimizer.eps_s=" << optimizer.eps_s
     << "\noptimizer.scp_max_iter=" << optimizer.scp_max_iter
     << "\noptimizer.admm_max_iter=" << optimizer.admm_max_iter
     << "\noptimizer.bcd_max_iter=" << optimizer.bcd_max_iter << "\noptimizer.rho=" << optimizer.rho
     << "\noptimizer.rho_scale=" << optimizer.rho_scale << "\noptimizer.primal_tol=" << optimizer.primal_tol
     << "\noptimizer.kaiser_beta=" << optimizer.kaiser_beta << "\noptimizer.qp_tol=" << optimizer.qp_tol
     << "\noptimizer.g_floor=" << optimizer.g_floor << "\n";
  return os.str();
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg, 0, key); };
  try {
    ofdm.validate();
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    std::string key = what.substr(0, what.find(' '));
    fail(key, what);
  }
  if (power_dbw.empty()) fail("power_dbw_list", "the sweep is empty");
  if (trials == 0) fail("trials", "must be at least 1");
  if (eps_samples < 1) fail("eps_samples", "must be at least 1");
  if (psk_order < 1) fail("psk_order", "must be at least 1");
  if (threads < 0) fail("threads", "must be nonnegative");
  if (rate_constraint < 0) fail("rate_constraint_bps_hz", "must be nonnegative");
  if (channel_taps < 1) fail("channel_taps", "must be at least 1");
  if (!channel_file.empty() && !std::filesystem::exists(channel_file))
    fail("channel_file", "file '" + channel_file.string() + "' does not exist");
  if (optimizer.eps_s <= 0) fail("optimizer.eps_s", "must be positive");
  if (optimizer.scp_max_iter < 1) fail("optimizer.scp_max_iter", "must be at least 1");
  if (optimizer.admm_max_iter < 1) fail("optimizer.admm_max_iter", "must be at least 1");
  if (optimizer.bcd_max_iter < 1) fail("optimizer.bcd_max_iter", "must be at least 1");
  if (optimizer.rho < 0) fail("optimizer.rho", "must be nonnegative");
  if (optimizer.rho_scale <= 0) fail("optimizer.rho_scale", "must be positive");
  if (optimizer.qp_tol <= 0) fail("optimizer.qp_tol", "must be positive");
  if (optimizer.g_floor <= 0) fail("optimizer.g_floor", "must be positive");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key", line);
    if (value.empty())
      throw ConfigError("line " + std::to_string(line) + ": missing value for '" + key + "'", line, key);
    auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' (first set on line " +
                            std::to_string(prev->second) + ")",
                        line, key);
    seen[key] = line;
    it->second(cfg, value, line);
  }
  for (const char* k : kRequired)
    if (!seen.count(k)) throw ConfigError(std::string("missing required key '") + k + "'", 0, k);
  if (seen.count("channel_file") && seen.count("channel_taps"))
    throw ConfigError("channel_file and channel_taps are mutually exclusive", seen["channel_taps"], "channel_taps");
  if (!cfg.channel_file.empty() && cfg.channel_file.is_relative()) cfg.channel_file = base_dir / cfg.channel_file;
  if (cfg.out_dir.is_relative() && seen.count("out_dir")) cfg.out_dir = base_dir / cfg.out_dir;
  cfg.ofdm.sigma_n2 = cfg.ofdm.noise_density() * cfg.ofdm.B / std::max(cfg.ofdm.K, 1);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path.string() + "'", 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace dfrc
