#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfrc/bessel.hpp"
#include "dfrc/opt.hpp"
#include "dfrc/solvers.hpp"

namespace dfrc {

BaselineKind parse_baseline_kind(const std::string& s) {
  if (s == "uniform") return BaselineKind::Uniform;
  if (s == "hamming") return BaselineKind::Hamming;
  if (s == "kaiser") return BaselineKind::Kaiser;
  if (s == "rmi") return BaselineKind::Rmi;
  if (s == "crb") return BaselineKind::Crb;
  throw std::invalid_argument("unknown baseline kind '" + s + "'");
}

std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::Uniform: return "uniform";
    case BaselineKind::Hamming: return "hamming";
    case BaselineKind::Kaiser: return "kaiser";
    case BaselineKind::Rmi: return "rmi";
    case BaselineKind::Crb: return "crb";
  }
  return "?";
}

Eigen::VectorXd hamming_window(int M) {
  Eigen::VectorXd w(M);
  if (M == 1) return Eigen::VectorXd::Ones(1);
  for (int m = 0; m < M; ++m) w(m) = 0.54 - 0.46 * std::cos(2.0 * kPi * m / (M - 1));
  return w;
}

Eigen::VectorXd kaiser_window(int M, double beta) {
  Eigen::VectorXd w(M);
  if (M == 1) return Eigen::VectorXd::Ones(1);
  const double norm = log_bessel_i0(beta);
  for (int m = 0; m < M; ++m) {
    double x = 2.0 * m / (M - 1) - 1.0;
    w(m) = std::exp(log_bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - x * x))) - norm);
  }
  return w;
}

PowerGrid baseline_allocation(BaselineKind kind, const OfdmConfig& cfg, double P_max, const OptimizerOptions& opts) {
  const int K = cfg.K, M = cfg.M;
  switch (kind) {
    case BaselineKind::Uniform:
    case BaselineKind::Rmi:
      return PowerGrid::uniform(K, M, P_max);
    case BaselineKind::Hamming:
    case BaselineKind::Kaiser: {
      Eigen::VectorXd w = kind == BaselineKind::Hamming ? hamming_window(M) : kaiser_window(M, opts.kaiser_beta);
      return PowerGrid::spread(w * (P_max / w.sum()), K, P_max);
    }
    case BaselineKind::Crb: {
      PowerGrid g{Eigen::MatrixXd::Zero(K, M), P_max};
      if (K == 1) {
        g.values.row(0).setConstant(P_max / M);
      } else {
        g.values.row(0).setConstant(0.5 * P_max / M);
        g.values.row(K - 1).setConstant(0.5 * P_max / M);
      }
      return g;
    }
  }
  throw std::invalid_argument("unknown baseline kind");
}

double max_rate(const OfdmConfig& cfg, const CommChannel& ch, double P_max) {
  Eigen::VectorXd gains = ch.rate_gains(cfg.M, cfg.B);
  return achievable_rate(waterfill_sum_power(gains, P_max), ch, cfg.K, cfg.M, cfg.B);
}

GaussianInput baseline_gaussian(BaselineKind kind, const OfdmConfig& cfg, double P_max, const CommChannel& ch,
                                double R_c) {
  const int K = cfg.K, M = cfg.M, n = 2 * K * M;
  if (ch.h.size() != K) throw std::invalid_argument("channel length differs from K");
  if (R_c < 0) throw std::invalid_argument("rate constraint must be nonnegative");
  Eigen::VectorXd gains = ch.rate_gains(M, cfg.B);
  GaussianInput g(K, M);
  if (R_c > 0) {
    WaterfillProblem wp = rate_waterfill(Eigen::VectorXd::Constant(n, P_max), Eigen::VectorXd::Ones(n), gains, R_c);
    WaterfillResult wr;
    try {
      wr = waterfill_bisection(wp);
    } catch (const WaterfillInfeasible&) {
      double mr = max_rate(cfg, ch, P_max);
      std::ostringstream os;
      os << "rate constraint " << R_c << " bits/s/Hz is infeasible; the budget supports at most " << mr;
      throw InfeasibleRate(os.str(), mr);
    }
    g.sigma = wr.sigma;
  }
  const double used = g.sigma.sum();
  if (used > P_max * (1.0 + 1e-12)) {
    double mr = max_rate(cfg, ch, P_max);
    std::ostringstream os;
    os << "rate constraint " << R_c << " bits/s/Hz is infeasible; the budget supports at most " << mr;
    throw InfeasibleRate(os.str(), mr);
  }
  if (used > P_max) g.sigma *= P_max / used;
  const double residual = std::max(0.0, P_max - g.sigma.sum());
  PowerGrid shape = baseline_allocation(kind, cfg, 1.0);
  g.pbar = g.sigma;
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      double add = 0.5 * residual * shape.values(k, m) / shape.total();
      g.pbar(g.index(0, k, m)) += add;
      g.pbar(g.index(1, k, m)) += add;
    }
  return g;
}

}  // namespace dfrc
