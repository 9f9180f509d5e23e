#include <algorithm>
#include <cmath>
#include <sstream>

#include "aubop_model.hpp"
#include "dfrc/opt.hpp"
#include "dfrc/solvers.hpp"

namespace dfrc {

namespace {

// Rate of the lifted variances sigma = p_m sigma_K, and the per-entry lower
// bound sum_m log(1 + c_m x) >= f1 log(1 + G x) + f2 with G = max_m c_m,
// tight at x0. Valid because log(1 + c (e^y - 1)/G) is convex in y for c <= G.
struct LiftedRate {
  int K, M;
  Eigen::VectorXd p;   // normalized symbol powers
  Eigen::VectorXd Ck;  // per-subcarrier gains, budget-normalized

  double exact(const Eigen::VectorXd& sK) const {
    double acc = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) acc += std::log2(1.0 + Ck(k) * p(m) * sK(c * K + k));
    return acc / (2.0 * K * M);
  }

  WaterfillProblem surrogate(const Eigen::VectorXd& x0, const Eigen::VectorXd& cap, const Eigen::VectorXd& beta,
                             double target) const {
    const double pmax = p.maxCoeff();
    const double norm = 1.0 / (2.0 * K * M);
    WaterfillProblem w;
    w.cap = cap;
    w.beta = beta;
    w.gains.resize(2 * K);
    w.weights.resize(2 * K);
    w.offset = 0.0;
    w.target = target;
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < K; ++k) {
        const int q = c * K + k;
        const double G = Ck(k) * pmax;
        w.gains(q) = G;
        if (G <= 0) {
          w.weights(q) = 0.0;
          continue;
        }
        double f1 = 0.0, exact = 0.0;
        for (int m = 0; m < M; ++m) {
          const double c1 = Ck(k) * p(m);
          f1 += (p(m) / pmax) * (1.0 + G * x0(q)) / (1.0 + c1 * x0(q));
          exact += std::log2(1.0 + c1 * x0(q));
        }
        f1 *= norm;
        w.weights(q) = f1;
        w.offset += norm * exact - f1 * std::log2(1.0 + G * x0(q));
      }
    return w;
  }
};

// Largest exact rate with the whole budget in sigma_K (sum <= 1): bisection on
// the budget multiplier, each entry solving its own monotone stationarity
// condition.
Eigen::VectorXd max_rate_profile(const LiftedRate& r) {
  const int n = 2 * r.K;
  auto entry = [&](int q, double lambda) {
    const double ck = r.Ck(q % r.K);
    auto deriv = [&](double x) {
      double d = 0.0;
      for (int m = 0; m < r.M; ++m) d += ck * r.p(m) / (1.0 + ck * r.p(m) * x);
      return d;
    };
    if (deriv(0.0) <= lambda) return 0.0;
    if (deriv(1.0) >= lambda) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) > lambda ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto profile = [&](double lambda) {
    Eigen::VectorXd x(n);
    for (int q = 0; q < n; ++q) x(q) = entry(q, lambda);
    return x;
  };
  double lo = 0.0, hi = 0.0;
  for (int q = 0; q < r.K; ++q) hi = std::max(hi, r.Ck(q) * r.p.sum());
  if (!(hi > 0)) return Eigen::VectorXd::Zero(n);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (profile(mid).sum() > 1.0 ? lo : hi) = mid;
  }
  return profile(hi);
}

[[noreturn]] void infeasible(double R_c, double mr) {
  std::ostringstream os;
  os << "rate constraint " << R_c << " bits/s/Hz is infeasible for the decoupled structure; "
     << "the budget supports at most " << mr;
  throw InfeasibleRate(os.str(), mr);
}

}  // namespace

DecoupledResult optimize_decoupled(const OfdmConfig& cfg, double P_max, double sigma2, const CommChannel& ch,
                                   double R_c, const std::vector<double>& eps_set, const OptimizerOptions& opts) {
  if (!(P_max > 0)) throw std::invalid_argument("P_max must be positive");
  if (R_c < 0) throw std::invalid_argument("rate constraint must be nonnegative");
  if (ch.h.size() != cfg.K) throw std::invalid_argument("channel length differs from K");
  const int K = cfg.K, M = cfg.M, KM = K * M;
  const double full_max = max_rate(cfg, ch, P_max);
  if (R_c > full_max * (1.0 + 1e-12)) infeasible(R_c, full_max);

  DecoupledResult res;
  PskResult psk = optimize_psk(cfg, P_max, sigma2, eps_set, opts);
  const Eigen::VectorXd p = psk.p_m / psk.p_m.sum();

  Eigen::MatrixXd LR = Eigen::MatrixXd::Zero(KM, 2 * K), LI = Eigen::MatrixXd::Zero(KM, 2 * K);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) {
      LR(m * K + k, k) = p(m);
      LI(m * K + k, K + k) = p(m);
    }
  const detail::Lift lift = detail::Lift::dense(LR, LI);
  LiftedRate rate{K, M, p, ch.rate_gains(M, cfg.B).head(K) * P_max};

  // smallest variance profile meeting R_c, found by SCP down from the
  // max-rate profile, then the rest of the budget to the means
  Eigen::VectorXd sK = Eigen::VectorXd::Zero(2 * K);
  if (R_c > 0) {
    sK = max_rate_profile(rate);
    const double mr = rate.exact(sK);
    if (R_c > mr * (1.0 + 1e-12)) infeasible(R_c, mr);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2 * K);
    for (int t = 0; t < opts.scp_max_iter; ++t) {
      WaterfillResult wr;
      try {
        wr = waterfill_bisection(rate.surrogate(sK, ones, ones, R_c));
      } catch (const WaterfillInfeasible&) {
        break;
      }
      const double change = (wr.sigma - sK).norm();
      sK = wr.sigma;
      if (change <= opts.eps_s * sK.norm()) break;
    }
  }
  Eigen::VectorXd pK = sK.array() + std::max(0.0, 1.0 - sK.sum()) / (2.0 * K);

  detail::AubopModel model(K, cfg.K_G, M, eps_set, sigma2 / P_max);
  detail::AubopModel::Point pt = model.evaluate(lift.apply(pK), lift.apply(sK));
  res.trace.push_back(pt.value);
  if (model.peak_exponent(pt) > 1.0) {
    std::ostringstream os;
    os << "peak exponent " << model.peak_exponent(pt) << " exceeds 1; the low-SNR surrogate may be loose";
    res.warnings.push_back(os.str());
  }

  int it = 0;
  for (; it < opts.bcd_max_iter; ++it) {
    const double before = pt.value;
    detail::pbar_block(model, lift, pK, sK, pt, opts);
    const Eigen::VectorXd pbar = lift.apply(pK);
    for (int t = 0; t < opts.scp_max_iter; ++t) {
      WaterfillProblem wp = rate.surrogate(sK, pK, pK - sK, R_c);
      WaterfillResult wr = waterfill_bisection(wp);
      Eigen::VectorXd cand = wr.sigma.cwiseMin(pK);
      detail::AubopModel::Point np = model.evaluate(pbar, lift.apply(cand));
      if (!(np.value <= pt.value)) break;
      const double gain = pt.value - np.value;
      res.surrogate_rate.push_back(wp.rate(cand));
      res.exact_rate.push_back(rate.exact(cand));
      sK = std::move(cand);
      pt = std::move(np);
      if (gain <= opts.eps_s * std::max(std::abs(pt.value), 1e-300)) break;
    }
    res.trace.push_back(pt.value);
    if (std::abs(before - pt.value) < opts.eps_s * std::max(std::abs(pt.value), 1e-300)) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;
  if (!res.converged) {
    std::ostringstream os;
    os << "BCD stopped at the iteration cap (" << opts.bcd_max_iter << ")";
    res.diagnostic = os.str();
  }
  if (!psk.converged) {
    res.converged = false;
    res.diagnostic += (res.diagnostic.empty() ? "" : "; ") + psk.diagnostic;
  }

  const double total = pK.sum();
  if (pt.value < 0 && total > 0 && total < 1.0) {
    pK /= total;
    sK /= total;
    pt = model.evaluate(lift.apply(pK), lift.apply(sK));
    res.trace.back() = pt.value;
  }
  res.p = psk.p_m;
  res.pbar_K = pK;
  res.sigma_K = sK.cwiseMin(pK).cwiseMax(0.0);
  res.input = GaussianInput(K, M);
  res.input.pbar = lift.apply(pK) * P_max;
  res.input.sigma = lift.apply(res.sigma_K) * P_max;
  return res;
}

}  // namespace dfrc
