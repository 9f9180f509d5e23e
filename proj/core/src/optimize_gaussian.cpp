#include <cmath>
#include <sstream>

#include "aubop_model.hpp"
#include "dfrc/opt.hpp"
#include "dfrc/solvers.hpp"

namespace dfrc {

namespace {

bool is_symmetric(const Eigen::VectorXd& v, int KM) { return v.head(KM) == v.tail(KM); }

// SCP on the variance block with the exact rate constraint.
void sigma_block(const detail::AubopModel& model, const Eigen::VectorXd& pbar, Eigen::VectorXd& sigma,
                 const Eigen::VectorXd& gains, double R_c, detail::AubopModel::Point& pt,
                 const OptimizerOptions& opts) {
  for (int t = 0; t < opts.scp_max_iter; ++t) {
    Eigen::VectorXd beta = 2.0 * (pbar - sigma);
    WaterfillResult wr = waterfill_bisection(rate_waterfill(pbar, beta, gains, R_c));
    Eigen::VectorXd cand = wr.sigma.cwiseMin(pbar);
    detail::AubopModel::Point np = model.evaluate(pbar, cand);
    if (!(np.value <= pt.value)) break;
    const double gain = pt.value - np.value;
    sigma = std::move(cand);
    pt = std::move(np);
    if (gain <= opts.eps_s * std::max(std::abs(pt.value), 1e-300)) break;
  }
}

}  // namespace

GaussianResult optimize_gaussian(const OfdmConfig& cfg, double P_max, double sigma2, const CommChannel& ch,
                                 double R_c, const std::vector<double>& eps_set, const OptimizerOptions& opts) {
  if (!(P_max > 0)) throw std::invalid_argument("P_max must be positive");
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
  if (eps_set.empty()) throw std::invalid_argument("eps set is empty");
  const int K = cfg.K, M = cfg.M, KM = K * M;

  GaussianInput start = baseline_gaussian(BaselineKind::Rmi, cfg, P_max, ch, R_c);
  Eigen::VectorXd pbar = start.pbar / P_max;
  Eigen::VectorXd sigma = start.sigma / P_max;
  const Eigen::VectorXd gains = ch.rate_gains(M, cfg.B) * P_max;

  detail::AubopModel model(K, cfg.K_G, M, eps_set, sigma2 / P_max);
  detail::AubopModel::Point pt = model.evaluate(pbar, sigma);

  GaussianResult res;
  res.trace.push_back(pt.value);
  if (model.peak_exponent(pt) > 1.0) {
    std::ostringstream os;
    os << "peak exponent " << model.peak_exponent(pt) << " exceeds 1; the low-SNR surrogate may be loose";
    res.warnings.push_back(os.str());
  }

  int it = 0;
  for (; it < opts.bcd_max_iter; ++it) {
    const double before = pt.value;
    if (is_symmetric(pbar, KM) && is_symmetric(sigma, KM)) {
      Eigen::VectorXd y = pbar.head(KM);
      detail::pbar_block(model, detail::Lift::symmetric(KM), y, sigma.head(KM), pt, opts);
      pbar << y, y;
    } else {
      detail::pbar_block(model, detail::Lift::full(KM), pbar, sigma, pt, opts);
    }
    sigma_block(model, pbar, sigma, gains, R_c, pt, opts);
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

  // aUBOP is homogeneous of degree one, so a negative value improves by
  // spending any leftover budget; scaling up also keeps the rate feasible
  const double total = pbar.sum();
  if (pt.value < 0 && total > 0 && total < 1.0) {
    pbar /= total;
    sigma /= total;
    pt = model.evaluate(pbar, sigma);
    res.trace.back() = pt.value;
  }
  res.input = GaussianInput(K, M);
  res.input.pbar = pbar * P_max;
  res.input.sigma = sigma.cwiseMin(pbar).cwiseMax(0.0) * P_max;
  return res;
}

}  // namespace dfrc
