#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dfrc/opt.hpp"
#include "dfrc/solvers.hpp"

namespace dfrc {

namespace {

// Objective of the spread grid as a function of the stacked Doppler AF
// magnitudes a_{l,v}; rows l*M + (v + M/2). Every term carries exp(-shift)
// so high-SNR instances stay representable.
struct PskObjective {
  int M, K_G, L;
  double two_s2;
  double shift = 0.0;

  double largest_exponent(const Eigen::VectorXd& a) const {
    double e = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < L; ++l) {
      const double a0 = a(l * M + M / 2);
      if (K_G > 1) e = std::max(e, -a0 / two_s2);
      for (int vi = 0; vi < M; ++vi)
        if (vi != M / 2) e = std::max(e, -(a0 - a(l * M + vi)) / two_s2);
    }
    return e;
  }

  double value(const Eigen::VectorXd& a) const {
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const double a0 = a(l * M + M / 2);
      acc += double(K_G - 1) * M * std::exp(-a0 / two_s2 - shift);
      for (int vi = 0; vi < M; ++vi)
        if (vi != M / 2) acc += std::exp(-(a0 - a(l * M + vi)) / two_s2 - shift);
    }
    return acc / (2.0 * L);
  }

  // first derivative in each magnitude
  Eigen::VectorXd slope(const Eigen::VectorXd& a) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(a.size());
    const double c = 1.0 / (2.0 * L * two_s2);
    for (int l = 0; l < L; ++l) {
      const double a0 = a(l * M + M / 2);
      double peak = double(K_G - 1) * M * std::exp(-a0 / two_s2 - shift);
      for (int vi = 0; vi < M; ++vi) {
        if (vi == M / 2) continue;
        double t = std::exp(-(a0 - a(l * M + vi)) / two_s2 - shift);
        g(l * M + vi) = c * t;
        peak += t;
      }
      g(l * M + M / 2) = -c * peak;
    }
    return g;
  }

  // curvature scale for the penalty: radial second derivative, or the
  // tangential one of the magnitude terms when that is larger
  double curvature(const Eigen::VectorXd& a) const {
    const Eigen::VectorXd g = slope(a);
    return std::max(g.cwiseAbs().maxCoeff() / two_s2, g.norm() / std::max(a.norm(), 1e-300));
  }
};

}  // namespace

PskResult optimize_psk(const OfdmConfig& cfg, double P_max, double sigma2, const std::vector<double>& eps_set,
                       const OptimizerOptions& opts) {
  if (!(P_max > 0)) throw std::invalid_argument("P_max must be positive");
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
  if (eps_set.empty()) throw std::invalid_argument("eps set is empty");
  const int M = cfg.M, L = int(eps_set.size());
  const int J = L * M;

  // budget normalized to 1
  PskObjective obj{M, cfg.K_G, L, 2.0 * sigma2 / P_max};
  Eigen::MatrixXcd F(J, M);
  for (int l = 0; l < L; ++l)
    for (int vi = 0; vi < M; ++vi)
      F.row(l * M + vi) = doppler_phase_vector(vi - M / 2, eps_set[l], M).transpose();
  const Eigen::MatrixXd G = (F.adjoint() * F).real();

  Eigen::VectorXd p = Eigen::VectorXd::Constant(M, 1.0 / M);
  Eigen::VectorXcd Fp = F * p;
  Eigen::VectorXcd r = Fp;
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(J);
  obj.shift = obj.largest_exponent(Fp.cwiseAbs());

  PskResult res;
  double rho = opts.rho > 0 ? opts.rho : opts.rho_scale * obj.curvature(Fp.cwiseAbs());
  const bool adapt = !(opts.rho > 0);

  QpProblem qp;
  qp.A = Eigen::MatrixXd::Ones(1, M);
  qp.b = Eigen::VectorXd::Ones(1);
  qp.lower = Eigen::VectorXd::Zero(M);
  qp.upper = Eigen::VectorXd::Constant(M, std::numeric_limits<double>::infinity());

  const double unshift = std::exp(obj.shift);
  Eigen::VectorXd best_p = p;
  double best = obj.value(Fp.cwiseAbs());
  res.trace.push_back(best * unshift);

  double last_primal = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.admm_max_iter; ++it) {
    // r-update: SCP on the magnitude objective, each step a closed-form prox
    const Eigen::VectorXcd beta = Fp - d;
    Eigen::VectorXcd rt = r;
    auto sub = [&](const Eigen::VectorXcd& x) { return obj.value(x.cwiseAbs()) + 0.5 * rho * (x - beta).squaredNorm(); };
    double ft = sub(rt);
    for (int t = 0; t < opts.scp_max_iter; ++t) {
      const Eigen::VectorXcd rn = prox_scaled_magnitude(obj.slope(rt.cwiseAbs()), beta, rho);
      // backtrack until the subproblem descends
      Eigen::VectorXcd dir = rn - rt;
      double a = 1.0, fn = sub(rt + dir);
      while (!(fn <= ft) && a > 1e-8) {
        a *= 0.5;
        fn = sub(rt + a * dir);
      }
      if (!(fn <= ft)) break;
      const double change = a * dir.norm();
      rt += a * dir;
      ft = fn;
      if (change <= opts.eps_s * std::max(rt.norm(), 1e-300)) break;
    }
    r = std::move(rt);

    // p-update: projection onto the budget simplex in the F metric
    qp.H = rho * G;
    qp.c = -rho * (F.adjoint() * (r + d)).real();
    QpResult sol = solve_qp(qp, opts.qp_tol, &p);
    Eigen::VectorXd p_new = sol.x.cwiseMax(0.0);
    if (p_new.sum() > 1.0) p_new /= p_new.sum();
    const Eigen::VectorXcd Fp_new = F * p_new;
    const double val = obj.value(Fp_new.cwiseAbs());
    if (!std::isfinite(val) || !p_new.allFinite()) {
      // overflowed: back off to the last iterate with a stiffer penalty
      r = Fp;
      d.setZero();
      rho *= 10.0;
      res.trace.push_back(res.trace.back());
      continue;
    }
    d += r - Fp_new;

    const double step = (p_new - p).norm();
    const double primal = (r - Fp_new).norm();
    p = std::move(p_new);
    Fp = Fp_new;
    res.primal_residual = primal / std::max(r.norm(), 1e-300);
    res.trace.push_back(val * unshift);
    if (val < best) {
      best = val;
      best_p = p;
    }
    if (step < opts.eps_s * p.norm() && res.primal_residual <= opts.primal_tol) {
      res.converged = true;
      ++it;
      break;
    }
    // stiffen the penalty while the residual shrinks too slowly to meet the
    // tolerance by the cap, and once consensus holds so the iterates settle
    const double target = opts.primal_tol * r.norm();
    const double needed = std::pow(std::min(target / primal, 1.0), 1.0 / (opts.admm_max_iter - it));
    if (adapt && (res.primal_residual <= opts.primal_tol || primal > std::min(0.99, needed) * last_primal)) {
      rho *= 1.05;
      d /= 1.05;
    }
    last_primal = primal;
  }
  res.iterations = it;
  res.rho = rho;
  if (!res.converged) {
    std::ostringstream os;
    os << "ADMM stopped at the iteration cap (" << opts.admm_max_iter << "), primal residual "
       << res.primal_residual;
    res.diagnostic = os.str();
  }
  if (best_p.sum() > 0) best_p /= best_p.sum();
  res.p_m = best_p * P_max;
  res.grid = PowerGrid::spread(res.p_m, cfg.K, P_max);
  return res;
}

}  // namespace dfrc
