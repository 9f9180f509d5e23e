#include "dfrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfrc/bessel.hpp"

namespace dfrc {

namespace {

void require_positive_sigma2(double sigma2) {
  if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
}

int peak_column(int M) { return M / 2; }

}  // namespace

Eigen::MatrixXd GaussianInput::grid_power() const {
  Eigen::MatrixXd s(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) s(k, m) = pbar(index(0, k, m)) + pbar(index(1, k, m));
  return s;
}

Eigen::VectorXd GaussianInput::means() const {
  return (pbar - sigma).cwiseMax(0.0).cwiseSqrt();
}

double GaussianInput::mean_fraction() const {
  double t = total();
  return t > 0 ? (pbar - sigma).sum() / t : 0.0;
}

bool GaussianInput::valid(double budget, double tol) const {
  if (pbar.size() != size() || sigma.size() != size()) return false;
  double scale = std::max(1.0, budget);
  if ((sigma.array() < -tol * scale).any()) return false;
  if (((pbar - sigma).array() < -tol * scale).any()) return false;
  return total() <= budget + tol * scale;
}

GaussianInput GaussianInput::from_power_grid(const PowerGrid& p) {
  GaussianInput g(p.K(), p.M());
  for (int m = 0; m < g.M; ++m)
    for (int k = 0; k < g.K; ++k) {
      g.pbar(g.index(0, k, m)) = 0.5 * p.values(k, m);
      g.pbar(g.index(1, k, m)) = 0.5 * p.values(k, m);
    }
  return g;
}

Eigen::VectorXd CommChannel::rate_gains(int M, double B) const {
  const int K = int(h.size());
  Eigen::VectorXd c(2 * K * M);
  for (int q = 0; q < 2 * K * M; ++q) c(q) = 2.0 * K * h(q % K) / (B * sigma_c2);
  return c;
}

double ubop(const PowerGrid& p, double sigma2, const std::vector<double>& eps_set, int K_G) {
  require_positive_sigma2(sigma2);
  const int M = p.M();
  double acc = 0.0;
  for (double e : eps_set) {
    Eigen::MatrixXd a = ambiguity_surface(p.values, K_G, e).cwiseAbs();
    const double a0 = a(0, peak_column(M));
    for (int vi = 0; vi < M; ++vi)
      for (int n = 0; n < K_G; ++n) {
        if (n == 0 && vi == peak_column(M)) continue;
        acc += std::exp(-(a0 - a(n, vi)) / (2.0 * sigma2));
      }
  }
  return acc / (2.0 * double(eps_set.size()));
}

double op_bessel_approx(const PowerGrid& p, double sigma2, const std::vector<double>& eps_set, int K_G) {
  require_positive_sigma2(sigma2);
  const int M = p.M();
  double acc = 0.0;
  for (double e : eps_set) {
    Eigen::MatrixXd a = ambiguity_surface(p.values, K_G, e).cwiseAbs();
    const double x0 = a(0, peak_column(M)) / (2.0 * sigma2);
    for (int vi = 0; vi < M; ++vi)
      for (int n = 0; n < K_G; ++n) {
        if (n == 0 && vi == peak_column(M)) continue;
        acc += 0.5 * exp_neg_times_i0(x0, a(n, vi) / (2.0 * sigma2));
      }
  }
  return acc / double(eps_set.size());
}

double pairwise_second_moment(const GaussianInput& g, int n, int v, double eps) {
  cd z = ambiguity(g.grid_power(), n, v, eps);
  return std::norm(z) + 2.0 * g.pbar.squaredNorm() - 2.0 * (g.pbar - g.sigma).squaredNorm();
}

double mean_peak_magnitude(const GaussianInput& g, double eps) {
  return std::abs(ambiguity(g.grid_power(), 0, 0, eps));
}

double aubop(const GaussianInput& g, double sigma2, const std::vector<double>& eps_set, int K_G,
             RadicandAudit* audit) {
  require_positive_sigma2(sigma2);
  const int M = g.M;
  const Eigen::MatrixXd s = g.grid_power();
  const double var_term = 2.0 * g.pbar.squaredNorm() - 2.0 * (g.pbar - g.sigma).squaredNorm();
  const double tol = 1e-9 * std::max(1.0, s.sum() * s.sum());
  RadicandAudit local{0.0, 0};
  double acc = 0.0;
  for (double e : eps_set) {
    Eigen::MatrixXcd z = ambiguity_surface(s, K_G, e);
    const double peak = std::abs(z(0, peak_column(M)));
    for (int vi = 0; vi < M; ++vi)
      for (int n = 0; n < K_G; ++n) {
        if (n == 0 && vi == peak_column(M)) continue;
        double rad = std::norm(z(n, vi)) + var_term;
        local.min_radicand = std::min(local.min_radicand, rad);
        if (rad < -tol) ++local.negative_beyond_tol;
        acc += -peak + std::sqrt(std::max(rad, 0.0));
      }
  }
  if (audit) *audit = local;
  return acc / (4.0 * double(eps_set.size()) * sigma2);
}

double achievable_rate(const Eigen::VectorXd& sigma, const CommChannel& ch, int K, int M, double B) {
  if (sigma.size() != 2 * K * M) throw std::invalid_argument("variance vector has the wrong length");
  Eigen::VectorXd c = ch.rate_gains(M, B);
  double acc = 0.0;
  for (int q = 0; q < sigma.size(); ++q) acc += std::log2(1.0 + c(q) * sigma(q));
  return acc / (2.0 * K * M);
}

void wilson_interval(std::size_t successes, std::size_t trials, double& lo, double& hi) {
  const double z = 1.959963984540054;
  if (trials == 0) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  const double n = double(trials);
  const double ph = double(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (ph + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom;
  // the endpoints are exact at 0 and n successes
  lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  hi = successes == trials ? 1.0 : std::min(1.0, center + half);
}

}  // namespace dfrc
