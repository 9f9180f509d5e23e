#include "dfrc/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dfrc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

OfdmConfig OfdmConfig::standard(int K, int K_G, int M) {
  OfdmConfig c;
  c.K = K;
  c.K_G = K_G;
  c.M = M;
  c.sigma_n2 = c.noise_density() * c.B / K;
  return c;
}

void OfdmConfig::validate() const {
  require(K > 0, "K must be positive");
  require(K_G > 0, "K_G must be positive");
  require(K_G < K, "K_G must be smaller than K");
  require(M > 0 && M % 2 == 0, "M must be a positive even integer");
  require(B > 0, "bandwidth_hz must be positive");
  require(f_c > 0, "carrier_hz must be positive");
  require(sigma_n2 > 0, "sigma_n2 must be positive");
  require(radar_loss_db > 0, "radar_loss_db must be positive");
  require(comm_loss_db > 0, "comm_loss_db must be positive");
}

int linear_bin_index(DelayDopplerBin b, int K_G, int M) {
  return b.n + (b.v + M / 2) * K_G;
}

DelayDopplerBin bin_from_index(int q, int K_G, int M) {
  return {q % K_G, q / K_G - M / 2};
}

bool bin_in_range(DelayDopplerBin b, int K_G, int M) {
  return b.n >= 0 && b.n < K_G && b.v >= -M / 2 && b.v < M / 2;
}

bool PowerGrid::valid(double tol) const {
  if (values.size() == 0) return false;
  if ((values.array() < 0.0).any()) return false;
  return total() <= budget + tol * std::max(1.0, budget);
}

PowerGrid PowerGrid::uniform(int K, int M, double budget) {
  return {Eigen::MatrixXd::Constant(K, M, budget / (double(K) * M)), budget};
}

PowerGrid PowerGrid::spread(const Eigen::VectorXd& p_m, int K, double budget) {
  PowerGrid g{Eigen::MatrixXd(K, p_m.size()), budget};
  for (Eigen::Index m = 0; m < p_m.size(); ++m) g.values.col(m).setConstant(p_m(m) / K);
  return g;
}

Eigen::VectorXcd doppler_phase_vector(int v, double eps, int M) {
  Eigen::VectorXcd f(M);
  for (int m = 0; m < M; ++m) f(m) = std::polar(1.0, -2.0 * kPi * m * (v - eps) / M);
  return f;
}

Eigen::VectorXcd range_phase_vector(int n, int K) {
  Eigen::VectorXcd f(K);
  // reduce nk mod K so large indices keep full precision
  for (int k = 0; k < K; ++k) {
    long long nk = (static_cast<long long>(n) * k) % K;
    f(k) = std::polar(1.0, 2.0 * kPi * double(nk) / K);
  }
  return f;
}

cd ambiguity(const Eigen::MatrixXd& p, int n, int v, double eps) {
  const int K = int(p.rows());
  const int M = int(p.cols());
  Eigen::VectorXcd fr = range_phase_vector(((n % K) + K) % K, K);
  Eigen::VectorXcd fd = doppler_phase_vector(v, eps, M);
  cd acc = 0.0;
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) acc += p(k, m) * fr(k) * fd(m);
  return acc;
}

AfValue ambiguity_value(const PowerGrid& p, int n, int v, double eps) {
  return {n, v, eps, ambiguity(p, n, v, eps)};
}

Eigen::MatrixXcd ambiguity_surface(const Eigen::MatrixXd& p, int K_G, double eps) {
  const int K = int(p.rows());
  const int M = int(p.cols());
  Eigen::MatrixXcd fr(K_G, K);
  for (int n = 0; n < K_G; ++n) fr.row(n) = range_phase_vector(n, K).transpose();
  Eigen::MatrixXcd fd(M, M);
  for (int vi = 0; vi < M; ++vi) fd.row(vi) = doppler_phase_vector(vi - M / 2, eps, M).transpose();
  Eigen::MatrixXcd t = fr * p.cast<cd>();
  return t * fd.transpose();
}

std::vector<double> epsilon_samples(int count) {
  if (count < 1) throw std::invalid_argument("eps sample count must be >= 1");
  std::vector<double> e(count);
  for (int l = 1; l <= count; ++l) e[l - 1] = double(2 * l - count - 1) / (2.0 * count);
  return e;
}

}  // namespace dfrc
