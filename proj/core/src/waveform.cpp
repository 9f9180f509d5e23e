#include "dfrc/waveform.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace dfrc {

namespace {

void check_dims(const SymbolGrid& X, const OfdmConfig& cfg) {
  if (X.rows() != cfg.K || X.cols() != cfg.M)
    throw std::invalid_argument("symbol grid dimensions do not match the configuration");
}

DelayDopplerBin argmax_bin(const Eigen::MatrixXd& stat, int K_G, int M) {
  // scan in increasing q so the first maximum wins
  double best = -1.0;
  DelayDopplerBin out;
  for (int vi = 0; vi < M; ++vi)
    for (int n = 0; n < K_G; ++n)
      if (stat(n, vi) > best) {
        best = stat(n, vi);
        out = {n, vi - M / 2};
      }
  return out;
}

}  // namespace

Eigen::VectorXcd modulate(const SymbolGrid& X, const OfdmConfig& cfg) {
  check_dims(X, cfg);
  const int K = cfg.K, KG = cfg.K_G, M = cfg.M, KT = cfg.K_T();
  SymbolGrid t = X;
  detail::BatchedDft idft(K, M, 1, K, +1);
  idft.execute(t.data());
  t /= std::sqrt(double(K));
  Eigen::VectorXcd x(KT * M);
  for (int m = 0; m < M; ++m) {
    x.segment(m * KT, KG) = t.col(m).tail(KG);
    x.segment(m * KT + KG, K) = t.col(m);
  }
  return x;
}

SymbolGrid demodulate(const Eigen::VectorXcd& x, const OfdmConfig& cfg) {
  const int K = cfg.K, KG = cfg.K_G, M = cfg.M, KT = cfg.K_T();
  if (x.size() != Eigen::Index(KT) * M)
    throw std::invalid_argument("sample sequence length does not match the configuration");
  SymbolGrid X(K, M);
  for (int m = 0; m < M; ++m) X.col(m) = x.segment(m * KT + KG, K);
  detail::BatchedDft dft(K, M, 1, K, -1);
  dft.execute(X.data());
  X /= std::sqrt(double(K));
  return X;
}

SymbolGrid synthesize_echo(const SymbolGrid& X, const EchoParams& e, Rng& rng) {
  if (e.sigma_n2 < 0) throw std::invalid_argument("noise power must be nonnegative");
  const int K = int(X.rows()), M = int(X.cols());
  Eigen::VectorXcd dk(K), dm(M);
  for (int k = 0; k < K; ++k) {
    long long nk = (static_cast<long long>(e.bin.n) * k) % K;
    dk(k) = std::polar(1.0, -2.0 * kPi * double(nk) / K);
  }
  for (int m = 0; m < M; ++m) dm(m) = e.a * std::polar(1.0, 2.0 * kPi * (e.bin.v + e.eps) * m / M);
  SymbolGrid Y(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) Y(k, m) = X(k, m) * dk(k) * dm(m);
  if (e.sigma_n2 > 0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(e.sigma_n2 / 2.0));
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
      double re = nd(rng);
      double im = nd(rng);
      Y(i) += cd(re, im);
    }
  }
  return Y;
}

SymbolGrid propagate_time_domain(const SymbolGrid& X, const EchoParams& e, const OfdmConfig& cfg) {
  check_dims(X, cfg);
  if (e.bin.n < 0 || e.bin.n >= cfg.K_G) throw std::invalid_argument("delay outside the cyclic prefix");
  const int KT = cfg.K_T(), M = cfg.M;
  Eigen::VectorXcd tx = modulate(X, cfg);
  Eigen::VectorXcd rx = Eigen::VectorXcd::Zero(tx.size());
  const int n0 = e.bin.n;
  for (int m = 0; m < M; ++m) {
    cd ramp = e.a * std::polar(1.0, 2.0 * kPi * (e.bin.v + e.eps) * m / M);
    for (int i = 0; i < KT; ++i) {
      int src = i - n0;
      // the CP absorbs the delay, so the sample comes from the same symbol
      if (src < 0) continue;
      rx(m * KT + i) = ramp * tx(m * KT + src);
    }
  }
  return demodulate(rx, cfg);
}

Eigen::MatrixXd ml_statistic(const SymbolGrid& Y, const SymbolGrid& X, int K_G) {
  MlEstimator est(int(X.rows()), K_G, int(X.cols()));
  est(Y, X);
  return est.statistic();
}

DelayDopplerBin ml_estimate(const SymbolGrid& Y, const SymbolGrid& X, int K_G) {
  MlEstimator est(int(X.rows()), K_G, int(X.cols()));
  return est(Y, X);
}

struct MlEstimator::Impl {
  int K, K_G, M;
  detail::BatchedDft along_k;
  detail::BatchedDft along_m;
  Eigen::MatrixXcd z;
  Eigen::MatrixXcd t;

  Impl(int K_, int KG_, int M_)
      : K(K_), K_G(KG_), M(M_),
        along_k(K_, M_, 1, K_, +1),
        along_m(M_, KG_, KG_, 1, -1),
        z(K_, M_), t(KG_, M_) {}
};

MlEstimator::MlEstimator(int K, int K_G, int M)
    : impl_(std::make_unique<Impl>(K, K_G, M)), stat_(K_G, M) {
  if (K_G < 1 || K_G > K || M < 1) throw std::invalid_argument("invalid estimator dimensions");
}

MlEstimator::~MlEstimator() = default;
MlEstimator::MlEstimator(MlEstimator&&) noexcept = default;
MlEstimator& MlEstimator::operator=(MlEstimator&&) noexcept = default;

DelayDopplerBin MlEstimator::operator()(const SymbolGrid& Y, const SymbolGrid& X) {
  Impl& s = *impl_;
  if (X.rows() != s.K || X.cols() != s.M || Y.rows() != s.K || Y.cols() != s.M)
    throw std::invalid_argument("grid dimensions do not match the estimator");
  if (X.cwiseAbs2().sum() == 0.0) throw std::invalid_argument("all-zero symbol grid");
  s.z = Y.cwiseProduct(X.conjugate());
  s.along_k.execute(s.z.data());
  s.t = s.z.topRows(s.K_G);
  s.along_m.execute(s.t.data());
  for (int vi = 0; vi < s.M; ++vi) {
    int col = (vi - s.M / 2 + s.M) % s.M;
    stat_.col(vi) = s.t.col(col).cwiseAbs();
  }
  return argmax_bin(stat_, s.K_G, s.M);
}

}  // namespace dfrc
