#include "aubop_model.hpp"

#include <cmath>
#include <limits>

#include "dfrc/solvers.hpp"

namespace dfrc::detail {

AubopModel::AubopModel(int K, int K_G, int M, std::vector<double> eps, double sigma2_normalized)
    : K_(K), K_G_(K_G), M_(M), eps_(std::move(eps)), sigma2_(sigma2_normalized), fr_(K_G, K) {
  for (int n = 0; n < K_G; ++n) fr_.row(n) = range_phase_vector(n, K).transpose();
}

AubopModel::Point AubopModel::evaluate(const Eigen::VectorXd& pbar, const Eigen::VectorXd& sigma) const {
  const int KM = K_ * M_;
  Eigen::MatrixXd s(K_, M_);
  for (int m = 0; m < M_; ++m)
    for (int k = 0; k < K_; ++k) s(k, m) = pbar(m * K_ + k) + pbar(KM + m * K_ + k);
  Point pt;
  pt.var_term = 2.0 * pbar.squaredNorm() - 2.0 * (pbar - sigma).squaredNorm();
  double acc = 0.0;
  const int peak = M_ / 2;
  for (double e : eps_) {
    Eigen::MatrixXcd z = ambiguity_surface(s, K_G_, e);
    Eigen::MatrixXd g(K_G_, M_);
    const double z0 = std::abs(z(0, peak));
    for (int vi = 0; vi < M_; ++vi)
      for (int n = 0; n < K_G_; ++n) {
        g(n, vi) = std::sqrt(std::max(std::norm(z(n, vi)) + pt.var_term, 0.0));
        if (n == 0 && vi == peak) continue;
        acc += g(n, vi) - z0;
      }
    pt.z.push_back(std::move(z));
    pt.g.push_back(std::move(g));
  }
  pt.value = acc / (4.0 * double(eps_.size()) * sigma2_);
  return pt;
}

double AubopModel::peak_exponent(const Point& pt) const {
  double mx = 0.0;
  for (const auto& z : pt.z) mx = std::max(mx, std::abs(z(0, M_ / 2)));
  return mx / (2.0 * sigma2_);
}

void AubopModel::majorizer(const Point& pt, const Eigen::VectorXd& sigma, double g_floor, Eigen::MatrixXd& S,
                           Eigen::VectorXd& alpha) const {
  const int K = K_, M = M_, KG = K_G_, KM = K * M;
  const int peak = M / 2;
  const int ND = 2 * M - 1;
  // T(dm + M - 1, dk) = Re sum w e^{-j2pi dm (v - eps)/M} e^{j2pi n dk/K}
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(ND, K);
  double c = 0.0;
  for (std::size_t l = 0; l < eps_.size(); ++l) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(KG, ND);
    for (int vi = 0; vi < M; ++vi) {
      Eigen::VectorXcd ph(ND);
      for (int j = 0; j < ND; ++j) ph(j) = std::polar(1.0, -2.0 * kPi * (j - (M - 1)) * (vi - peak - eps_[l]) / M);
      for (int n = 0; n < KG; ++n) {
        if (n == 0 && vi == peak) continue;
        const double w = 0.5 / std::max(pt.g[l](n, vi), g_floor);
        c += 2.0 * w;
        A.row(n) += w * ph.transpose();
      }
    }
    T += (A.transpose() * fr_).real();
  }
  S.resize(KM, KM);
  for (int m = 0; m < M; ++m)
    for (int mp = 0; mp < M; ++mp)
      for (int k = 0; k < K; ++k)
        for (int kp = 0; kp < K; ++kp) S(m * K + k, mp * K + kp) = T(m - mp + M - 1, (k - kp + K) % K);

  alpha.resize(2 * KM);
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(KM);
  for (std::size_t l = 0; l < eps_.size(); ++l) {
    const cd z0 = pt.z[l](0, peak);
    const double a0 = std::abs(z0);
    if (a0 <= 0) continue;
    for (int m = 0; m < M; ++m) {
      double v = (std::polar(1.0, 2.0 * kPi * eps_[l] * m / M) * std::conj(z0)).real() / a0;
      lin.segment(m * K, K).array() += v;
    }
  }
  lin *= -double(sidelobes());
  // the variance term sum(4 pbar sigma - 2 sigma^2) is linear in pbar
  alpha << lin, lin;
  alpha += 2.0 * c * sigma;
}

}  // namespace dfrc::detail

namespace dfrc::detail {

Lift Lift::full(int KM) {
  Lift l;
  l.kind = Kind::Full;
  l.KM = KM;
  return l;
}

Lift Lift::symmetric(int KM) {
  Lift l;
  l.kind = Kind::Symmetric;
  l.KM = KM;
  return l;
}

Lift Lift::dense(Eigen::MatrixXd LR, Eigen::MatrixXd LI) {
  Lift l;
  l.kind = Kind::Dense;
  l.KM = int(LR.rows());
  l.LR = std::move(LR);
  l.LI = std::move(LI);
  return l;
}

int Lift::dim() const {
  switch (kind) {
    case Kind::Full: return 2 * KM;
    case Kind::Symmetric: return KM;
    case Kind::Dense: return int(LR.cols());
  }
  return 0;
}

Eigen::VectorXd Lift::apply(const Eigen::VectorXd& y) const {
  Eigen::VectorXd v(2 * KM);
  switch (kind) {
    case Kind::Full: v = y; break;
    case Kind::Symmetric: v << y, y; break;
    case Kind::Dense: v << LR * y, LI * y; break;
  }
  return v;
}

Eigen::VectorXd Lift::pull(const Eigen::VectorXd& v) const {
  switch (kind) {
    case Kind::Full: return v;
    case Kind::Symmetric: return v.head(KM) + v.tail(KM);
    case Kind::Dense: return LR.transpose() * v.head(KM) + LI.transpose() * v.tail(KM);
  }
  return {};
}

Eigen::MatrixXd Lift::quad(const Eigen::MatrixXd& S) const {
  switch (kind) {
    case Kind::Full: {
      Eigen::MatrixXd B(2 * KM, 2 * KM);
      B << S, S, S, S;
      return B;
    }
    case Kind::Symmetric: return 4.0 * S;
    case Kind::Dense: {
      const Eigen::MatrixXd L = LR + LI;
      return L.transpose() * S * L;
    }
  }
  return {};
}

namespace {

// Euclidean projection onto {x >= lower, a'x <= 1} for a >= 0.
Eigen::VectorXd project(const Eigen::VectorXd& z, const Eigen::VectorXd& a, const Eigen::VectorXd& lower) {
  Eigen::VectorXd x = z.cwiseMax(lower);
  if (a.dot(x) <= 1.0) return x;
  double lo = 0.0, hi = 1.0;
  while (a.dot((z - hi * a).cwiseMax(lower)) > 1.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (a.dot((z - mid * a).cwiseMax(lower)) > 1.0 ? lo : hi) = mid;
  }
  return (z - hi * a).cwiseMax(lower);
}

// Accelerated projected gradient, used only to guess the active bounds
// before the exact solve.
Eigen::VectorXd crash_start(const QpProblem& qp, const Eigen::VectorXd& y0, int iters) {
  const Eigen::VectorXd a = qp.A.row(0).transpose();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(y0.size()) / std::sqrt(double(y0.size()));
  double L = 0.0;
  for (int i = 0; i < 30; ++i) {
    Eigen::VectorXd w = qp.H * v;
    L = w.norm();
    if (!(L > 0)) return y0;
    v = w / L;
  }
  L *= 1.01;
  Eigen::VectorXd x = project(y0, a, qp.lower), xp = x, z = x;
  double t = 1.0;
  for (int i = 0; i < iters; ++i) {
    xp = x;
    x = project(z - (qp.H * z + qp.c) / L, a, qp.lower);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x + ((t - 1.0) / tn) * (x - xp);
    t = tn;
  }
  return x;
}

}  // namespace

int pbar_block(const AubopModel& model, const Lift& lift, Eigen::VectorXd& y, const Eigen::VectorXd& y_sigma,
               AubopModel::Point& pt, const OptimizerOptions& opts) {
  const int n = lift.dim();
  const Eigen::VectorXd sigma = lift.apply(y_sigma);
  QpProblem qp;
  qp.A = lift.pull(Eigen::VectorXd::Ones(2 * lift.KM)).transpose();
  qp.b = Eigen::VectorXd::Ones(1);
  qp.lower = y_sigma;
  qp.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd S;
  Eigen::VectorXd alpha;
  int solves = 0;
  for (int t = 0; t < opts.scp_max_iter; ++t) {
    model.majorizer(pt, sigma, opts.g_floor, S, alpha);
    qp.H = 2.0 * lift.quad(S);
    qp.c = lift.pull(alpha);
    const Eigen::VectorXd start = t == 0 ? crash_start(qp, y, 1000) : y;
    QpResult sol = solve_qp(qp, opts.qp_tol, &start);
    ++solves;
    Eigen::VectorXd cand = sol.x.cwiseMax(y_sigma);
    const double total = qp.A.row(0).dot(cand);
    if (total > 1.0) {
      // trim rounding excess from the mean part only
      Eigen::VectorXd mean = cand - y_sigma;
      double room = 1.0 - qp.A.row(0).dot(y_sigma);
      double used = qp.A.row(0).dot(mean);
      if (used > 0) cand = y_sigma + mean * (std::max(room, 0.0) / used);
    }
    AubopModel::Point np = model.evaluate(lift.apply(cand), sigma);
    if (!(np.value <= pt.value)) break;
    const double gain = pt.value - np.value;
    y = std::move(cand);
    pt = std::move(np);
    if (gain <= opts.eps_s * std::max(std::abs(pt.value), 1e-300)) break;
  }
  return solves;
}

}  // namespace dfrc::detail
