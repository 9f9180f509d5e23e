#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dfrc/solvers.hpp"

namespace dfrc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status : char { Free, Lower, Upper };

struct Direction {
  Eigen::VectorXd p;       // full length, zero on fixed variables
  Eigen::VectorXd lambda;  // working general rows
  bool ray = false;        // zero-curvature descent direction, no multipliers
};

class ActiveSet {
 public:
  ActiveSet(const QpProblem& q, double tol) : q_(q), tol_(tol), n_(q.dim()), mg_(int(q.A.rows())) {}

  QpResult run(Eigen::VectorXd x0) {
    x_ = std::move(x0);
    status_.assign(n_, Status::Free);
    in_work_.assign(mg_, 0);
    work_.clear();
    for (int j = 0; j < n_; ++j) {
      if (x_(j) <= q_.lower(j)) {
        x_(j) = q_.lower(j);
        status_[j] = Status::Lower;
      } else if (x_(j) >= q_.upper(j)) {
        x_(j) = q_.upper(j);
        status_[j] = Status::Upper;
      }
    }
    const int max_iter = 20 * (n_ + mg_) + 200;
    Direction d;
    bool at_eqp_optimum = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      Eigen::VectorXd g = q_.H * x_ + q_.c;
      if (at_eqp_optimum) d.p.setZero();
      else d = solve_eqp(g);
      at_eqp_optimum = false;
      const double pscale = 1e-13 * std::max(1.0, x_.lpNorm<Eigen::Infinity>());
      if (!d.ray && d.p.lpNorm<Eigen::Infinity>() <= pscale) {
        if (release_one(g, d.lambda)) continue;
        break;
      }
      double alpha = d.ray ? kInf : 1.0;
      int block_var = -1, block_row = -1;
      Status block_side = Status::Free;
      for (int j = 0; j < n_; ++j) {
        if (status_[j] != Status::Free) continue;
        double pj = d.p(j);
        if (pj < 0 && std::isfinite(q_.lower(j))) {
          double t = std::max(0.0, (q_.lower(j) - x_(j)) / pj);
          if (t < alpha) alpha = t, block_var = j, block_row = -1, block_side = Status::Lower;
        } else if (pj > 0 && std::isfinite(q_.upper(j))) {
          double t = std::max(0.0, (q_.upper(j) - x_(j)) / pj);
          if (t < alpha) alpha = t, block_var = j, block_row = -1, block_side = Status::Upper;
        }
      }
      if (mg_ > 0) {
        Eigen::VectorXd ap = q_.A * d.p;
        Eigen::VectorXd slack = q_.b - q_.A * x_;
        for (int i = 0; i < mg_; ++i) {
          if (in_work_[i]) continue;
          double tiny = 1e-14 * (q_.A.row(i).cwiseAbs().sum() * d.p.lpNorm<Eigen::Infinity>());
          if (ap(i) > tiny) {
            double t = std::max(0.0, slack(i) / ap(i));
            if (t < alpha) alpha = t, block_row = i, block_var = -1;
          }
        }
      }
      if (!std::isfinite(alpha)) throw QpUnbounded("qp objective is unbounded below");
      x_ += alpha * d.p;
      if (block_var >= 0) {
        status_[block_var] = block_side;
        x_(block_var) = block_side == Status::Lower ? q_.lower(block_var) : q_.upper(block_var);
      } else if (block_row >= 0) {
        in_work_[block_row] = 1;
        work_.push_back(block_row);
      } else if (!d.ray) {
        at_eqp_optimum = true;
      }
    }
    QpResult r;
    r.iterations = it;
    r.x = x_;
    Eigen::VectorXd g = q_.H * x_ + q_.c;
    Direction fin = solve_eqp(g);
    r.lambda = Eigen::VectorXd::Zero(mg_);
    for (std::size_t w = 0; w < work_.size(); ++w) r.lambda(work_[w]) = std::max(0.0, fin.lambda(w));
    Eigen::VectorXd grad = g;
    if (mg_ > 0) grad += q_.A.transpose() * r.lambda;
    r.mu_lower = Eigen::VectorXd::Zero(n_);
    r.mu_upper = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == Status::Lower) r.mu_lower(j) = std::max(0.0, grad(j));
      if (status_[j] == Status::Upper) r.mu_upper(j) = std::max(0.0, -grad(j));
    }
    r.objective = q_.objective(r.x);
    r.kkt = qp_kkt_residuals(q_, r);
    return r;
  }

 private:
  std::vector<int> free_indices() const {
    std::vector<int> f;
    for (int j = 0; j < n_; ++j)
      if (status_[j] == Status::Free) f.push_back(j);
    return f;
  }

  Direction solve_eqp(const Eigen::VectorXd& g) const {
    std::vector<int> F = free_indices();
    const int nf = int(F.size()), nw = int(work_.size());
    Direction d;
    d.p = Eigen::VectorXd::Zero(n_);
    d.lambda = Eigen::VectorXd::Zero(nw);
    if (nf == 0) return d;
    Eigen::MatrixXd Hff(nf, nf);
    Eigen::VectorXd gf(nf);
    for (int a = 0; a < nf; ++a) {
      gf(a) = g(F[a]);
      for (int b = 0; b < nf; ++b) Hff(a, b) = q_.H(F[a], F[b]);
    }
    Eigen::MatrixXd Aw(nw, nf);
    for (int w = 0; w < nw; ++w)
      for (int a = 0; a < nf; ++a) Aw(w, a) = q_.A(work_[w], F[a]);

    Eigen::VectorXd pf;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Hff);
    Eigen::VectorXd D = ldlt.vectorD();
    const double dmax = std::max(1.0, D.cwiseAbs().maxCoeff());
    const bool pd = ldlt.info() == Eigen::Success && D.minCoeff() > 1e-13 * dmax;
    if (pd) {
      Eigen::VectorXd y = ldlt.solve(gf);
      if (nw > 0) {
        Eigen::MatrixXd Z = ldlt.solve(Aw.transpose());
        Eigen::MatrixXd S = Aw * Z;
        d.lambda = S.colPivHouseholderQr().solve(-(Aw * y));
        pf = -y - Z * d.lambda;
      } else {
        pf = -y;
      }
    } else {
      Eigen::MatrixXd Kkt = Eigen::MatrixXd::Zero(nf + nw, nf + nw);
      Kkt.topLeftCorner(nf, nf) = Hff;
      Kkt.topRightCorner(nf, nw) = Aw.transpose();
      Kkt.bottomLeftCorner(nw, nf) = Aw;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + nw);
      rhs.head(nf) = -gf;
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Kkt);
      Eigen::VectorXd s = cod.solve(rhs);
      double res = (Kkt * s - rhs).lpNorm<Eigen::Infinity>();
      if (res <= 1e-10 * std::max(1.0, gf.lpNorm<Eigen::Infinity>())) {
        pf = s.head(nf);
        d.lambda = s.tail(nw);
      } else {
        // g has a component in null(H_FF) within the working set: descend along it
        Eigen::MatrixXd stacked(nf + nw, nf);
        stacked << Hff, Aw;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
        lu.setThreshold(1e-11);
        Eigen::MatrixXd N = lu.kernel();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(N);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(nf, N.cols());
        pf = -Q * (Q.transpose() * gf);
        d.ray = true;
        // a vanishing ray means the residual was conditioning noise
        if (!(gf.dot(pf) < -1e-14 * std::max(1.0, gf.squaredNorm()))) {
          pf = s.head(nf);
          d.lambda = s.tail(nw);
          d.ray = false;
        }
      }
    }
    for (int a = 0; a < nf; ++a) d.p(F[a]) = pf(a);
    return d;
  }

  // Drop the most negative multiplier; false when all are nonnegative.
  bool release_one(const Eigen::VectorXd& g, const Eigen::VectorXd& lambda) {
    Eigen::VectorXd grad = g;
    for (std::size_t w = 0; w < work_.size(); ++w) grad += lambda(w) * q_.A.row(work_[w]).transpose();
    const double thresh = -1e-3 * tol_ * std::max(1.0, g.lpNorm<Eigen::Infinity>());
    double worst = thresh;
    int which_var = -1, which_work = -1;
    for (std::size_t w = 0; w < work_.size(); ++w)
      if (lambda(w) < worst) worst = lambda(w), which_work = int(w), which_var = -1;
    for (int j = 0; j < n_; ++j) {
      double mu = status_[j] == Status::Lower ? grad(j) : status_[j] == Status::Upper ? -grad(j) : 0.0;
      if (mu < worst) worst = mu, which_var = j, which_work = -1;
    }
    if (which_var >= 0) {
      status_[which_var] = Status::Free;
      return true;
    }
    if (which_work >= 0) {
      in_work_[work_[which_work]] = 0;
      work_.erase(work_.begin() + which_work);
      return true;
    }
    return false;
  }

  const QpProblem& q_;
  double tol_;
  int n_, mg_;
  Eigen::VectorXd x_;
  std::vector<Status> status_;
  std::vector<int> work_;
  std::vector<char> in_work_;
};

void check_problem(const QpProblem& q) {
  const int n = q.dim();
  if (q.H.rows() != n || q.H.cols() != n) throw std::invalid_argument("qp: H has the wrong shape");
  if (q.A.cols() != n && q.A.rows() > 0) throw std::invalid_argument("qp: A has the wrong shape");
  if (q.b.size() != q.A.rows()) throw std::invalid_argument("qp: b has the wrong length");
  if (q.lower.size() != n || q.upper.size() != n) throw std::invalid_argument("qp: bounds have the wrong length");
  const double hs = std::max(1.0, q.H.cwiseAbs().maxCoeff());
  if ((q.H - q.H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * hs)
    throw std::invalid_argument("qp: H is not symmetric");
  if ((q.lower.array() > q.upper.array()).any()) throw QpInfeasible("qp: lower bound exceeds upper bound");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(q.H);
  bool suspicious = ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-12 * hs;
  if (suspicious) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * hs) throw QpNotConvex("qp: H is not positive semidefinite");
  }
}

double max_violation(const QpProblem& q, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (q.A.rows() > 0) v = std::max(v, (q.A * x - q.b).maxCoeff());
  v = std::max(v, (q.lower - x).maxCoeff());
  v = std::max(v, (x - q.upper).maxCoeff());
  return std::max(v, 0.0);
}

// Elastic phase 1: min 1/2|x - x0|^2 + w 1't + tiny/2 |t|^2, A x - t <= b, t >= 0.
Eigen::VectorXd find_feasible(const QpProblem& q, const Eigen::VectorXd& x0, double tol) {
  const int n = q.dim(), mg = int(q.A.rows());
  Eigen::VectorXd xc = x0.cwiseMax(q.lower).cwiseMin(q.upper);
  if (max_violation(q, xc) == 0.0) return xc;
  const double scale = std::max(1.0, xc.lpNorm<Eigen::Infinity>());
  const double feas_tol = 1e-10 * std::max(1.0, q.b.cwiseAbs().maxCoeff());
  for (double w = 1e2 * scale; w <= 1e14 * scale; w *= 1e3) {
    QpProblem e;
    e.H = Eigen::MatrixXd::Zero(n + mg, n + mg);
    e.H.topLeftCorner(n, n).setIdentity();
    e.H.bottomRightCorner(mg, mg) = 1e-10 * Eigen::MatrixXd::Identity(mg, mg);
    e.c = Eigen::VectorXd::Zero(n + mg);
    e.c.head(n) = -xc;
    e.c.tail(mg).setConstant(w);
    e.A.resize(mg, n + mg);
    e.A << q.A, -Eigen::MatrixXd::Identity(mg, mg);
    e.b = q.b;
    e.lower.resize(n + mg);
    e.upper.resize(n + mg);
    e.lower << q.lower, Eigen::VectorXd::Zero(mg);
    e.upper << q.upper, Eigen::VectorXd::Constant(mg, kInf);
    Eigen::VectorXd s(n + mg);
    s << xc, (q.A * xc - q.b).cwiseMax(0.0);
    ActiveSet solver(e, tol);
    QpResult r = solver.run(s);
    Eigen::VectorXd x = r.x.head(n);
    if (max_violation(q, x) <= feas_tol) return x;
    if (r.x.tail(mg).maxCoeff() > 1e3 * feas_tol && w > 1e8 * scale) break;
  }
  throw QpInfeasible("qp: constraints are infeasible");
}

}  // namespace

double QpKkt::max() const { return std::max({stationarity, primal, dual, complementarity}); }

QpProblem QpProblem::make(Eigen::MatrixXd H, Eigen::VectorXd c) {
  QpProblem q;
  const int n = int(c.size());
  q.H = std::move(H);
  q.c = std::move(c);
  q.A.resize(0, n);
  q.b.resize(0);
  q.lower = Eigen::VectorXd::Constant(n, -kInf);
  q.upper = Eigen::VectorXd::Constant(n, kInf);
  return q;
}

QpKkt qp_kkt_residuals(const QpProblem& q, const QpResult& r) {
  QpKkt k;
  const Eigen::VectorXd& x = r.x;
  Eigen::VectorXd st = q.H * x + q.c - r.mu_lower + r.mu_upper;
  if (q.A.rows() > 0) st += q.A.transpose() * r.lambda;
  k.stationarity = st.lpNorm<Eigen::Infinity>();
  k.primal = max_violation(q, x);
  double dual = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < q.A.rows(); ++i) {
    dual = std::max(dual, -r.lambda(i));
    comp = std::max(comp, std::abs(r.lambda(i) * (q.A.row(i).dot(x) - q.b(i))));
  }
  for (int j = 0; j < q.dim(); ++j) {
    dual = std::max({dual, -r.mu_lower(j), -r.mu_upper(j)});
    if (r.mu_lower(j) != 0.0) comp = std::max(comp, std::abs(r.mu_lower(j) * (x(j) - q.lower(j))));
    if (r.mu_upper(j) != 0.0) comp = std::max(comp, std::abs(r.mu_upper(j) * (q.upper(j) - x(j))));
  }
  k.dual = dual;
  k.complementarity = comp;
  return k;
}

QpResult solve_qp(const QpProblem& q, double tol, const Eigen::VectorXd* warm_start) {
  check_problem(q);
  const int n = q.dim();
  Eigen::VectorXd x0 = warm_start && warm_start->size() == n ? *warm_start : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x = find_feasible(q, x0, tol);
  ActiveSet solver(q, tol);
  return solver.run(std::move(x));
}

}  // namespace dfrc
