#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dfrc/grid.hpp"
#include "dfrc/opt.hpp"

namespace dfrc::detail {

// aUBOP of a (pbar, sigma) pair in budget-normalized units, plus the pieces of
// its quadratic majorizer in pbar:
//   pbar' B pbar + alpha' pbar,  B = [[1,1],[1,1]] (x) S.
class AubopModel {
 public:
  AubopModel(int K, int K_G, int M, std::vector<double> eps, double sigma2_normalized);

  struct Point {
    std::vector<Eigen::MatrixXcd> z;  // AF of the mean grid power, per eps
    std::vector<Eigen::MatrixXd> g;   // sqrt(E|r|^2) per sidelobe, peak entry unused
    double var_term = 0.0;
    double value = 0.0;
  };

  Point evaluate(const Eigen::VectorXd& pbar, const Eigen::VectorXd& sigma) const;

  // g below g_floor is clamped in the weights 1/(2g)
  void majorizer(const Point& pt, const Eigen::VectorXd& sigma, double g_floor, Eigen::MatrixXd& S,
                 Eigen::VectorXd& alpha) const;

  int K() const { return K_; }
  int M() const { return M_; }
  int sidelobes() const { return K_G_ * M_ - 1; }
  double peak_exponent(const Point& pt) const;

 private:
  int K_, K_G_, M_;
  std::vector<double> eps_;
  double sigma2_;
  Eigen::MatrixXcd fr_;  // K_G x K
};

// Linear map from optimizer variables y to the 2KM component vector.
//   Full: identity.  Symmetric: [y; y].  Dense: [LR y; LI y].
struct Lift {
  enum class Kind { Full, Symmetric, Dense };
  Kind kind = Kind::Full;
  int KM = 0;
  Eigen::MatrixXd LR, LI;

  static Lift full(int KM);
  static Lift symmetric(int KM);
  static Lift dense(Eigen::MatrixXd LR, Eigen::MatrixXd LI);

  int dim() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;
  Eigen::VectorXd pull(const Eigen::VectorXd& v) const;
  // L' B L with B = [[1,1],[1,1]] (x) S
  Eigen::MatrixXd quad(const Eigen::MatrixXd& S) const;
};

// SCP on the mean block: minimize the aUBOP majorizer in y subject to
// 1'L y <= 1 and y >= y_sigma. pt tracks the point (L y, L y_sigma).
// Returns the number of QP solves.
int pbar_block(const AubopModel& model, const Lift& lift, Eigen::VectorXd& y, const Eigen::VectorXd& y_sigma,
               AubopModel::Point& pt, const OptimizerOptions& opts);

}  // namespace dfrc::detail
