#include <cmath>
#include <stdexcept>

#include "dfrc/solvers.hpp"

namespace dfrc {

Eigen::VectorXcd prox_scaled_magnitude(const Eigen::VectorXd& alpha, const Eigen::VectorXcd& beta, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("rho must be positive");
  if (alpha.size() != beta.size()) throw std::invalid_argument("alpha and beta differ in length");
  Eigen::VectorXcd r(beta.size());
  for (Eigen::Index q = 0; q < beta.size(); ++q) {
    double mag = std::max(std::abs(beta(q)) - alpha(q) / rho, 0.0);
    double ph = std::abs(beta(q)) > 0 ? std::arg(beta(q)) : 0.0;
    r(q) = std::polar(mag, ph);
  }
  return r;
}

}  // namespace dfrc
