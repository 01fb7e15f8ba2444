#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace hfeq::lm {

// Fills residuals r (size m) and, when jac is non-null, the m x n Jacobian.
using Model = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;

struct Options {
  int max_iterations = 200;
  double gradient_tol = 1e-8;  // relative to the initial gradient norm
  double initial_lambda = 1e-3;
  // Norm of the (weighted) data vector. When set, a point also counts as
  // converged once the Gauss-Newton step would lower the cost by less than
  // 1e3·eps·(cost + data_scale²/2), i.e. below what the arithmetic resolves.
  // Exact or warm-started seeds need this: their initial gradient is already
  // roundoff-sized and no relative criterion can beat it.
  double data_scale = 0.0;
};

struct Report {
  Eigen::VectorXd params;
  double cost = 0.0;  // ½|r|^2
  bool converged = false;
  int iterations = 0;
  double initial_gradient = 0.0;
  double final_gradient = 0.0;
  std::vector<double> accepted_costs;  // cost after each accepted step, starting with the initial cost
};

// Marquardt-scaled damped Gauss-Newton.
Report solve(const Model& model, Eigen::VectorXd p0, std::size_t n_residuals, const Options& opt = {});

}  // namespace hfeq::lm
