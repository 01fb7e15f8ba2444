#include "hfeq/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfeq/errors.hpp"

namespace hfeq::lm {

Report solve(const Model& model, Eigen::VectorXd p, std::size_t m, const Options& opt) {
  const Eigen::Index n = p.size();
  Eigen::VectorXd r(m), r_try(m);
  Eigen::MatrixXd J(m, n);

  model(p, r, &J);
  if (!r.allFinite() || !J.allFinite()) throw NumericError("lm::solve: non-finite residuals at the starting point");
  double cost = 0.5 * r.squaredNorm();
  Eigen::VectorXd g = J.transpose() * r;

  Report rep;
  rep.initial_gradient = g.norm();
  rep.accepted_costs.push_back(cost);
  double lambda = opt.initial_lambda;
  double nu = 2.0;

  auto done = [&] {
    if (g.norm() <= opt.gradient_tol * rep.initial_gradient) return true;
    if (!(opt.data_scale > 0.0)) return false;
    const Eigen::MatrixXd a = J.transpose() * J;
    const Eigen::VectorXd step = a.ldlt().solve(g);
    const double gain = 0.5 * g.dot(step);
    const double eps = std::numeric_limits<double>::epsilon();
    return step.allFinite() && gain <= 1e3 * eps * (cost + 0.5 * opt.data_scale * opt.data_scale);
  };
  if (rep.initial_gradient == 0.0 || done()) rep.converged = true;

  while (!rep.converged && rep.iterations < opt.max_iterations) {
    ++rep.iterations;
    const Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd d = A.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = A;
      damped.diagonal() += lambda * d;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (!step.allFinite()) break;
      const Eigen::VectorXd p_try = p + step;
      model(p_try, r_try, nullptr);
      const double cost_try = r_try.allFinite() ? 0.5 * r_try.squaredNorm() : INFINITY;
      const double predicted = -(step.dot(g) + 0.5 * step.dot(A * step));
      if (cost_try < cost) {
        const double rho = predicted > 0.0 ? (cost - cost_try) / predicted : 1.0;
        p = p_try;
        cost = cost_try;
        lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        accepted = true;
      } else {
        lambda *= nu;
        nu *= 2.0;
        if (lambda > 1e30 || (step.norm() <= 1e-15 * (p.norm() + 1e-15))) break;
      }
    }
    if (!accepted) break;  // stalled: no descent direction at machine precision

    model(p, r, &J);
    g = J.transpose() * r;
    rep.accepted_costs.push_back(cost);
    if (done()) rep.converged = true;
  }

  rep.params = p;
  rep.cost = cost;
  rep.final_gradient = g.norm();
  return rep;
}

}  // namespace hfeq::lm
