#include "hfeq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "hfeq/errors.hpp"

namespace hfeq::linalg {

namespace {

using Mat = Eigen::MatrixXcd;

// Returns the number of sweeps used; throws on non-convergence.
int hestenes(Mat& m, double tol, int max_sweeps) {
  const Eigen::Index n = m.cols();
  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms[j] = m.col(j).squaredNorm();

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double worst = 0.0;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = norms[p];
        const double beta = norms[q];
        if (alpha == 0.0 || beta == 0.0) continue;
        const std::complex<double> gamma = m.col(p).dot(m.col(q));  // a_p^H a_q
        const double g = std::abs(gamma);
        const double off = g / std::sqrt(alpha * beta);
        worst = std::max(worst, off);
        if (off <= tol) continue;

        // Remove the phase of gamma from column q, then a real rotation.
        const std::complex<double> phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        Eigen::VectorXcd ap = m.col(p);
        Eigen::VectorXcd aq = m.col(q) * std::conj(phase);
        m.col(p) = c * ap - s * aq;
        m.col(q) = s * ap + c * aq;
        norms[p] = alpha - t * g;
        norms[q] = beta + t * g;
      }
    }
    // Refresh norms to stop drift from the cheap updates.
    for (Eigen::Index j = 0; j < n; ++j) norms[j] = m.col(j).squaredNorm();
    if (worst <= tol) return sweep;
  }
  throw NumericError("singular_values: one-sided Jacobi did not converge after " +
                     std::to_string(max_sweeps) + " sweeps");
}

}  // namespace

SingularValues singular_values(const Eigen::MatrixXcd& a, double orth_tol, int max_sweeps,
                               double drop_tol) {
  if (a.size() == 0) throw InvalidArgument("singular_values: empty matrix");
  if (!a.allFinite()) throw InvalidArgument("singular_values: non-finite entries");
  const double total = a.squaredNorm();
  if (!(total > 0.0)) throw InvalidArgument("singular_values: zero matrix");

  Eigen::ColPivHouseholderQR<Mat> qr(a);
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  Eigen::Index keep = k;
  double tail = 0.0;
  while (keep > 1) {
    const double next = tail + r.row(keep - 1).squaredNorm();
    if (next > drop_tol * total) break;
    tail = next;
    --keep;
  }

  // Second QR shrinks the kept rows to a keep x keep triangle.
  Mat b = r.topRows(keep).adjoint();
  Eigen::HouseholderQR<Mat> qr2(b);
  Mat m = qr2.matrixQR().topRows(keep).triangularView<Eigen::Upper>();

  SingularValues out;
  out.rank = static_cast<std::size_t>(keep);
  out.sweeps = hestenes(m, orth_tol, max_sweeps);
  out.values.resize(static_cast<std::size_t>(keep));
  for (Eigen::Index j = 0; j < keep; ++j) out.values[static_cast<std::size_t>(j)] = m.col(j).norm();
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

}  // namespace hfeq::linalg
