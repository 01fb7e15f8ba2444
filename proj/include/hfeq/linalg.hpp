#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hfeq::linalg {

struct SingularValues {
  std::vector<double> values;  // descending
  int sweeps = 0;              // Jacobi sweeps used
  std::size_t rank = 0;        // rows kept after the rank-revealing QR
};

// Singular values by one-sided (Hestenes) Jacobi, iterated until every column
// pair satisfies |<a_p, a_q>| <= orth_tol * |a_p||a_q|. A pivoted QR first
// compresses A to its numerical rank; trailing rows whose combined squared
// norm is below drop_tol * |A|_F^2 are discarded (changes singular values by
// at most sqrt(drop_tol) |A|_F).
SingularValues singular_values(const Eigen::MatrixXcd& a, double orth_tol = 1e-12,
                               int max_sweeps = 80, double drop_tol = 1e-26);

}  // namespace hfeq::linalg
