#pragma once

#include <Eigen/Dense>

#include "pecep/errors.hpp"

namespace pecep {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

bool all_finite(const Mat& m);

// Symmetric positive semi-definite matrix, validated on construction:
// symmetry within 1e-10 relative tolerance and smallest eigenvalue
// >= -1e-10 * |largest eigenvalue|.
class PsdMat {
 public:
  static PsdMat from_symmetric(const Mat& m);

  // For matrices PSD by construction (e.g. Gram products). Symmetry is
  // still enforced exactly by averaging with the transpose.
  static PsdMat from_unchecked(Mat m);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit PsdMat(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

// Sample covariance of zero-mean prediction residuals:
// (1/(N-1)) * sum_l r_l r_l^T. No mean subtraction is performed.
PsdMat sample_residual_covariance(const Mat& residuals);

// Euclidean norm of the column-wise mean of a residual batch. Diagnostic
// for the zero-mean assumption behind sample_residual_covariance.
double residual_mean_norm(const Mat& residuals);

// ln det(m + ridge*I) via LDLT, summing logs of the factor diagonal.
// Throws SingularMatrixError when the matrix is singular to working
// precision and no ridge rescues it.
double log_det_psd(const PsdMat& m, double ridge = 0.0);

// Minimum-norm least-squares solution of design * B = targets via SVD.
// Singular values below rcond * sigma_max are truncated; rcond < 0
// selects the default 1e-12 * max(N, q).
Mat solve_least_squares(const Mat& design, const Mat& targets, double rcond = -1.0);

// Largest absolute eigenvalue of a square matrix.
double spectral_radius(const Mat& square);

}  // namespace pecep
