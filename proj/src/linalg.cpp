#include "pecep/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace pecep {

bool all_finite(const Mat& m) {
  return m.allFinite();
}

PsdMat PsdMat::from_symmetric(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError("PsdMat: matrix is not square");
  }
  if (!m.allFinite()) {
    throw InvalidInputError("PsdMat: non-finite entries");
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw InvalidInputError("PsdMat: matrix is not symmetric to tolerance");
  }
  Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -1e-10 * std::max(emax, 1e-300)) {
    throw InvalidCovarianceError("PsdMat: negative eigenvalue beyond tolerance");
  }
  return PsdMat(std::move(sym));
}

PsdMat PsdMat::from_unchecked(Mat m) {
  Mat sym = 0.5 * (m + m.transpose());
  return PsdMat(std::move(sym));
}

PsdMat sample_residual_covariance(const Mat& residuals) {
  const Eigen::Index n = residuals.rows();
  if (n < 2) {
    throw InsufficientSamplesError("sample_residual_covariance: need at least 2 rows");
  }
  if (!residuals.allFinite()) {
    throw InvalidInputError("sample_residual_covariance: non-finite entries");
  }
  const Eigen::Index d = residuals.cols();
  Mat cov = Mat::Zero(d, d);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(residuals.transpose(),
                                                 1.0 / static_cast<double>(n - 1));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return PsdMat::from_unchecked(std::move(cov));
}

double residual_mean_norm(const Mat& residuals) {
  if (residuals.rows() == 0) return 0.0;
  return (residuals.colwise().mean()).norm();
}

double log_det_psd(const PsdMat& m, double ridge) {
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw InvalidInputError("log_det_psd: ridge must be finite and >= 0");
  }
  Mat a = m.matrix();
  if (ridge > 0.0) {
    a.diagonal().array() += ridge;
  }
  Eigen::LDLT<Mat> ldlt(a);
  const Vec& diag = ldlt.vectorD();
  const int n = static_cast<int>(diag.size());
  const double dmax = diag.maxCoeff();
  // Pivots at or below working precision relative to the largest one mean
  // the factorization did not resolve a full-rank matrix.
  const double floor = std::max(dmax, 0.0) * static_cast<double>(n) *
                       std::numeric_limits<double>::epsilon() * 8.0;
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > floor)) {
      throw SingularMatrixError("log_det_psd: matrix singular to working precision");
    }
    log_det += std::log(diag[i]);
  }
  return log_det;
}

Mat solve_least_squares(const Mat& design, const Mat& targets, double rcond) {
  const Eigen::Index n = design.rows();
  const Eigen::Index q = design.cols();
  if (targets.rows() != n) {
    throw InvalidInputError("solve_least_squares: row count mismatch");
  }
  if (!design.allFinite() || !targets.allFinite()) {
    throw InvalidInputError("solve_least_squares: non-finite entries");
  }
  if (n < q) {
    throw UnderdeterminedSystemError("solve_least_squares: fewer rows than unknowns");
  }
  if (rcond < 0.0) {
    rcond = 1e-12 * static_cast<double>(std::max(n, q));
  }
  Eigen::BDCSVD<Mat> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rcond);
  return svd.solve(targets);
}

double spectral_radius(const Mat& square) {
  if (square.rows() != square.cols()) {
    throw InvalidInputError("spectral_radius: matrix is not square");
  }
  if (!square.allFinite()) {
    throw InvalidInputError("spectral_radius: non-finite entries");
  }
  if (square.rows() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(square, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace pecep
