#include "pecep/predictors.hpp"

namespace pecep {

Mat LinearPredictor::predict(const Mat& inputs) const {
  if (inputs.cols() != coeffs.rows()) {
    throw InvalidInputError("LinearPredictor::predict: input width mismatch");
  }
  Mat out(inputs.rows(), coeffs.cols());
  Eigen::RowVectorXd row(inputs.cols());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    row = inputs.row(i);
    out.row(i).noalias() = row * coeffs;
  }
  return out;
}

LinearPredictor fit_ols(const Mat& design, const Mat& targets, double rcond) {
  LinearPredictor pred;
  pred.kind = "ols";
  pred.coeffs = solve_least_squares(design, targets, rcond);
  return pred;
}

LinearPredictor oracle_predictor(const VarProcess& proc) {
  LinearPredictor pred;
  pred.kind = "oracle";
  pred.coeffs = stacked_coefficients(proc.coeffs);
  return pred;
}

std::vector<Mat> coefficient_blocks(const LinearPredictor& pred, int d) {
  if (d < 1 || pred.coeffs.rows() % d != 0) {
    throw InvalidInputError("coefficient_blocks: rows not a multiple of d");
  }
  if (pred.coeffs.cols() != d) {
    throw InvalidInputError("coefficient_blocks: output dimension != d");
  }
  const int m = static_cast<int>(pred.coeffs.rows() / d);
  std::vector<Mat> blocks;
  blocks.reserve(m);
  for (int i = 0; i < m; ++i) {
    blocks.push_back(pred.coeffs.block(static_cast<Eigen::Index>(i) * d, 0, d, d).transpose());
  }
  return blocks;
}

}  // namespace pecep
