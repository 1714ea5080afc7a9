#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pecep/linalg.hpp"
#include "pecep/var_sim.hpp"

namespace pecep {

// Linear next-frame predictor: prediction = context_row * coeffs, with
// coeffs in the (m*d) x d stacked layout of build_supervised.
struct LinearPredictor {
  std::string kind;  // "oracle" or "ols"
  Mat coeffs;

  int input_dim() const { return static_cast<int>(coeffs.rows()); }
  int output_dim() const { return static_cast<int>(coeffs.cols()); }
  const std::string& kind_name() const { return kind; }

  // Row-by-row products; keeps oracle residuals identical to the
  // simulation's innovation draws up to one rounding of the frame sum.
  Mat predict(const Mat& inputs) const;
};

LinearPredictor fit_ols(const Mat& design, const Mat& targets, double rcond = -1.0);
LinearPredictor oracle_predictor(const VarProcess& proc);

// Recovers the per-lag coefficient estimates A_i from a fitted linear
// predictor over d-dimensional frames.
std::vector<Mat> coefficient_blocks(const LinearPredictor& pred, int d);

// Prediction-error rows for one (predictor, dataset) pair.
struct ResidualBatch {
  Mat residuals;  // N_test x d
  std::string predictor_kind;
  std::string dataset_tag;
  std::optional<std::vector<std::uint8_t>> frame_mask;  // length N_test when present
};

template <typename Model>
ResidualBatch collect_residuals(const Model& model, const Mat& test_design,
                                const Mat& test_targets,
                                std::optional<std::vector<std::uint8_t>> mask = std::nullopt,
                                std::string dataset_tag = {}) {
  if (test_design.rows() != test_targets.rows()) {
    throw InvalidInputError("collect_residuals: design/target row mismatch");
  }
  if (model.input_dim() != static_cast<int>(test_design.cols()) ||
      model.output_dim() != static_cast<int>(test_targets.cols())) {
    throw InvalidInputError("collect_residuals: predictor dimensions do not match data");
  }
  if (mask && static_cast<Eigen::Index>(mask->size()) != test_design.rows()) {
    throw InvalidInputError("collect_residuals: mask length does not match rows");
  }
  ResidualBatch batch;
  batch.residuals = test_targets - model.predict(test_design);
  batch.predictor_kind = model.kind_name();
  batch.dataset_tag = std::move(dataset_tag);
  batch.frame_mask = std::move(mask);
  return batch;
}

}  // namespace pecep
