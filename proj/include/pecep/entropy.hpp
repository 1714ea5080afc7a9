#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pecep/linalg.hpp"

namespace pecep {

// ln(2*pi*e)
inline constexpr double kLn2PiE = 2.8378770664093453;

// Entropy proxy figures for one residual batch, in nats.
struct EntropyReport {
  int d = 0;
  double pecep = 0.0;
  double hadamard_bound = 0.0;
  double whitening_gap = 0.0;      // clamped at 0 when within -1e-9 of zero
  double whitening_gap_raw = 0.0;  // hadamard_bound - pecep, unclamped
  std::optional<double> theoretical_bound;
  double ridge_used = 0.0;
  std::int64_t n_residuals = 0;
  double residual_mean_norm = 0.0;  // diagnostic for the zero-mean assumption
};

// (d/2) ln(2*pi*e) + (1/2) ln det(cov + ridge*I): the Gaussian entropy of the
// given covariance, used as the prediction-error conditional entropy proxy.
double pecep_score(const PsdMat& cov, double ridge = 0.0);

// (d/2) ln(2*pi*e) + (1/2) sum_i ln(cov_ii). Upper-bounds pecep_score by
// Hadamard's inequality; tight exactly when cov is diagonal.
double hadamard_bound(const PsdMat& cov);

// hadamard_bound(cov) - pecep_score(cov, ridge). Near zero when the residual
// dimensions are uncorrelated.
double whitening_gap(const PsdMat& cov, double ridge = 0.0);

// (d/2) ln(2*pi*e*sigma2): entropy of N(0, sigma2*I) in d dimensions.
double gaussian_noise_entropy(double sigma2, int d);

EntropyReport entropy_report(const Mat& residuals, double ridge = 0.0,
                             std::optional<double> theoretical = std::nullopt);
EntropyReport entropy_report_from_cov(const PsdMat& cov, double ridge,
                                      std::int64_t n_residuals,
                                      std::optional<double> theoretical = std::nullopt,
                                      double mean_norm = 0.0);

// Fixed serialization order: d, pecep, hadamard_bound, whitening_gap,
// theoretical_bound, ridge_used, n_residuals.
std::string entropy_report_csv_header();
std::string entropy_report_csv_row(const EntropyReport& r);
std::string entropy_report_json(const EntropyReport& r);

}  // namespace pecep
