#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "pecep/linalg.hpp"

namespace pecep {

// Vector autoregression x_k = A_1 x_{k-1} + ... + A_p x_{k-p} + e_k with
// isotropic Gaussian innovations e_k ~ N(0, sigma2 * I).
struct VarProcess {
  int d = 8;
  int p = 4;
  std::vector<Mat> coeffs;  // p matrices, d x d
  double sigma2 = 1.0;
  std::uint64_t seed = 0;
};

// Band-diagonal coefficient matrices: entries with |row - col| <= band_width
// drawn from U(-1, 1), then scaled so that ||A_i||_F = 0.85^i exactly.
// band_width 0 keeps only the main diagonal.
std::vector<Mat> make_coefficients(int d, int p, int band_width, std::uint64_t seed);

// VAR(1) block-companion form of the coefficient list; spectral radius < 1
// is equivalent to stability.
Mat companion_matrix(const std::vector<Mat>& coeffs);

// Coefficients stacked into the (p*d) x d layout used by build_supervised:
// block i holds A_{i+1}^T, so prediction is context_row * stacked.
Mat stacked_coefficients(const std::vector<Mat>& coeffs);

// Draws coefficients, checks companion spectral radius < 1, and resamples
// with a new seed offset up to max_attempts times before giving up.
VarProcess make_stable_process(int d, int p, int band_width, double sigma2,
                               std::uint64_t seed, int max_attempts = 100);

struct SeriesData {
  Mat frames;  // N x d, one frame per row
  int burn_in_discarded = 0;
  VarProcess process;
  Mat noise;  // realized innovations, kept only when requested
};

// Iterates the recursion from zero history (or N(0, init_scale^2) history
// when init_scale > 0), discards a burn-in of 10*p frames, and records
// n_frames frames. Deterministic given the seed.
SeriesData simulate_var(const VarProcess& proc, std::int64_t n_frames, std::uint64_t seed,
                        double init_scale = 0.0, bool keep_noise = false);

// Supervised pairs: design row j is (x_{k-1}, ..., x_{k-m}) flattened
// most-recent-first, target row j is x_k, for k = m .. N-1.
std::pair<Mat, Mat> build_supervised(const Mat& frames, int m);

void write_series(const SeriesData& data, const std::filesystem::path& base);

}  // namespace pecep
