#include "pecep/var_sim.hpp"

#include <cmath>
#include <string>

#include "pecep/rng.hpp"
#include "pecep/series_io.hpp"

namespace pecep {

std::vector<Mat> make_coefficients(int d, int p, int band_width, std::uint64_t seed) {
  if (d < 1 || p < 1) {
    throw InvalidInputError("make_coefficients: d and p must be >= 1");
  }
  if (band_width < 0 || band_width > d) {
    throw InvalidInputError("make_coefficients: band_width must be in [0, d]");
  }
  Rng rng(seed);
  std::vector<Mat> coeffs;
  coeffs.reserve(p);
  for (int i = 1; i <= p; ++i) {
    Mat a = Mat::Zero(d, d);
    double fnorm = 0.0;
    do {
      for (int r = 0; r < d; ++r) {
        const int lo = std::max(0, r - band_width);
        const int hi = std::min(d - 1, r + band_width);
        for (int c = lo; c <= hi; ++c) {
          a(r, c) = rng.uniform(-1.0, 1.0);
        }
      }
      fnorm = a.norm();
    } while (fnorm == 0.0);
    a *= std::pow(0.85, i) / fnorm;
    coeffs.push_back(std::move(a));
  }
  return coeffs;
}

Mat companion_matrix(const std::vector<Mat>& coeffs) {
  if (coeffs.empty()) {
    throw InvalidInputError("companion_matrix: empty coefficient list");
  }
  const int d = static_cast<int>(coeffs[0].rows());
  const int p = static_cast<int>(coeffs.size());
  Mat comp = Mat::Zero(static_cast<Eigen::Index>(p) * d, static_cast<Eigen::Index>(p) * d);
  for (int i = 0; i < p; ++i) {
    if (coeffs[i].rows() != d || coeffs[i].cols() != d) {
      throw InvalidInputError("companion_matrix: inconsistent coefficient shapes");
    }
    comp.block(0, static_cast<Eigen::Index>(i) * d, d, d) = coeffs[i];
  }
  for (int i = 1; i < p; ++i) {
    comp.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(i - 1) * d, d, d) =
        Mat::Identity(d, d);
  }
  return comp;
}

Mat stacked_coefficients(const std::vector<Mat>& coeffs) {
  if (coeffs.empty()) {
    throw InvalidInputError("stacked_coefficients: empty coefficient list");
  }
  const int d = static_cast<int>(coeffs[0].rows());
  const int p = static_cast<int>(coeffs.size());
  Mat stacked(static_cast<Eigen::Index>(p) * d, d);
  for (int i = 0; i < p; ++i) {
    stacked.block(static_cast<Eigen::Index>(i) * d, 0, d, d) = coeffs[i].transpose();
  }
  return stacked;
}

VarProcess make_stable_process(int d, int p, int band_width, double sigma2,
                               std::uint64_t seed, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Mat> coeffs =
        make_coefficients(d, p, band_width, Rng::mix(seed, static_cast<std::uint64_t>(attempt)));
    if (spectral_radius(companion_matrix(coeffs)) < 1.0) {
      VarProcess proc;
      proc.d = d;
      proc.p = p;
      proc.coeffs = std::move(coeffs);
      proc.sigma2 = sigma2;
      proc.seed = seed;
      return proc;
    }
  }
  throw UnstableProcessError("make_stable_process: no stable draw in " +
                             std::to_string(max_attempts) + " attempts");
}

SeriesData simulate_var(const VarProcess& proc, std::int64_t n_frames, std::uint64_t seed,
                        double init_scale, bool keep_noise) {
  const int d = proc.d;
  const int p = proc.p;
  if (static_cast<int>(proc.coeffs.size()) != p) {
    throw InvalidInputError("simulate_var: coefficient count does not match p");
  }
  if (n_frames <= p) {
    throw InvalidInputError("simulate_var: n_frames must exceed p");
  }
  if (spectral_radius(companion_matrix(proc.coeffs)) >= 1.0) {
    throw UnstableProcessError("simulate_var: companion spectral radius >= 1");
  }

  // Prediction uses the same stacked layout as build_supervised, so oracle
  // residuals reproduce the recorded innovations bit-for-bit.
  const Mat stacked = stacked_coefficients(proc.coeffs);
  const double sigma = std::sqrt(proc.sigma2);

  Rng rng(seed);
  Eigen::RowVectorXd history = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(p) * d);
  if (init_scale > 0.0) {
    for (Eigen::Index i = 0; i < history.size(); ++i) {
      history(i) = init_scale * rng.normal();
    }
  }

  const int burn_in = 10 * p;
  SeriesData out;
  out.burn_in_discarded = burn_in;
  out.process = proc;
  out.frames = Mat(n_frames, d);
  if (keep_noise) out.noise = Mat(n_frames, d);

  Eigen::RowVectorXd x(d), eps(d);
  for (std::int64_t k = 0; k < burn_in + n_frames; ++k) {
    for (int j = 0; j < d; ++j) {
      eps(j) = sigma * rng.normal();
    }
    x.noalias() = history * stacked;
    x += eps;
    // shift history: newest frame first
    for (int i = p - 1; i >= 1; --i) {
      history.segment(static_cast<Eigen::Index>(i) * d, d) =
          history.segment(static_cast<Eigen::Index>(i - 1) * d, d);
    }
    history.segment(0, d) = x;
    if (k >= burn_in) {
      out.frames.row(k - burn_in) = x;
      if (keep_noise) out.noise.row(k - burn_in) = eps;
    }
  }
  return out;
}

std::pair<Mat, Mat> build_supervised(const Mat& frames, int m) {
  const std::int64_t n = frames.rows();
  const int d = static_cast<int>(frames.cols());
  if (m < 1) {
    throw InvalidInputError("build_supervised: context length must be >= 1");
  }
  if (n <= m) {
    throw InsufficientDataError("build_supervised: need more than m frames");
  }
  const std::int64_t rows = n - m;
  Mat design(rows, static_cast<Eigen::Index>(m) * d);
  Mat targets(rows, d);
  for (std::int64_t k = m; k < n; ++k) {
    const std::int64_t j = k - m;
    for (int i = 0; i < m; ++i) {
      design.block(j, static_cast<Eigen::Index>(i) * d, 1, d) = frames.row(k - 1 - i);
    }
    targets.row(j) = frames.row(k);
  }
  return {std::move(design), std::move(targets)};
}

void write_series(const SeriesData& data, const std::filesystem::path& base) {
  nlohmann::ordered_json extra;
  extra["d"] = data.process.d;
  extra["N"] = static_cast<std::int64_t>(data.frames.rows());
  extra["p"] = data.process.p;
  extra["sigma2"] = data.process.sigma2;
  extra["seed"] = data.process.seed;
  extra["burn_in_discarded"] = data.burn_in_discarded;
  write_matrix_with_sidecar(base, data.frames, std::move(extra));
}

}  // namespace pecep
