#include "pecep/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "pecep/rng.hpp"

namespace pecep {

namespace {

struct DftTables {
  Mat cos_t;  // window x bins, cos(2*pi*t*b/window)
  Mat sin_t;
  Vec hann;  // periodic Hann window
};

std::shared_ptr<const DftTables> dft_tables(int window) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const DftTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(window);
  if (it != cache.end()) return it->second;

  auto tables = std::make_shared<DftTables>();
  const int bins = window / 2 + 1;
  tables->cos_t = Mat(window, bins);
  tables->sin_t = Mat(window, bins);
  tables->hann = Vec(window);
  for (int t = 0; t < window; ++t) {
    tables->hann(t) = 0.5 * (1.0 - std::cos(2.0 * M_PI * t / window));
    for (int b = 0; b < bins; ++b) {
      const double angle = 2.0 * M_PI * static_cast<double>(t) * b / window;
      tables->cos_t(t, b) = std::cos(angle);
      tables->sin_t(t, b) = std::sin(angle);
    }
  }
  cache.emplace(window, tables);
  return tables;
}

}  // namespace

const Mat& dft_cos(int window) { return dft_tables(window)->cos_t; }
const Mat& dft_sin(int window) { return dft_tables(window)->sin_t; }
const Vec& hann_window(int window) { return dft_tables(window)->hann; }

Mat stft_magnitude(std::span<const double> wave, int window, int hop) {
  if (window < 2 || hop < 1) {
    throw InvalidInputError("stft_magnitude: bad window/hop");
  }
  if (static_cast<int>(wave.size()) < window) {
    throw InvalidInputError("stft_magnitude: wave shorter than the window");
  }
  const auto tables = dft_tables(window);
  const int bins = window / 2 + 1;
  const std::int64_t t_frames = 1 + (static_cast<std::int64_t>(wave.size()) - window) / hop;

  Mat framed(t_frames, window);
  for (std::int64_t t = 0; t < t_frames; ++t) {
    const std::int64_t off = t * hop;
    for (int i = 0; i < window; ++i) {
      framed(t, i) = wave[static_cast<std::size_t>(off + i)] * tables->hann(i);
    }
  }
  Mat re = framed * tables->cos_t;
  Mat im = framed * tables->sin_t;
  return (re.array().square() + im.array().square()).sqrt().matrix();
}

Mat normalize_magnitude(const Mat& spec, double floor) {
  if (floor <= 0.0) {
    throw InvalidInputError("normalize_magnitude: floor must be > 0");
  }
  if (spec.minCoeff() < 0.0) {
    throw InvalidInputError("normalize_magnitude: negative magnitudes");
  }
  Mat logged = spec.cwiseMax(floor).array().log10().matrix();
  return ((-logged.array()).exp() + 1.0).inverse().matrix();
}

void gather_context_rows(const Mat& frames, const std::vector<std::int64_t>& ks, int m,
                         Mat& inputs, Mat& targets) {
  const std::int64_t t_frames = frames.rows();
  const int f = static_cast<int>(frames.cols());
  for (std::size_t row = 0; row < ks.size(); ++row) {
    const std::int64_t k = ks[row];
    targets.row(static_cast<Eigen::Index>(row)) = frames.row(k);
    for (int j = 0; j < m; ++j) {
      const std::int64_t src = k - 2 - j;
      auto block = inputs.block(static_cast<Eigen::Index>(row),
                                static_cast<Eigen::Index>(j) * f, 1, f);
      if (src < 0 || src >= t_frames) {
        block.setZero();
      } else {
        block = frames.row(src);
      }
    }
  }
}

std::pair<Mat, Mat> build_context_dataset(const Mat& frames, int m) {
  if (m < 1) {
    throw InvalidInputError("build_context_dataset: context length must be >= 1");
  }
  const std::int64_t t_frames = frames.rows();
  const int f = static_cast<int>(frames.cols());
  Mat inputs(t_frames, static_cast<Eigen::Index>(m) * f);
  Mat targets(t_frames, f);
  std::vector<std::int64_t> ks(static_cast<std::size_t>(t_frames));
  for (std::int64_t k = 0; k < t_frames; ++k) ks[static_cast<std::size_t>(k)] = k;
  gather_context_rows(frames, ks, m, inputs, targets);
  return {std::move(inputs), std::move(targets)};
}

BatchSource context_batch_source(const std::vector<Mat>* clips, int m) {
  if (clips == nullptr || clips->empty()) {
    throw InvalidInputError("context_batch_source: no clips");
  }
  const int f = static_cast<int>((*clips)[0].cols());
  auto offsets = std::make_shared<std::vector<std::int64_t>>();
  offsets->reserve(clips->size() + 1);
  offsets->push_back(0);
  for (const Mat& c : *clips) {
    if (static_cast<int>(c.cols()) != f) {
      throw InvalidInputError("context_batch_source: inconsistent bin counts");
    }
    offsets->push_back(offsets->back() + c.rows());
  }
  BatchSource src;
  src.rows = offsets->back();
  src.in_dim = m * f;
  src.out_dim = f;
  src.gather = [clips, offsets, m, f](const std::vector<std::int64_t>& idx, Mat& in, Mat& tgt) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      // locate clip by prefix sums
      const auto it = std::upper_bound(offsets->begin(), offsets->end(), idx[i]);
      const std::size_t clip = static_cast<std::size_t>(it - offsets->begin()) - 1;
      const std::int64_t k = idx[i] - (*offsets)[clip];
      const Mat& frames = (*clips)[clip];
      const Eigen::Index row = static_cast<Eigen::Index>(i);
      tgt.row(row) = frames.row(k);
      for (int j = 0; j < m; ++j) {
        const std::int64_t src_idx = k - 2 - j;
        auto block = in.block(row, static_cast<Eigen::Index>(j) * f, 1, f);
        if (src_idx < 0 || src_idx >= frames.rows()) {
          block.setZero();
        } else {
          block = frames.row(src_idx);
        }
      }
    }
  };
  return src;
}

SplitIds split_clips(int n_clips, std::array<double, 3> fractions, std::uint64_t seed) {
  if (n_clips < 3) {
    throw InvalidInputError("split_clips: need at least 3 clips");
  }
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidConfigError("split_clips: fractions must sum to 1");
  }
  std::vector<int> ids(static_cast<std::size_t>(n_clips));
  for (int i = 0; i < n_clips; ++i) ids[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
    std::swap(ids[i - 1], ids[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * n_clips));
  const auto n_val = static_cast<std::size_t>(std::llround(fractions[1] * n_clips));
  SplitIds split;
  split.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                   ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::uint8_t> mask_call_frames(const ClipAnnotation& ann, int t_frames, int hop,
                                           int window) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(t_frames), 0);
  for (const auto& [onset, offset] : ann.calls) {
    for (int t = 0; t < t_frames; ++t) {
      const std::int64_t lo = static_cast<std::int64_t>(t) * hop;
      if (lo < offset && lo + window > onset) {
        mask[static_cast<std::size_t>(t)] = 1;
      }
    }
  }
  return mask;
}

std::vector<std::pair<int, int>> call_frame_ranges(const ClipAnnotation& ann, int t_frames,
                                                   int hop, int window) {
  std::vector<std::pair<int, int>> ranges;
  ranges.reserve(ann.calls.size());
  for (const auto& [onset, offset] : ann.calls) {
    int first = t_frames, last = -1;
    for (int t = 0; t < t_frames; ++t) {
      const std::int64_t lo = static_cast<std::int64_t>(t) * hop;
      if (lo < offset && lo + window > onset) {
        first = std::min(first, t);
        last = std::max(last, t);
      }
    }
    ranges.emplace_back(first, last);
  }
  return ranges;
}

}  // namespace pecep
