#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pecep/bio_types.hpp"
#include "pecep/fcn.hpp"
#include "pecep/linalg.hpp"

namespace pecep {

// Analysis defaults: 510-sample Hann window, 50% overlap, 256 retained
// one-sided bins (DC through Nyquist for an even 510-point transform).
inline constexpr int kStftWindow = 510;
inline constexpr int kStftHop = 255;
inline constexpr int kStftBins = kStftWindow / 2 + 1;  // 256

// Magnitude spectrogram, one frame per row: T = 1 + (len - window) / hop.
Mat stft_magnitude(std::span<const double> wave, int window = kStftWindow, int hop = kStftHop);

// Shared transform tables (window x bins, entry (t, b) = trig(2*pi*t*b/window))
// and the periodic Hann window. Synthesis uses the same tables as analysis so
// the spectral-continuity constraints act directly in analysis space.
const Mat& dft_cos(int window);
const Mat& dft_sin(int window);
const Vec& hann_window(int window);

// sigmoid(log10(max(in, floor))): maps raw magnitudes into (0, 1),
// strictly monotone above the floor.
Mat normalize_magnitude(const Mat& spec, double floor = 1e-10);

// Supervised next-frame rows with the two-step offset: for target index k
// the input is frames {k-2, k-3, ..., k-(m+1)} flattened most-recent-first,
// zero-padded before the clip start. One row per k in [0, T).
std::pair<Mat, Mat> build_context_dataset(const Mat& frames, int m);

// Fills preallocated batch matrices with context rows for the given target
// indices; same layout as build_context_dataset without materializing T rows.
void gather_context_rows(const Mat& frames, const std::vector<std::int64_t>& ks, int m,
                         Mat& inputs, Mat& targets);

// Batch source over a set of clips for FCN training; row space is the
// concatenation of all clip frames in clip order.
BatchSource context_batch_source(const std::vector<Mat>* clips, int m);

struct SplitIds {
  std::vector<int> train, val, test;
};

// Clip-level shuffled split; sizes are llround(fraction * n) for train and
// val, remainder test. Deterministic given the seed.
SplitIds split_clips(int n_clips, std::array<double, 3> fractions, std::uint64_t seed);

// Frame t covers samples [t*hop, t*hop + window); it is masked when that
// interval overlaps any annotated call.
std::vector<std::uint8_t> mask_call_frames(const ClipAnnotation& ann, int t_frames, int hop,
                                           int window);

// Inclusive frame index range [first, last] overlapping each call; empty
// ranges are marked first > last.
std::vector<std::pair<int, int>> call_frame_ranges(const ClipAnnotation& ann, int t_frames,
                                                   int hop, int window);

}  // namespace pecep
