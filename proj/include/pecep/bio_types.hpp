#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pecep {

struct FormantSpec {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// One synthetic species: every complexity parameter is monotone
// non-decreasing in `index` across a generated table; noise_sigma is
// constant across the table.
struct SpeciesSpec {
  int index = 0;
  double f0_min_hz = 400.0;
  double f0_max_hz = 600.0;
  double harmonic_decay = 0.55;  // amplitude factor per harmonic step
  int n_harmonics = 5;
  double wiener_threshold = 0.02;  // max per-frame Wiener entropy change
  double euclid_threshold = 0.15;  // max consecutive-frame spectral distance
  std::vector<FormantSpec> formants;
  double timing_jitter = 0.02;  // fractional std of call/gap durations
  double power_jitter = 0.02;   // fractional std of call amplitude
  int calls_per_bout_min = 3;
  int calls_per_bout_max = 4;
  double call_dur_min_s = 0.16;
  double call_dur_max_s = 0.24;
  double inter_call_gap_min_s = 0.10;
  double inter_call_gap_max_s = 0.14;
  double bout_gap_min_s = 0.30;
  double bout_gap_max_s = 0.40;
  double noise_sigma = 0.003;
};

struct ClipAnnotation {
  int clip_id = 0;
  int species = 0;
  int sample_rate = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> calls;  // [onset, offset) samples
  std::vector<std::pair<int, int>> bouts;                    // inclusive call-index ranges
};

}  // namespace pecep
