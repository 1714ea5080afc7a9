#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pecep/bio_types.hpp"
#include "pecep/linalg.hpp"
#include "pecep/rng.hpp"

namespace pecep {

// One endpoint of the species ladder. species_table interpolates every
// field linearly between the simple and complex endpoints.
struct SpeciesEndpoints {
  double f0_min_hz = 400.0;
  double f0_max_hz = 600.0;
  double harmonic_decay = 0.55;
  int n_harmonics = 5;
  double wiener_threshold = 0.02;
  double euclid_threshold = 0.15;
  int n_formants = 2;
  double formant_bandwidth_frac = 0.12;  // bandwidth as a fraction of center
  double timing_jitter = 0.02;
  double power_jitter = 0.02;
  int calls_per_bout_min = 3;
  int calls_per_bout_max = 4;
  double call_dur_min_s = 0.16;
  double call_dur_max_s = 0.24;
  double inter_call_gap_min_s = 0.10;
  double inter_call_gap_max_s = 0.14;
  double bout_gap_min_s = 0.30;
  double bout_gap_max_s = 0.40;
};

struct LadderConfig {
  SpeciesEndpoints simple;
  SpeciesEndpoints complex_end;
  double noise_sigma = 0.003;  // constant across every species
  int sample_rate = 16000;
};

LadderConfig default_ladder();

// n_species specs interpolated from the simple to the complex endpoint;
// throws InvalidConfigError when the endpoints would break monotonicity.
std::vector<SpeciesSpec> species_table(int n_species, const LadderConfig& cfg);

// Geometric mean over arithmetic mean of a magnitude spectrum, in [0, 1].
// Zeros are floored at 1e-12 before the geometric mean.
double wiener_entropy(std::span<const double> spectrum);
double wiener_entropy(const Vec& spectrum);

// Harmonic stack alone: energy at bins nearest k*f0 with amplitude
// harmonic_decay^(k-1), optionally jittered per harmonic.
Vec harmonic_stack(double f0, double decay, int n_harmonics, int n_bins, double bin_hz,
                   double amp_jitter, Rng* rng);

// Multiplicative per-bin gains.
Vec formant_gains(const SpeciesSpec& spec, int n_bins, double bin_hz);
Vec tilt_gains(int n_bins, double bin_hz);  // -6 dB/octave above 1 kHz

// Full spectral frame: harmonic stack, then formant gains, then tilt.
Vec harmonic_frame(double f0, const SpeciesSpec& spec, int n_bins, double bin_hz, Rng& rng);

// Proposes a spectral step (f0 random walk + fresh harmonic frame) and
// accepts it only within the species' Wiener-entropy and Euclidean-distance
// budgets; after 50 rejected proposals the best candidate is projected back
// toward prev until it satisfies both constraints. f0 is updated in place.
Vec next_frame(const Vec& prev, double& f0, const SpeciesSpec& spec, int n_bins, double bin_hz,
               Rng& rng);

// sin^2 attack / cos^2 release amplitude envelope: first and last sample
// exactly zero, plateau at one.
std::vector<double> call_envelope(std::int64_t n_samples, std::int64_t attack,
                                  std::int64_t release);

struct ClipResult {
  std::vector<double> waveform;
  ClipAnnotation annotation;
};

// Bout/call layout, frame-chain synthesis with random phases and Hann
// overlap-add, per-call envelope and power jitter, constant additive
// Gaussian noise, peak normalization to 0.9.
ClipResult synthesize_clip(const SpeciesSpec& spec, double duration_s, int sample_rate,
                           std::uint64_t seed);

// Writes {species}_{clip_id}.wav files plus one annotations JSON per
// species (all ClipAnnotations and the generating SpeciesSpec).
void write_species_corpus(const SpeciesSpec& spec, const std::vector<ClipResult>& clips,
                          const std::filesystem::path& out_dir);

}  // namespace pecep
