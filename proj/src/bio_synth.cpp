#include "pecep/bio_synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pecep/config_json.hpp"
#include "pecep/spectro.hpp"
#include "pecep/wav.hpp"

namespace pecep {

namespace {

constexpr double kFormantFloorGain = 0.25;
constexpr double kHarmonicAmpJitter = 0.05;
constexpr double kCallRms = 0.15;  // pre-envelope call level, pre normalization

// Formant center multipliers relative to the f0 range midpoint; chosen to
// stay below the 8 kHz Nyquist for the widest default species.
constexpr double kFormantMultipliers[6] = {1.8, 2.8, 3.8, 4.8, 5.8, 6.8};

double lerp(double a, double b, double t) { return a + (b - a) * t; }

int lerp_int(int a, int b, double t) {
  return static_cast<int>(std::llround(lerp(static_cast<double>(a), static_cast<double>(b), t)));
}

void check_monotone(double simple, double complex_v, const char* name) {
  if (complex_v < simple) {
    throw InvalidConfigError(std::string("species_table: complexity field '") + name +
                             "' decreases toward the complex endpoint");
  }
}

// Clamped lognormal multiplier for timing/power jitter.
double jitter_factor(double jitter, Rng& rng) {
  if (jitter <= 0.0) return 1.0;
  return std::clamp(std::exp(jitter * rng.normal()), 0.25, 4.0);
}

}  // namespace

LadderConfig default_ladder() {
  LadderConfig cfg;
  cfg.simple = SpeciesEndpoints{};  // field defaults describe the simple end
  SpeciesEndpoints c;
  c.f0_min_hz = 300.0;
  c.f0_max_hz = 3000.0;
  c.harmonic_decay = 0.85;
  c.n_harmonics = 12;
  c.wiener_threshold = 0.50;
  c.euclid_threshold = 3.0;
  c.n_formants = 4;
  c.formant_bandwidth_frac = 0.25;
  c.timing_jitter = 0.40;
  c.power_jitter = 0.40;
  c.calls_per_bout_min = 2;
  c.calls_per_bout_max = 8;
  c.call_dur_min_s = 0.10;
  c.call_dur_max_s = 0.70;
  c.inter_call_gap_min_s = 0.05;
  c.inter_call_gap_max_s = 0.45;
  c.bout_gap_min_s = 0.20;
  c.bout_gap_max_s = 0.90;
  cfg.complex_end = c;
  cfg.noise_sigma = 0.003;
  cfg.sample_rate = 16000;
  return cfg;
}

std::vector<SpeciesSpec> species_table(int n_species, const LadderConfig& cfg) {
  if (n_species < 2) {
    throw InvalidInputError("species_table: need at least 2 species");
  }
  const SpeciesEndpoints& s = cfg.simple;
  const SpeciesEndpoints& c = cfg.complex_end;
  check_monotone(s.f0_max_hz - s.f0_min_hz, c.f0_max_hz - c.f0_min_hz, "f0 range width");
  check_monotone(s.harmonic_decay, c.harmonic_decay, "harmonic_decay");
  check_monotone(s.n_harmonics, c.n_harmonics, "n_harmonics");
  check_monotone(s.wiener_threshold, c.wiener_threshold, "wiener_threshold");
  check_monotone(s.euclid_threshold, c.euclid_threshold, "euclid_threshold");
  check_monotone(s.n_formants, c.n_formants, "n_formants");
  check_monotone(s.formant_bandwidth_frac, c.formant_bandwidth_frac, "formant_bandwidth_frac");
  check_monotone(s.timing_jitter, c.timing_jitter, "timing_jitter");
  check_monotone(s.power_jitter, c.power_jitter, "power_jitter");
  check_monotone(s.calls_per_bout_max - s.calls_per_bout_min,
                 c.calls_per_bout_max - c.calls_per_bout_min, "calls_per_bout range width");
  check_monotone(s.call_dur_max_s - s.call_dur_min_s, c.call_dur_max_s - c.call_dur_min_s,
                 "call_dur range width");
  check_monotone(s.inter_call_gap_max_s - s.inter_call_gap_min_s,
                 c.inter_call_gap_max_s - c.inter_call_gap_min_s,
                 "inter_call_gap range width");
  check_monotone(s.bout_gap_max_s - s.bout_gap_min_s, c.bout_gap_max_s - c.bout_gap_min_s,
                 "bout_gap range width");
  if (s.n_formants > 6 || c.n_formants > 6) {
    throw InvalidConfigError("species_table: at most 6 formants supported");
  }

  std::vector<SpeciesSpec> table;
  table.reserve(static_cast<std::size_t>(n_species));
  for (int i = 0; i < n_species; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_species - 1);
    SpeciesSpec sp;
    sp.index = i;
    sp.f0_min_hz = lerp(s.f0_min_hz, c.f0_min_hz, t);
    sp.f0_max_hz = lerp(s.f0_max_hz, c.f0_max_hz, t);
    sp.harmonic_decay = lerp(s.harmonic_decay, c.harmonic_decay, t);
    sp.n_harmonics = lerp_int(s.n_harmonics, c.n_harmonics, t);
    sp.wiener_threshold = lerp(s.wiener_threshold, c.wiener_threshold, t);
    sp.euclid_threshold = lerp(s.euclid_threshold, c.euclid_threshold, t);
    sp.timing_jitter = lerp(s.timing_jitter, c.timing_jitter, t);
    sp.power_jitter = lerp(s.power_jitter, c.power_jitter, t);
    sp.calls_per_bout_min = lerp_int(s.calls_per_bout_min, c.calls_per_bout_min, t);
    sp.calls_per_bout_max = lerp_int(s.calls_per_bout_max, c.calls_per_bout_max, t);
    sp.call_dur_min_s = lerp(s.call_dur_min_s, c.call_dur_min_s, t);
    sp.call_dur_max_s = lerp(s.call_dur_max_s, c.call_dur_max_s, t);
    sp.inter_call_gap_min_s = lerp(s.inter_call_gap_min_s, c.inter_call_gap_min_s, t);
    sp.inter_call_gap_max_s = lerp(s.inter_call_gap_max_s, c.inter_call_gap_max_s, t);
    sp.bout_gap_min_s = lerp(s.bout_gap_min_s, c.bout_gap_min_s, t);
    sp.bout_gap_max_s = lerp(s.bout_gap_max_s, c.bout_gap_max_s, t);
    sp.noise_sigma = cfg.noise_sigma;

    const int n_formants = lerp_int(s.n_formants, c.n_formants, t);
    const double bw_frac = lerp(s.formant_bandwidth_frac, c.formant_bandwidth_frac, t);
    const double f0_mid = 0.5 * (sp.f0_min_hz + sp.f0_max_hz);
    for (int j = 0; j < n_formants; ++j) {
      FormantSpec fm;
      fm.center_hz = f0_mid * kFormantMultipliers[j];
      fm.bandwidth_hz = bw_frac * fm.center_hz;
      sp.formants.push_back(fm);
    }
    table.push_back(std::move(sp));
  }
  return table;
}

double wiener_entropy(std::span<const double> spectrum) {
  if (spectrum.empty()) {
    throw InvalidInputError("wiener_entropy: empty spectrum");
  }
  double max_v = 0.0;
  for (double v : spectrum) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw InvalidInputError("wiener_entropy: magnitudes must be finite and >= 0");
    }
    max_v = std::max(max_v, v);
  }
  if (max_v == 0.0) {
    throw DegenerateSpectrumError("wiener_entropy: all-zero spectrum");
  }
  double log_sum = 0.0, sum = 0.0;
  for (double v : spectrum) {
    const double floored = std::max(v, 1e-12);
    log_sum += std::log(floored);
    sum += v;
  }
  const double n = static_cast<double>(spectrum.size());
  return std::exp(log_sum / n) / (sum / n);
}

double wiener_entropy(const Vec& spectrum) {
  return wiener_entropy(std::span<const double>(spectrum.data(),
                                                static_cast<std::size_t>(spectrum.size())));
}

Vec harmonic_stack(double f0, double decay, int n_harmonics, int n_bins, double bin_hz,
                   double amp_jitter, Rng* rng) {
  if (f0 <= 0.0 || bin_hz <= 0.0 || n_bins < 1 || n_harmonics < 1) {
    throw InvalidInputError("harmonic_stack: bad parameters");
  }
  Vec frame = Vec::Zero(n_bins);
  for (int k = 1; k <= n_harmonics; ++k) {
    const auto bin = static_cast<std::int64_t>(std::llround(k * f0 / bin_hz));
    if (bin >= n_bins) break;  // harmonics above the band are truncated
    double amp = std::pow(decay, k - 1);
    if (rng != nullptr && amp_jitter > 0.0) {
      amp *= std::exp(amp_jitter * rng->normal());
    }
    frame(static_cast<Eigen::Index>(bin)) += amp;
  }
  return frame;
}

Vec formant_gains(const SpeciesSpec& spec, int n_bins, double bin_hz) {
  Vec gains = Vec::Ones(n_bins);
  if (spec.formants.empty()) return gains;
  for (int b = 0; b < n_bins; ++b) {
    const double f = b * bin_hz;
    double peak = 0.0;
    for (const FormantSpec& fm : spec.formants) {
      const double z = (f - fm.center_hz) / fm.bandwidth_hz;
      peak = std::max(peak, std::exp(-0.5 * z * z));
    }
    gains(b) = kFormantFloorGain + (1.0 - kFormantFloorGain) * peak;
  }
  return gains;
}

Vec tilt_gains(int n_bins, double bin_hz) {
  Vec gains = Vec::Ones(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    const double f = b * bin_hz;
    if (f > 1000.0) {
      gains(b) = 1000.0 / f;  // -6 dB per octave above 1 kHz
    }
  }
  return gains;
}

Vec harmonic_frame(double f0, const SpeciesSpec& spec, int n_bins, double bin_hz, Rng& rng) {
  if (f0 < spec.f0_min_hz || f0 > spec.f0_max_hz) {
    throw InvalidInputError("harmonic_frame: f0 outside the species range");
  }
  Vec frame = harmonic_stack(f0, spec.harmonic_decay, spec.n_harmonics, n_bins, bin_hz,
                             kHarmonicAmpJitter, &rng);
  frame = frame.cwiseProduct(formant_gains(spec, n_bins, bin_hz));
  frame = frame.cwiseProduct(tilt_gains(n_bins, bin_hz));
  return frame;
}

Vec next_frame(const Vec& prev, double& f0, const SpeciesSpec& spec, int n_bins, double bin_hz,
               Rng& rng) {
  const double prev_wiener = wiener_entropy(prev);
  const auto passes = [&](const Vec& cand) {
    if ((cand - prev).norm() > spec.euclid_threshold) return false;
    return std::abs(wiener_entropy(cand) - prev_wiener) <= spec.wiener_threshold;
  };

  const double width = spec.f0_max_hz - spec.f0_min_hz;
  const double step = 0.1 * std::max(width, 1.0);
  Vec best;
  double best_f0 = f0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 50; ++attempt) {
    const double f0_cand = std::clamp(f0 + step * rng.normal(), spec.f0_min_hz, spec.f0_max_hz);
    Vec cand = harmonic_frame(f0_cand, spec, n_bins, bin_hz, rng);
    if (passes(cand)) {
      f0 = f0_cand;
      return cand;
    }
    const double dist = (cand - prev).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(cand);
      best_f0 = f0_cand;
    }
  }

  // Project the nearest rejected candidate back toward prev until it passes.
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Vec blend = prev + mid * (best - prev);
    if (passes(blend)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  f0 = f0 + lo * (best_f0 - f0);
  return prev + lo * (best - prev);
}

std::vector<double> call_envelope(std::int64_t n_samples, std::int64_t attack,
                                  std::int64_t release) {
  if (n_samples < 3) {
    throw InvalidInputError("call_envelope: need at least 3 samples");
  }
  attack = std::clamp<std::int64_t>(attack, 1, n_samples / 2 - 1);
  release = std::clamp<std::int64_t>(release, 1, n_samples / 2 - 1);
  std::vector<double> env(static_cast<std::size_t>(n_samples), 1.0);
  for (std::int64_t t = 0; t < attack; ++t) {
    const double s = std::sin(0.5 * M_PI * static_cast<double>(t) / static_cast<double>(attack));
    env[static_cast<std::size_t>(t)] = s * s;
  }
  const std::int64_t rel_start = n_samples - 1 - release;
  for (std::int64_t t = rel_start; t < n_samples; ++t) {
    const double c = std::cos(0.5 * M_PI * static_cast<double>(t - rel_start) /
                              static_cast<double>(release));
    env[static_cast<std::size_t>(t)] = c * c;
  }
  return env;
}

namespace {

// Frame-chain synthesis of one call: random-phase inverse transform of each
// spectral frame, Hann-windowed overlap-add at the analysis hop.
std::vector<double> render_call(const SpeciesSpec& spec, std::int64_t dur_samples,
                                int sample_rate, Rng& rng) {
  const int window = kStftWindow;
  const int hop = kStftHop;
  const int n_bins = kStftBins;
  const double bin_hz = static_cast<double>(sample_rate) / window;

  const std::int64_t n_frames = 1 + std::max<std::int64_t>(0, (dur_samples - window) / hop);
  double f0 = rng.uniform(spec.f0_min_hz, spec.f0_max_hz);
  Mat cos_coef(n_frames, n_bins), sin_coef(n_frames, n_bins);
  Vec frame = harmonic_frame(f0, spec, n_bins, bin_hz, rng);
  for (std::int64_t i = 0; i < n_frames; ++i) {
    if (i > 0) frame = next_frame(frame, f0, spec, n_bins, bin_hz, rng);
    for (int b = 0; b < n_bins; ++b) {
      const double phase = rng.uniform(0.0, 2.0 * M_PI);
      cos_coef(i, b) = frame(b) * std::cos(phase);
      sin_coef(i, b) = -frame(b) * std::sin(phase);
    }
  }

  Mat time_frames = cos_coef * dft_cos(window).transpose() +
                    sin_coef * dft_sin(window).transpose();  // n_frames x window

  std::vector<double> call(static_cast<std::size_t>(dur_samples), 0.0);
  const Vec& hann = hann_window(window);
  for (std::int64_t i = 0; i < n_frames; ++i) {
    const std::int64_t off = i * hop;
    for (int t = 0; t < window && off + t < dur_samples; ++t) {
      call[static_cast<std::size_t>(off + t)] += time_frames(i, t) * hann(t);
    }
  }

  double rms = 0.0;
  for (double v : call) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(dur_samples));
  if (rms > 0.0) {
    const double scale = kCallRms / rms;
    for (double& v : call) v *= scale;
  }

  const auto ramp = std::max<std::int64_t>(sample_rate / 200, dur_samples / 10);
  const std::vector<double> env = call_envelope(dur_samples, ramp, ramp);
  for (std::int64_t t = 0; t < dur_samples; ++t) {
    call[static_cast<std::size_t>(t)] *= env[static_cast<std::size_t>(t)];
  }
  const double power = jitter_factor(spec.power_jitter, rng);
  for (double& v : call) v *= power;
  return call;
}

}  // namespace

ClipResult synthesize_clip(const SpeciesSpec& spec, double duration_s, int sample_rate,
                           std::uint64_t seed) {
  if (duration_s <= 0.0 || sample_rate < 2000) {
    throw InvalidConfigError("synthesize_clip: bad duration or sample rate");
  }
  const auto n = static_cast<std::int64_t>(std::llround(duration_s * sample_rate));
  Rng rng(seed);

  ClipResult out;
  out.waveform.assign(static_cast<std::size_t>(n), 0.0);
  out.annotation.sample_rate = sample_rate;
  out.annotation.species = spec.index;

  std::int64_t cursor = sample_rate / 20;  // small fixed pre-roll
  bool fits = true;
  while (fits) {
    const int bout_first_call = static_cast<int>(out.annotation.calls.size());
    const int n_calls = rng.uniform_int(spec.calls_per_bout_min, spec.calls_per_bout_max);
    for (int c = 0; c < n_calls; ++c) {
      const double dur_s =
          rng.uniform(spec.call_dur_min_s, spec.call_dur_max_s) *
          jitter_factor(spec.timing_jitter, rng);
      const std::int64_t dur = std::max<std::int64_t>(
          kStftWindow, static_cast<std::int64_t>(std::llround(dur_s * sample_rate)));
      if (cursor + dur + sample_rate / 50 > n) {
        fits = false;
        break;
      }
      std::vector<double> call = render_call(spec, dur, sample_rate, rng);
      for (std::int64_t t = 0; t < dur; ++t) {
        out.waveform[static_cast<std::size_t>(cursor + t)] += call[static_cast<std::size_t>(t)];
      }
      out.annotation.calls.emplace_back(cursor, cursor + dur);
      cursor += dur;
      if (c + 1 < n_calls) {
        const double gap_s = rng.uniform(spec.inter_call_gap_min_s, spec.inter_call_gap_max_s) *
                             jitter_factor(spec.timing_jitter, rng);
        cursor += std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::llround(gap_s * sample_rate)));
      }
    }
    if (static_cast<int>(out.annotation.calls.size()) > bout_first_call) {
      out.annotation.bouts.emplace_back(bout_first_call,
                                        static_cast<int>(out.annotation.calls.size()) - 1);
    }
    const double bgap_s = rng.uniform(spec.bout_gap_min_s, spec.bout_gap_max_s) *
                          jitter_factor(spec.timing_jitter, rng);
    cursor += std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(bgap_s * sample_rate)));
  }
  if (out.annotation.calls.empty()) {
    throw InvalidConfigError("synthesize_clip: duration too short for a single call");
  }

  for (auto& v : out.waveform) {
    v += spec.noise_sigma * rng.normal();
  }
  double peak = 0.0;
  for (double v : out.waveform) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double scale = 0.9 / peak;
    for (double& v : out.waveform) v *= scale;
  }
  return out;
}

void write_species_corpus(const SpeciesSpec& spec, const std::vector<ClipResult>& clips,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json meta;
  meta["species"] = spec;
  meta["clips"] = nlohmann::ordered_json::array();
  for (const ClipResult& clip : clips) {
    const std::string name =
        std::to_string(spec.index) + "_" + std::to_string(clip.annotation.clip_id) + ".wav";
    write_wav16(out_dir / name, clip.waveform, clip.annotation.sample_rate);
    nlohmann::ordered_json cj;
    cj["clip_id"] = clip.annotation.clip_id;
    cj["species"] = clip.annotation.species;
    cj["sample_rate"] = clip.annotation.sample_rate;
    cj["file"] = name;
    cj["calls"] = clip.annotation.calls;
    cj["bouts"] = clip.annotation.bouts;
    meta["clips"].push_back(std::move(cj));
  }
  const std::filesystem::path ann_path =
      out_dir / ("species_" + std::to_string(spec.index) + "_annotations.json");
  std::ofstream out(ann_path, std::ios::trunc);
  if (!out) {
    throw IoError("write_species_corpus: cannot open " + ann_path.string());
  }
  out << meta.dump(2) << "\n";
}

}  // namespace pecep
