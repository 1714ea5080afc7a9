#pragma once

#include <nlohmann/json.hpp>

#include "pecep/bio_synth.hpp"
#include "pecep/fcn.hpp"
#include "pecep/harness.hpp"

// JSON (de)serialization for every config and spec type. from_json reads
// only the keys present, so sparse override files work on top of profile
// defaults. Template parameters keep both json and ordered_json usable.

namespace pecep {

template <typename J, typename T>
void maybe_get(const J& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

template <typename J>
void to_json(J& j, const FormantSpec& f) {
  j = J{{"center_hz", f.center_hz}, {"bandwidth_hz", f.bandwidth_hz}};
}

template <typename J>
void from_json(const J& j, FormantSpec& f) {
  maybe_get(j, "center_hz", f.center_hz);
  maybe_get(j, "bandwidth_hz", f.bandwidth_hz);
}

template <typename J>
void to_json(J& j, const SpeciesSpec& s) {
  j = J{{"index", s.index},
        {"f0_min_hz", s.f0_min_hz},
        {"f0_max_hz", s.f0_max_hz},
        {"harmonic_decay", s.harmonic_decay},
        {"n_harmonics", s.n_harmonics},
        {"wiener_threshold", s.wiener_threshold},
        {"euclid_threshold", s.euclid_threshold},
        {"formants", s.formants},
        {"timing_jitter", s.timing_jitter},
        {"power_jitter", s.power_jitter},
        {"calls_per_bout_min", s.calls_per_bout_min},
        {"calls_per_bout_max", s.calls_per_bout_max},
        {"call_dur_min_s", s.call_dur_min_s},
        {"call_dur_max_s", s.call_dur_max_s},
        {"inter_call_gap_min_s", s.inter_call_gap_min_s},
        {"inter_call_gap_max_s", s.inter_call_gap_max_s},
        {"bout_gap_min_s", s.bout_gap_min_s},
        {"bout_gap_max_s", s.bout_gap_max_s},
        {"noise_sigma", s.noise_sigma}};
}

template <typename J>
void from_json(const J& j, SpeciesSpec& s) {
  maybe_get(j, "index", s.index);
  maybe_get(j, "f0_min_hz", s.f0_min_hz);
  maybe_get(j, "f0_max_hz", s.f0_max_hz);
  maybe_get(j, "harmonic_decay", s.harmonic_decay);
  maybe_get(j, "n_harmonics", s.n_harmonics);
  maybe_get(j, "wiener_threshold", s.wiener_threshold);
  maybe_get(j, "euclid_threshold", s.euclid_threshold);
  maybe_get(j, "formants", s.formants);
  maybe_get(j, "timing_jitter", s.timing_jitter);
  maybe_get(j, "power_jitter", s.power_jitter);
  maybe_get(j, "calls_per_bout_min", s.calls_per_bout_min);
  maybe_get(j, "calls_per_bout_max", s.calls_per_bout_max);
  maybe_get(j, "call_dur_min_s", s.call_dur_min_s);
  maybe_get(j, "call_dur_max_s", s.call_dur_max_s);
  maybe_get(j, "inter_call_gap_min_s", s.inter_call_gap_min_s);
  maybe_get(j, "inter_call_gap_max_s", s.inter_call_gap_max_s);
  maybe_get(j, "bout_gap_min_s", s.bout_gap_min_s);
  maybe_get(j, "bout_gap_max_s", s.bout_gap_max_s);
  maybe_get(j, "noise_sigma", s.noise_sigma);
}

template <typename J>
void to_json(J& j, const SpeciesEndpoints& e) {
  j = J{{"f0_min_hz", e.f0_min_hz},
        {"f0_max_hz", e.f0_max_hz},
        {"harmonic_decay", e.harmonic_decay},
        {"n_harmonics", e.n_harmonics},
        {"wiener_threshold", e.wiener_threshold},
        {"euclid_threshold", e.euclid_threshold},
        {"n_formants", e.n_formants},
        {"formant_bandwidth_frac", e.formant_bandwidth_frac},
        {"timing_jitter", e.timing_jitter},
        {"power_jitter", e.power_jitter},
        {"calls_per_bout_min", e.calls_per_bout_min},
        {"calls_per_bout_max", e.calls_per_bout_max},
        {"call_dur_min_s", e.call_dur_min_s},
        {"call_dur_max_s", e.call_dur_max_s},
        {"inter_call_gap_min_s", e.inter_call_gap_min_s},
        {"inter_call_gap_max_s", e.inter_call_gap_max_s},
        {"bout_gap_min_s", e.bout_gap_min_s},
        {"bout_gap_max_s", e.bout_gap_max_s}};
}

template <typename J>
void from_json(const J& j, SpeciesEndpoints& e) {
  maybe_get(j, "f0_min_hz", e.f0_min_hz);
  maybe_get(j, "f0_max_hz", e.f0_max_hz);
  maybe_get(j, "harmonic_decay", e.harmonic_decay);
  maybe_get(j, "n_harmonics", e.n_harmonics);
  maybe_get(j, "wiener_threshold", e.wiener_threshold);
  maybe_get(j, "euclid_threshold", e.euclid_threshold);
  maybe_get(j, "n_formants", e.n_formants);
  maybe_get(j, "formant_bandwidth_frac", e.formant_bandwidth_frac);
  maybe_get(j, "timing_jitter", e.timing_jitter);
  maybe_get(j, "power_jitter", e.power_jitter);
  maybe_get(j, "calls_per_bout_min", e.calls_per_bout_min);
  maybe_get(j, "calls_per_bout_max", e.calls_per_bout_max);
  maybe_get(j, "call_dur_min_s", e.call_dur_min_s);
  maybe_get(j, "call_dur_max_s", e.call_dur_max_s);
  maybe_get(j, "inter_call_gap_min_s", e.inter_call_gap_min_s);
  maybe_get(j, "inter_call_gap_max_s", e.inter_call_gap_max_s);
  maybe_get(j, "bout_gap_min_s", e.bout_gap_min_s);
  maybe_get(j, "bout_gap_max_s", e.bout_gap_max_s);
}

template <typename J>
void to_json(J& j, const LadderConfig& c) {
  j = J{{"simple", c.simple},
        {"complex", c.complex_end},
        {"noise_sigma", c.noise_sigma},
        {"sample_rate", c.sample_rate}};
}

template <typename J>
void from_json(const J& j, LadderConfig& c) {
  maybe_get(j, "simple", c.simple);
  maybe_get(j, "complex", c.complex_end);
  maybe_get(j, "noise_sigma", c.noise_sigma);
  maybe_get(j, "sample_rate", c.sample_rate);
}

template <typename J>
void to_json(J& j, const FcnConfig& c) {
  j = J{{"hidden1", c.hidden1},
        {"hidden2", c.hidden2},
        {"dropout_rate", c.dropout_rate},
        {"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"base_learning_rate", c.base_learning_rate},
        {"weight_decay", c.weight_decay},
        {"seed", c.seed}};
}

template <typename J>
void from_json(const J& j, FcnConfig& c) {
  maybe_get(j, "hidden1", c.hidden1);
  maybe_get(j, "hidden2", c.hidden2);
  maybe_get(j, "dropout_rate", c.dropout_rate);
  maybe_get(j, "epochs", c.epochs);
  maybe_get(j, "batch_size", c.batch_size);
  maybe_get(j, "base_learning_rate", c.base_learning_rate);
  maybe_get(j, "weight_decay", c.weight_decay);
  maybe_get(j, "seed", c.seed);
}

template <typename J>
void to_json(J& j, const Exp1Config& c) {
  j = J{{"d", c.d},
        {"p", c.p},
        {"band_width", c.band_width},
        {"noise_levels", c.noise_levels},
        {"dataset_sizes", c.dataset_sizes},
        {"n_trials", c.n_trials},
        {"train_fraction", c.train_fraction},
        {"chronological_split", c.chronological_split},
        {"rcond", c.rcond},
        {"ridge", c.ridge},
        {"master_seed", c.master_seed},
        {"jobs", c.jobs}};
}

template <typename J>
void from_json(const J& j, Exp1Config& c) {
  maybe_get(j, "d", c.d);
  maybe_get(j, "p", c.p);
  maybe_get(j, "band_width", c.band_width);
  maybe_get(j, "noise_levels", c.noise_levels);
  maybe_get(j, "dataset_sizes", c.dataset_sizes);
  maybe_get(j, "n_trials", c.n_trials);
  maybe_get(j, "train_fraction", c.train_fraction);
  maybe_get(j, "chronological_split", c.chronological_split);
  maybe_get(j, "rcond", c.rcond);
  maybe_get(j, "ridge", c.ridge);
  maybe_get(j, "master_seed", c.master_seed);
  maybe_get(j, "jobs", c.jobs);
}

template <typename J>
void to_json(J& j, const Exp2Config& c) {
  j = J{{"n_species", c.n_species},
        {"clips_per_species", c.clips_per_species},
        {"clip_duration_s", c.clip_duration_s},
        {"sample_rate", c.sample_rate},
        {"m", c.m},
        {"split_fractions", c.split_fractions},
        {"ridge", c.ridge},
        {"pooled_per_species", c.pooled_per_species},
        {"fcn", c.fcn},
        {"ladder", c.ladder},
        {"master_seed", c.master_seed},
        {"jobs", c.jobs},
        {"save_checkpoints", c.save_checkpoints},
        {"audio_dir", c.audio_dir}};
}

template <typename J>
void from_json(const J& j, Exp2Config& c) {
  maybe_get(j, "n_species", c.n_species);
  maybe_get(j, "clips_per_species", c.clips_per_species);
  maybe_get(j, "clip_duration_s", c.clip_duration_s);
  maybe_get(j, "sample_rate", c.sample_rate);
  maybe_get(j, "m", c.m);
  maybe_get(j, "split_fractions", c.split_fractions);
  maybe_get(j, "ridge", c.ridge);
  maybe_get(j, "pooled_per_species", c.pooled_per_species);
  maybe_get(j, "fcn", c.fcn);
  maybe_get(j, "ladder", c.ladder);
  maybe_get(j, "master_seed", c.master_seed);
  maybe_get(j, "jobs", c.jobs);
  maybe_get(j, "save_checkpoints", c.save_checkpoints);
  maybe_get(j, "audio_dir", c.audio_dir);
}

}  // namespace pecep
