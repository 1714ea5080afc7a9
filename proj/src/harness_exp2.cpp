#include <algorithm>
#include <cmath>
#include <numeric>

#include "pecep/config_json.hpp"
#include "pecep/harness.hpp"
#include "pecep/parallel.hpp"
#include "pecep/rng.hpp"
#include "pecep/spectro.hpp"

namespace pecep {

namespace {

void validate_exp2(const Exp2Config& cfg) {
  if (cfg.n_species < 2) {
    throw InvalidConfigError("exp2: n_species must be >= 2");
  }
  if (cfg.clips_per_species < 3) {
    throw InvalidConfigError("exp2: clips_per_species must be >= 3");
  }
  const double sum = cfg.split_fractions[0] + cfg.split_fractions[1] + cfg.split_fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidConfigError("exp2: split fractions must sum to 1");
  }
  if (cfg.m < 1) {
    throw InvalidConfigError("exp2: context length m must be >= 1");
  }
  if (cfg.ridge < 0.0) {
    throw InvalidConfigError("exp2: ridge must be >= 0");
  }
}

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct SpeciesOutput {
  std::vector<CallRecord> calls;
  SpeciesSummary summary;
};

}  // namespace

Exp2Config exp2_profile(const std::string& name) {
  if (name == "desk") {
    Exp2Config cfg;
    cfg.fcn.epochs = 12;
    return cfg;
  }
  if (name == "paper") {
    Exp2Config cfg;
    cfg.n_species = 10;
    cfg.clips_per_species = 1200;
    cfg.m = 64;
    cfg.fcn.epochs = 50;
    return cfg;
  }
  throw InvalidConfigError("exp2_profile: unknown profile '" + name + "'");
}

double spearman_rho(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  // ranks with average ties
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
    i = j + 1;
  }
  // Pearson correlation between ranks and index order 0..n-1
  const double mean_rank = 0.5 * static_cast<double>(n + 1);
  const double mean_idx = 0.5 * static_cast<double>(n - 1);
  double num = 0.0, den_a = 0.0, den_b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = ranks[k] - mean_rank;
    const double b = static_cast<double>(k) - mean_idx;
    num += a * b;
    den_a += a * a;
    den_b += b * b;
  }
  if (den_a == 0.0 || den_b == 0.0) return 0.0;
  return num / std::sqrt(den_a * den_b);
}

int count_adjacent_inversions(const std::vector<double>& values) {
  int violations = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i + 1] > values[i])) ++violations;
  }
  return violations;
}

RankingResult run_experiment2(const Exp2Config& cfg, const std::filesystem::path& out_dir) {
  validate_exp2(cfg);
  const std::vector<SpeciesSpec> table = species_table(cfg.n_species, cfg.ladder);

  RankingResult result;
  result.config = cfg;
  std::vector<SpeciesOutput> outputs(static_cast<std::size_t>(cfg.n_species));

  parallel_for_tasks(cfg.n_species, cfg.jobs, [&](int species) {
    SpeciesOutput& out = outputs[static_cast<std::size_t>(species)];
    out.summary.species = species;
    const SpeciesSpec& spec = table[static_cast<std::size_t>(species)];
    const std::uint64_t species_seed = Rng::mix(cfg.master_seed, static_cast<std::uint64_t>(species));
    try {
      // ----- synthesis -----
      std::vector<ClipResult> clips(static_cast<std::size_t>(cfg.clips_per_species));
      for (int c = 0; c < cfg.clips_per_species; ++c) {
        const std::uint64_t clip_seed = Rng::mix(species_seed, static_cast<std::uint64_t>(c));
        clips[static_cast<std::size_t>(c)] =
            synthesize_clip(spec, cfg.clip_duration_s, cfg.sample_rate, clip_seed);
        clips[static_cast<std::size_t>(c)].annotation.clip_id = c;
      }
      if (!cfg.audio_dir.empty()) {
        write_species_corpus(spec, clips, std::filesystem::path(cfg.audio_dir));
      }

      // ----- spectrogram front end -----
      std::vector<Mat> spectra(clips.size());
      for (std::size_t c = 0; c < clips.size(); ++c) {
        spectra[c] = normalize_magnitude(stft_magnitude(clips[c].waveform));
      }
      const int t_frames = static_cast<int>(spectra[0].rows());

      const SplitIds split =
          split_clips(cfg.clips_per_species, cfg.split_fractions, Rng::mix(species_seed, 0x5B17));
      std::vector<Mat> train_clips, val_clips;
      for (int id : split.train) train_clips.push_back(spectra[static_cast<std::size_t>(id)]);
      for (int id : split.val) val_clips.push_back(spectra[static_cast<std::size_t>(id)]);

      // ----- one model per species -----
      FcnConfig fcn_cfg = cfg.fcn;
      fcn_cfg.seed = Rng::mix(species_seed, 0xFC);
      FcnModel model(fcn_cfg, cfg.m * kStftBins, kStftBins);
      const BatchSource train_src = context_batch_source(&train_clips, cfg.m);
      const BatchSource val_src = context_batch_source(&val_clips, cfg.m);
      const TrainResult curve = fcn_train(model, train_src, val_src, fcn_cfg);

      if (cfg.save_checkpoints && !out_dir.empty()) {
        nlohmann::ordered_json meta;
        meta["species"] = spec;
        meta["fcn"] = fcn_cfg;
        meta["train_mse"] = curve.train_mse;
        meta["val_mse"] = curve.val_mse;
        meta["train_clips"] = split.train.size();
        std::filesystem::create_directories(out_dir);
        model.save(out_dir / ("fcn_species_" + std::to_string(species)), meta.dump(2));
      }

      // ----- masked residual collection on test clips -----
      Mat pooled;
      std::int64_t pooled_rows = 0;
      for (int id : split.test) {
        const Mat& frames = spectra[static_cast<std::size_t>(id)];
        auto [inputs, targets] = build_context_dataset(frames, cfg.m);
        Mat residuals = targets - model.predict(inputs);
        const ClipAnnotation& ann = clips[static_cast<std::size_t>(id)].annotation;
        const auto ranges = call_frame_ranges(ann, t_frames, kStftHop, kStftWindow);
        for (std::size_t call = 0; call < ranges.size(); ++call) {
          const auto [first, last] = ranges[call];
          if (last < first + 1) continue;  // covariance needs at least 2 frames
          const Mat call_res = residuals.middleRows(first, last - first + 1);
          if (cfg.pooled_per_species) {
            pooled.conservativeResize(pooled_rows + call_res.rows(), call_res.cols());
            pooled.bottomRows(call_res.rows()) = call_res;
            pooled_rows += call_res.rows();
          } else {
            CallRecord rec;
            rec.species = species;
            rec.clip_id = id;
            rec.call_index = static_cast<int>(call);
            rec.report = entropy_report(call_res, cfg.ridge);
            out.calls.push_back(std::move(rec));
          }
        }
      }
      if (cfg.pooled_per_species && pooled_rows > 1) {
        CallRecord rec;
        rec.species = species;
        rec.clip_id = -1;
        rec.call_index = -1;
        rec.report = entropy_report(pooled, cfg.ridge);
        out.calls.push_back(std::move(rec));
      }

      std::vector<double> peceps;
      peceps.reserve(out.calls.size());
      for (const CallRecord& rec : out.calls) peceps.push_back(rec.report.pecep);
      if (peceps.empty()) {
        throw Error("exp2: no calls with enough frames for species " +
                    std::to_string(species));
      }
      std::sort(peceps.begin(), peceps.end());
      out.summary.n_calls = static_cast<int>(peceps.size());
      out.summary.median_pecep = quantile(peceps, 0.5);
      out.summary.q1 = quantile(peceps, 0.25);
      out.summary.q3 = quantile(peceps, 0.75);
      out.summary.iqr = out.summary.q3 - out.summary.q1;
      double mean = 0.0;
      for (double v : peceps) mean += v;
      mean /= static_cast<double>(peceps.size());
      double var = 0.0;
      for (double v : peceps) var += (v - mean) * (v - mean);
      out.summary.std_pecep =
          peceps.size() > 1 ? std::sqrt(var / static_cast<double>(peceps.size() - 1)) : 0.0;
    } catch (const std::exception& e) {
      out.summary.failed = true;
      out.summary.error = e.what();
      out.calls.clear();
    }
  });

  result.complete = true;
  std::vector<double> medians;
  for (SpeciesOutput& out : outputs) {
    result.per_species.push_back(out.summary);
    if (out.summary.failed) {
      result.complete = false;  // ranking continues over surviving species
    } else {
      medians.push_back(out.summary.median_pecep);
    }
    for (CallRecord& rec : out.calls) result.calls.push_back(std::move(rec));
  }
  result.spearman_rho = spearman_rho(medians);
  result.monotone_violations = count_adjacent_inversions(medians);
  return result;
}

}  // namespace pecep
