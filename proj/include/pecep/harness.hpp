#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pecep/bio_synth.hpp"
#include "pecep/entropy.hpp"
#include "pecep/fcn.hpp"

namespace pecep {

// ---------------------------------------------------------------------------
// Experiment 1: PECEP convergence on VAR data
// ---------------------------------------------------------------------------

struct Exp1Config {
  int d = 8;
  int p = 4;
  int band_width = 2;
  std::vector<double> noise_levels = {1e-2, 1.0};
  std::vector<std::int64_t> dataset_sizes = {1000, 10000, 100000};
  int n_trials = 5;
  double train_fraction = 0.8;
  bool chronological_split = true;  // shuffled split available behind this flag
  double rcond = -1.0;
  double ridge = 0.0;
  std::uint64_t master_seed = 42;
  int jobs = 0;  // 0 = hardware concurrency
};

Exp1Config exp1_profile(const std::string& name);  // "desk" or "paper"

struct Exp1Record {
  int trial = 0;
  double sigma2 = 0.0;
  std::int64_t n_total = 0;
  std::int64_t n_train = 0;
  std::int64_t n_test = 0;
  std::string predictor;  // "ols" or "oracle"
  EntropyReport report;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

struct Exp1Summary {
  double sigma2 = 0.0;
  std::int64_t n_total = 0;
  std::string predictor;
  int n_trials = 0;
  double mean_pecep = 0.0;
  double std_pecep = 0.0;
  double mean_whitening_gap = 0.0;
  double theoretical_bound = 0.0;
  double mean_bound_gap = 0.0;  // mean(pecep - theoretical_bound)
};

struct Exp1Result {
  Exp1Config config;
  std::vector<Exp1Record> records;
  std::vector<Exp1Summary> summary;
};

Exp1Result run_experiment1(const Exp1Config& cfg);
std::vector<Exp1Summary> summarize_exp1(const std::vector<Exp1Record>& records);

// ---------------------------------------------------------------------------
// Experiment 2: species complexity ranking
// ---------------------------------------------------------------------------

struct Exp2Config {
  int n_species = 4;
  int clips_per_species = 120;
  double clip_duration_s = 4.0;
  int sample_rate = 16000;
  int m = 12;  // context length (paper scale: 64)
  std::array<double, 3> split_fractions = {0.66, 0.14, 0.20};
  double ridge = 1e-6;
  bool pooled_per_species = false;  // pool call frames per species instead of per call
  FcnConfig fcn;
  LadderConfig ladder;
  std::uint64_t master_seed = 42;
  int jobs = 0;
  bool save_checkpoints = true;
  std::string audio_dir;  // when set, synthesized audio is also written here
};

Exp2Config exp2_profile(const std::string& name);  // "desk" or "paper"

struct CallRecord {
  int species = 0;
  int clip_id = 0;
  int call_index = 0;
  EntropyReport report;
};

struct SpeciesSummary {
  int species = 0;
  int n_calls = 0;
  double median_pecep = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double std_pecep = 0.0;
  bool failed = false;
  std::string error;
};

struct RankingResult {
  Exp2Config config;
  std::vector<CallRecord> calls;
  std::vector<SpeciesSummary> per_species;
  double spearman_rho = 0.0;   // of per-species medians vs species index
  int monotone_violations = 0; // adjacent median inversions
  bool complete = false;       // false when any species failed
};

RankingResult run_experiment2(const Exp2Config& cfg, const std::filesystem::path& out_dir = {});

// Ranking statistics over per-species medians.
double spearman_rho(const std::vector<double>& values);
int count_adjacent_inversions(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

// Generic table: fixed column order; float cells are rounded to 9
// significant digits at build time so CSV and JSON carry identical values.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

ReportTable exp1_records_table(const std::vector<Exp1Record>& records);
ReportTable exp1_summary_table(const std::vector<Exp1Summary>& summary);
ReportTable exp2_calls_table(const std::vector<CallRecord>& calls);

// Writes a table as CSV or as a JSON array of objects mirroring the CSV
// content plus a config echo. format: "csv" or "json".
void report_emit(const ReportTable& table, const std::string& format,
                 const std::filesystem::path& path,
                 const std::string& config_echo_json = {});

// Full result writers; format "csv", "json", or "both".
void write_exp1_outputs(const Exp1Result& result, const std::filesystem::path& out_dir,
                        const std::string& format = "both");
void write_exp2_outputs(const RankingResult& result, const std::filesystem::path& out_dir,
                        const std::string& format = "both");

}  // namespace pecep
