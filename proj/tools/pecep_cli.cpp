#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pecep/config_json.hpp"
#include "pecep/harness.hpp"
#include "pecep/predictors.hpp"
#include "pecep/series_io.hpp"
#include "pecep/spectro.hpp"
#include "pecep/var_sim.hpp"

namespace {

using namespace pecep;

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) {
    throw InvalidConfigError("cannot open config file " + path);
  }
  return nlohmann::json::parse(in);
}

struct CommonOpts {
  std::string config_path;
  std::string profile = "desk";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  std::string format = "both";
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file overriding profile defaults");
  cmd->add_option("--profile", opts.profile, "Config profile: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", opts.seed, "Master seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--format", opts.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--jobs", opts.jobs, "Parallel jobs (0 = hardware)");
}

int cmd_gen_var(const CommonOpts& opts, int d, int p, int band_width, double sigma2,
                std::int64_t n_frames) {
  Exp1Config base = exp1_profile(opts.profile);
  if (d > 0) base.d = d;
  if (p > 0) base.p = p;
  if (band_width >= 0) base.band_width = band_width;
  if (opts.seed_set) base.master_seed = opts.seed;
  VarProcess proc =
      make_stable_process(base.d, base.p, base.band_width, sigma2, base.master_seed);
  SeriesData series = simulate_var(proc, n_frames, Rng::mix(base.master_seed, 0x51));
  std::filesystem::create_directories(opts.out_dir);
  write_series(series, std::filesystem::path(opts.out_dir) / "var_series");
  std::cout << "wrote " << opts.out_dir << "/var_series.f64 (" << series.frames.rows() << " x "
            << series.frames.cols() << ")\n";
  return 0;
}

int cmd_gen_audio(const CommonOpts& opts, int n_species, int clips, double duration_s) {
  Exp2Config cfg = exp2_profile(opts.profile);
  nlohmann::json file_cfg = load_config_file(opts.config_path);
  if (!file_cfg.is_null() && !file_cfg.empty()) file_cfg.get_to(cfg);
  if (n_species > 0) cfg.n_species = n_species;
  if (clips > 0) cfg.clips_per_species = clips;
  if (duration_s > 0) cfg.clip_duration_s = duration_s;
  if (opts.seed_set) cfg.master_seed = opts.seed;

  const auto table = species_table(cfg.n_species, cfg.ladder);
  for (const SpeciesSpec& spec : table) {
    const std::uint64_t species_seed =
        Rng::mix(cfg.master_seed, static_cast<std::uint64_t>(spec.index));
    std::vector<ClipResult> results;
    results.reserve(static_cast<std::size_t>(cfg.clips_per_species));
    for (int c = 0; c < cfg.clips_per_species; ++c) {
      ClipResult clip = synthesize_clip(spec, cfg.clip_duration_s, cfg.sample_rate,
                                        Rng::mix(species_seed, static_cast<std::uint64_t>(c)));
      clip.annotation.clip_id = c;
      results.push_back(std::move(clip));
    }
    write_species_corpus(spec, results, opts.out_dir);
    std::cout << "species " << spec.index << ": " << results.size() << " clips\n";
  }
  return 0;
}

int cmd_exp1(const CommonOpts& opts) {
  Exp1Config cfg = exp1_profile(opts.profile);
  nlohmann::json file_cfg = load_config_file(opts.config_path);
  if (!file_cfg.is_null() && !file_cfg.empty()) file_cfg.get_to(cfg);
  if (opts.seed_set) cfg.master_seed = opts.seed;
  if (opts.jobs > 0) cfg.jobs = opts.jobs;
  Exp1Result result = run_experiment1(cfg);
  write_exp1_outputs(result, opts.out_dir, opts.format);
  int failed = 0;
  for (const auto& rec : result.records) failed += rec.failed ? 1 : 0;
  std::cout << "exp1: " << result.records.size() << " records (" << failed
            << " failed), reports in " << opts.out_dir << "\n";
  return 0;
}

int cmd_exp2(const CommonOpts& opts) {
  Exp2Config cfg = exp2_profile(opts.profile);
  nlohmann::json file_cfg = load_config_file(opts.config_path);
  if (!file_cfg.is_null() && !file_cfg.empty()) file_cfg.get_to(cfg);
  if (opts.seed_set) cfg.master_seed = opts.seed;
  if (opts.jobs > 0) cfg.jobs = opts.jobs;
  RankingResult result = run_experiment2(cfg, opts.out_dir);
  write_exp2_outputs(result, opts.out_dir, opts.format);
  std::cout << "exp2: " << result.calls.size() << " call reports, spearman_rho="
            << result.spearman_rho << ", violations=" << result.monotone_violations
            << (result.complete ? "" : " (INCOMPLETE: species failures)") << "\n";
  if (!result.complete) return 2;
  return 0;
}

int cmd_pecep(const CommonOpts& opts, const std::string& residual_base, double ridge,
              double theoretical, bool has_theoretical) {
  MatrixFile file = read_matrix_with_sidecar(residual_base);
  std::optional<double> bound;
  if (has_theoretical) bound = theoretical;
  EntropyReport report = entropy_report(file.data, ridge, bound);
  const std::string json = entropy_report_json(report);
  if (opts.out_dir.empty() || opts.out_dir == "-") {
    std::cout << json << "\n";
  } else {
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream out(std::filesystem::path(opts.out_dir) / "pecep_report.json");
    if (!out) throw IoError("cannot write pecep_report.json");
    out << json << "\n";
    std::cout << "wrote " << opts.out_dir << "/pecep_report.json\n";
  }
  return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& kind, const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw InvalidConfigError("cannot open records file " + in_path);
  nlohmann::json doc = nlohmann::json::parse(in);
  const auto& records = doc.contains("records") ? doc["records"] : doc;
  if (!records.is_array() || records.empty()) {
    throw InvalidInputError("report: no records in " + in_path);
  }
  std::filesystem::create_directories(opts.out_dir);
  if (kind == "exp1") {
    std::vector<Exp1Record> recs;
    for (const auto& r : records) {
      Exp1Record rec;
      rec.trial = r.value("trial", 0);
      rec.sigma2 = r.value("sigma2", 0.0);
      rec.n_total = r.value("n_total", static_cast<std::int64_t>(0));
      rec.predictor = r.value("predictor", "");
      rec.failed = r.value("failed", false);
      rec.report.pecep = r.value("pecep", 0.0);
      rec.report.whitening_gap = r.value("whitening_gap", 0.0);
      if (r.contains("theoretical_bound") && !r["theoretical_bound"].is_null()) {
        rec.report.theoretical_bound = r["theoretical_bound"].get<double>();
      }
      recs.push_back(std::move(rec));
    }
    const auto summary = summarize_exp1(recs);
    report_emit(exp1_summary_table(summary), "csv",
                std::filesystem::path(opts.out_dir) / "exp1_summary.csv");
    report_emit(exp1_summary_table(summary), "json",
                std::filesystem::path(opts.out_dir) / "exp1_summary.json");
    std::cout << "wrote exp1 summary for " << recs.size() << " records\n";
    return 0;
  }
  if (kind == "exp2") {
    // Aggregate per-call records into the ranking statistics.
    std::map<int, std::vector<double>> by_species;
    for (const auto& r : records) {
      by_species[r.value("species", 0)].push_back(r.value("pecep", 0.0));
    }
    nlohmann::ordered_json ranking;
    ranking["per_species"] = nlohmann::ordered_json::array();
    std::vector<double> medians;
    for (auto& [species, values] : by_species) {
      std::sort(values.begin(), values.end());
      const double median = values[values.size() / 2];
      medians.push_back(median);
      nlohmann::ordered_json js;
      js["species"] = species;
      js["n_calls"] = values.size();
      js["median_pecep"] = median;
      ranking["per_species"].push_back(std::move(js));
    }
    ranking["spearman_rho"] = spearman_rho(medians);
    ranking["monotone_violations"] = count_adjacent_inversions(medians);
    std::ofstream out(std::filesystem::path(opts.out_dir) / "exp2_ranking.json");
    if (!out) throw IoError("cannot write exp2_ranking.json");
    out << ranking.dump(2) << "\n";
    std::cout << "wrote exp2 ranking over " << by_species.size() << " species\n";
    return 0;
  }
  throw InvalidConfigError("report: unknown kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PECEP: time-series complexity ranking via prediction-error entropy proxies"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* gen_var = app.add_subcommand("gen-var", "Simulate a VAR series to a binary file");
  int gv_d = -1, gv_p = -1, gv_bw = -1;
  double gv_sigma2 = 1.0;
  std::int64_t gv_n = 10000;
  add_common(gen_var, opts);
  gen_var->add_option("--d", gv_d, "Feature dimension");
  gen_var->add_option("--p", gv_p, "Autoregressive order");
  gen_var->add_option("--band-width", gv_bw, "Coefficient band width");
  gen_var->add_option("--sigma2", gv_sigma2, "Innovation variance");
  gen_var->add_option("--n", gv_n, "Frames to record");

  auto* gen_audio = app.add_subcommand("gen-audio", "Synthesize the species WAV corpus");
  int ga_species = -1, ga_clips = -1;
  double ga_dur = -1.0;
  add_common(gen_audio, opts);
  gen_audio->add_option("--species", ga_species, "Number of species");
  gen_audio->add_option("--clips", ga_clips, "Clips per species");
  gen_audio->add_option("--duration", ga_dur, "Clip duration in seconds");

  auto* exp1 = app.add_subcommand("exp1", "PECEP convergence on VAR data");
  add_common(exp1, opts);

  auto* exp2 = app.add_subcommand("exp2", "Species complexity ranking");
  add_common(exp2, opts);

  auto* pecep_cmd = app.add_subcommand("pecep", "Entropy report from a residual file");
  std::string residual_base;
  double ridge = 0.0, theoretical = 0.0;
  add_common(pecep_cmd, opts);
  pecep_cmd->add_option("--residuals", residual_base,
                        "Residual file base path (expects <base>.f64 + <base>.json)")
      ->required();
  pecep_cmd->add_option("--ridge", ridge, "Ridge added to the covariance diagonal");
  auto* theo_opt = pecep_cmd->add_option("--theoretical", theoretical,
                                         "Known theoretical bound to attach");

  auto* report = app.add_subcommand("report", "Aggregate emitted records");
  std::string report_kind, report_in;
  add_common(report, opts);
  report->add_option("--kind", report_kind, "exp1 or exp2")->required();
  report->add_option("--in", report_in, "Records file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // config/usage errors exit 1
  }

  try {
    if (gen_var->parsed()) return cmd_gen_var(opts, gv_d, gv_p, gv_bw, gv_sigma2, gv_n);
    if (gen_audio->parsed()) return cmd_gen_audio(opts, ga_species, ga_clips, ga_dur);
    if (exp1->parsed()) return cmd_exp1(opts);
    if (exp2->parsed()) return cmd_exp2(opts);
    if (pecep_cmd->parsed())
      return cmd_pecep(opts, residual_base, ridge, theoretical, theo_opt->count() > 0);
    if (report->parsed()) return cmd_report(opts, report_kind, report_in);
  } catch (const InvalidConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // runtime failure; partial results are left in place
  }
  return 0;
}
