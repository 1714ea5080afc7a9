#include <algorithm>
#include <cmath>

#include "pecep/harness.hpp"
#include "pecep/parallel.hpp"
#include "pecep/predictors.hpp"
#include "pecep/rng.hpp"
#include "pecep/var_sim.hpp"

namespace pecep {

namespace {

void validate_exp1(const Exp1Config& cfg) {
  if (cfg.d < 1 || cfg.p < 1 || cfg.n_trials < 1) {
    throw InvalidConfigError("exp1: d, p and n_trials must be >= 1");
  }
  if (cfg.noise_levels.empty() || cfg.dataset_sizes.empty()) {
    throw InvalidConfigError("exp1: noise_levels and dataset_sizes must be non-empty");
  }
  for (double s : cfg.noise_levels) {
    if (!(s > 0.0)) throw InvalidConfigError("exp1: noise levels must be > 0");
  }
  for (std::int64_t n : cfg.dataset_sizes) {
    if (n <= static_cast<std::int64_t>(cfg.d) * cfg.p) {
      throw InvalidConfigError("exp1: every dataset size must exceed d*p");
    }
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw InvalidConfigError("exp1: train_fraction must be in (0, 1)");
  }
}

}  // namespace

Exp1Config exp1_profile(const std::string& name) {
  if (name == "desk") {
    return Exp1Config{};
  }
  if (name == "paper") {
    Exp1Config cfg;
    cfg.d = 32;
    cfg.p = 8;
    cfg.noise_levels = {1e-3, 1e-2, 1e-1, 1.0};
    cfg.dataset_sizes = {1000, 5000, 10000, 50000, 100000, 500000, 1000000};
    cfg.n_trials = 30;
    return cfg;
  }
  throw InvalidConfigError("exp1_profile: unknown profile '" + name + "'");
}

Exp1Result run_experiment1(const Exp1Config& cfg) {
  validate_exp1(cfg);
  const int n_sizes = static_cast<int>(cfg.dataset_sizes.size());
  const int n_noise = static_cast<int>(cfg.noise_levels.size());
  const int records_per_task = n_sizes * 2;  // ols + oracle per size

  Exp1Result result;
  result.config = cfg;
  result.records.resize(static_cast<std::size_t>(cfg.n_trials) * n_noise * records_per_task);

  const std::int64_t n_max = *std::max_element(cfg.dataset_sizes.begin(),
                                               cfg.dataset_sizes.end());

  // One task per (trial, noise level); the coefficient draw depends on the
  // trial only, so noise levels share each trial's realization.
  const int n_tasks = cfg.n_trials * n_noise;
  parallel_for_tasks(n_tasks, cfg.jobs, [&](int task) {
    const int trial = task / n_noise;
    const int noise_idx = task % n_noise;
    const double sigma2 = cfg.noise_levels[static_cast<std::size_t>(noise_idx)];
    const std::uint64_t proc_seed = Rng::mix(cfg.master_seed, static_cast<std::uint64_t>(trial));
    const std::uint64_t sim_seed =
        Rng::mix(proc_seed, 0x1000 + static_cast<std::uint64_t>(noise_idx));
    const std::size_t base =
        static_cast<std::size_t>(task) * static_cast<std::size_t>(records_per_task);

    auto mark_failed = [&](const std::string& what) {
      for (int s = 0; s < n_sizes; ++s) {
        for (int pr = 0; pr < 2; ++pr) {
          Exp1Record& rec = result.records[base + static_cast<std::size_t>(s) * 2 + pr];
          rec.trial = trial;
          rec.sigma2 = sigma2;
          rec.n_total = cfg.dataset_sizes[static_cast<std::size_t>(s)];
          rec.predictor = pr == 0 ? "ols" : "oracle";
          rec.seed = sim_seed;
          rec.failed = true;
          rec.error = what;
        }
      }
    };

    try {
      VarProcess proc = make_stable_process(cfg.d, cfg.p, cfg.band_width, sigma2, proc_seed);
      SeriesData series = simulate_var(proc, n_max, sim_seed);
      LinearPredictor oracle = oracle_predictor(proc);
      const double theoretical = gaussian_noise_entropy(sigma2, cfg.d);

      for (int s = 0; s < n_sizes; ++s) {
        const std::int64_t n_total = cfg.dataset_sizes[static_cast<std::size_t>(s)];
        const auto n_train = static_cast<std::int64_t>(
            std::floor(cfg.train_fraction * static_cast<double>(n_total)));
        const std::int64_t n_test = n_total - n_train;

        auto [design, targets] = build_supervised(series.frames.topRows(n_total), cfg.p);
        const std::int64_t rows = design.rows();  // n_total - p

        Mat train_design, train_targets, test_design, test_targets;
        if (cfg.chronological_split) {
          // Supervised row j targets frame k = j + p; the first 80% of
          // frames are training, the rest test.
          const std::int64_t train_rows = n_train - cfg.p;
          train_design = design.topRows(train_rows);
          train_targets = targets.topRows(train_rows);
          test_design = design.bottomRows(n_test);
          test_targets = targets.bottomRows(n_test);
        } else {
          std::vector<std::int64_t> perm(static_cast<std::size_t>(rows));
          for (std::int64_t i = 0; i < rows; ++i) perm[static_cast<std::size_t>(i)] = i;
          Rng shuffle(Rng::mix(sim_seed, 0x2000 + static_cast<std::uint64_t>(s)));
          for (std::size_t i = perm.size(); i > 1; --i) {
            std::swap(perm[i - 1],
                      perm[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<int>(i) - 1))]);
          }
          const std::int64_t train_rows = rows - n_test;
          train_design = Mat(train_rows, design.cols());
          train_targets = Mat(train_rows, targets.cols());
          test_design = Mat(n_test, design.cols());
          test_targets = Mat(n_test, targets.cols());
          for (std::int64_t i = 0; i < rows; ++i) {
            if (i < train_rows) {
              train_design.row(i) = design.row(perm[static_cast<std::size_t>(i)]);
              train_targets.row(i) = targets.row(perm[static_cast<std::size_t>(i)]);
            } else {
              test_design.row(i - train_rows) = design.row(perm[static_cast<std::size_t>(i)]);
              test_targets.row(i - train_rows) = targets.row(perm[static_cast<std::size_t>(i)]);
            }
          }
        }

        LinearPredictor ols = fit_ols(train_design, train_targets, cfg.rcond);
        const LinearPredictor* predictors[2] = {&ols, &oracle};
        for (int pr = 0; pr < 2; ++pr) {
          ResidualBatch batch = collect_residuals(*predictors[pr], test_design, test_targets);
          Exp1Record& rec = result.records[base + static_cast<std::size_t>(s) * 2 + pr];
          rec.trial = trial;
          rec.sigma2 = sigma2;
          rec.n_total = n_total;
          rec.n_train = n_train;
          rec.n_test = n_test;
          rec.predictor = batch.predictor_kind;
          rec.report = entropy_report(batch.residuals, cfg.ridge, theoretical);
          rec.seed = sim_seed;
        }
      }
    } catch (const std::exception& e) {
      // Failed trials are recorded, never silently dropped.
      mark_failed(e.what());
    }
  });

  result.summary = summarize_exp1(result.records);
  return result;
}

std::vector<Exp1Summary> summarize_exp1(const std::vector<Exp1Record>& records) {
  // Group in first-seen order, which follows the configured noise/size order.
  std::vector<Exp1Summary> summary;
  std::vector<std::vector<double>> peceps;
  std::vector<std::vector<double>> gaps;
  for (const Exp1Record& rec : records) {
    if (rec.failed) continue;
    int idx = -1;
    for (std::size_t i = 0; i < summary.size(); ++i) {
      if (summary[i].sigma2 == rec.sigma2 && summary[i].n_total == rec.n_total &&
          summary[i].predictor == rec.predictor) {
        idx = static_cast<int>(i);
        break;
      }
    }
    if (idx < 0) {
      Exp1Summary s;
      s.sigma2 = rec.sigma2;
      s.n_total = rec.n_total;
      s.predictor = rec.predictor;
      s.theoretical_bound = rec.report.theoretical_bound.value_or(0.0);
      summary.push_back(s);
      peceps.emplace_back();
      gaps.emplace_back();
      idx = static_cast<int>(summary.size()) - 1;
    }
    peceps[static_cast<std::size_t>(idx)].push_back(rec.report.pecep);
    gaps[static_cast<std::size_t>(idx)].push_back(rec.report.whitening_gap);
  }
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const auto& v = peceps[i];
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    summary[i].n_trials = static_cast<int>(v.size());
    summary[i].mean_pecep = mean;
    summary[i].std_pecep = v.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    double gap_mean = 0.0;
    for (double g : gaps[i]) gap_mean += g;
    summary[i].mean_whitening_gap = gap_mean / n;
    summary[i].mean_bound_gap = mean - summary[i].theoretical_bound;
  }
  return summary;
}

}  // namespace pecep
