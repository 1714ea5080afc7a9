#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pecep/bio_synth.hpp"
#include "pecep/config_json.hpp"
#include "pecep/entropy.hpp"
#include "pecep/harness.hpp"
#include "pecep/predictors.hpp"
#include "pecep/spectro.hpp"
#include "pecep/var_sim.hpp"

namespace py = pybind11;
using namespace pecep;

namespace {

// Exceptions -> Python: config/input errors as ValueError, the rest as
// RuntimeError subclasses via the default translator.
void register_exceptions(py::module_& m) {
  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<InvalidConfigError>(m, "InvalidConfigError", PyExc_ValueError);
  py::register_exception<InvalidCovarianceError>(m, "InvalidCovarianceError", PyExc_ValueError);
  py::register_exception<InsufficientSamplesError>(m, "InsufficientSamplesError",
                                                   PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_RuntimeError);
  py::register_exception<UnderdeterminedSystemError>(m, "UnderdeterminedSystemError",
                                                     PyExc_ValueError);
  py::register_exception<UnstableProcessError>(m, "UnstableProcessError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<DegenerateSpectrumError>(m, "DegenerateSpectrumError", PyExc_ValueError);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Prediction-error conditional entropy proxies for time-series "
            "complexity ranking";

  register_exceptions(m);

  // ---- linear algebra kernels ----
  m.def(
      "sample_residual_covariance",
      [](const Mat& residuals) { return sample_residual_covariance(residuals).matrix(); },
      py::arg("residuals"),
      "Sample covariance (1/(N-1)) sum r r^T of zero-mean residual rows.");
  m.def(
      "log_det_psd",
      [](const Mat& cov, double ridge) { return log_det_psd(PsdMat::from_symmetric(cov), ridge); },
      py::arg("cov"), py::arg("ridge") = 0.0);
  m.def("solve_least_squares", &solve_least_squares, py::arg("design"), py::arg("targets"),
        py::arg("rcond") = -1.0);
  m.def("spectral_radius", &spectral_radius, py::arg("square"));
  m.def("residual_mean_norm", &residual_mean_norm, py::arg("residuals"));

  // ---- entropy bounds ----
  py::class_<EntropyReport>(m, "EntropyReport")
      .def_readonly("d", &EntropyReport::d)
      .def_readonly("pecep", &EntropyReport::pecep)
      .def_readonly("hadamard_bound", &EntropyReport::hadamard_bound)
      .def_readonly("whitening_gap", &EntropyReport::whitening_gap)
      .def_readonly("whitening_gap_raw", &EntropyReport::whitening_gap_raw)
      .def_readonly("theoretical_bound", &EntropyReport::theoretical_bound)
      .def_readonly("ridge_used", &EntropyReport::ridge_used)
      .def_readonly("n_residuals", &EntropyReport::n_residuals)
      .def_readonly("residual_mean_norm", &EntropyReport::residual_mean_norm)
      .def("to_json", &entropy_report_json)
      .def("__repr__", [](const EntropyReport& r) {
        return "EntropyReport(d=" + std::to_string(r.d) +
               ", pecep=" + std::to_string(r.pecep) + ")";
      });

  m.def(
      "pecep_score",
      [](const Mat& cov, double ridge) { return pecep_score(PsdMat::from_symmetric(cov), ridge); },
      py::arg("cov"), py::arg("ridge") = 0.0);
  m.def(
      "hadamard_bound",
      [](const Mat& cov) { return hadamard_bound(PsdMat::from_symmetric(cov)); },
      py::arg("cov"));
  m.def(
      "whitening_gap",
      [](const Mat& cov, double ridge) {
        return whitening_gap(PsdMat::from_symmetric(cov), ridge);
      },
      py::arg("cov"), py::arg("ridge") = 0.0);
  m.def("gaussian_noise_entropy", &gaussian_noise_entropy, py::arg("sigma2"), py::arg("d"));
  m.def(
      "entropy_report",
      [](const Mat& residuals, double ridge, std::optional<double> theoretical) {
        return entropy_report(residuals, ridge, theoretical);
      },
      py::arg("residuals"), py::arg("ridge") = 0.0, py::arg("theoretical") = py::none());

  // ---- VAR simulation ----
  py::class_<VarProcess>(m, "VarProcess")
      .def_readonly("d", &VarProcess::d)
      .def_readonly("p", &VarProcess::p)
      .def_readonly("coeffs", &VarProcess::coeffs)
      .def_readonly("sigma2", &VarProcess::sigma2)
      .def_readonly("seed", &VarProcess::seed);

  py::class_<SeriesData>(m, "SeriesData")
      .def_readonly("frames", &SeriesData::frames)
      .def_readonly("burn_in_discarded", &SeriesData::burn_in_discarded)
      .def_readonly("process", &SeriesData::process)
      .def_readonly("noise", &SeriesData::noise);

  m.def("make_coefficients", &make_coefficients, py::arg("d"), py::arg("p"),
        py::arg("band_width"), py::arg("seed"));
  m.def("companion_matrix", &companion_matrix, py::arg("coeffs"));
  m.def("make_stable_process", &make_stable_process, py::arg("d"), py::arg("p"),
        py::arg("band_width"), py::arg("sigma2"), py::arg("seed"),
        py::arg("max_attempts") = 100);
  m.def("simulate_var", &simulate_var, py::arg("process"), py::arg("n_frames"), py::arg("seed"),
        py::arg("init_scale") = 0.0, py::arg("keep_noise") = false);
  m.def("build_supervised", &build_supervised, py::arg("frames"), py::arg("m"));

  // ---- predictors ----
  py::class_<LinearPredictor>(m, "LinearPredictor")
      .def_readonly("kind", &LinearPredictor::kind)
      .def_readonly("coeffs", &LinearPredictor::coeffs)
      .def("predict", &LinearPredictor::predict, py::arg("inputs"));
  m.def("fit_ols", &fit_ols, py::arg("design"), py::arg("targets"), py::arg("rcond") = -1.0);
  m.def("oracle_predictor", &oracle_predictor, py::arg("process"));

  py::class_<FcnConfig>(m, "FcnConfig")
      .def(py::init<>())
      .def_readwrite("hidden1", &FcnConfig::hidden1)
      .def_readwrite("hidden2", &FcnConfig::hidden2)
      .def_readwrite("dropout_rate", &FcnConfig::dropout_rate)
      .def_readwrite("epochs", &FcnConfig::epochs)
      .def_readwrite("batch_size", &FcnConfig::batch_size)
      .def_readwrite("base_learning_rate", &FcnConfig::base_learning_rate)
      .def_readwrite("weight_decay", &FcnConfig::weight_decay)
      .def_readwrite("seed", &FcnConfig::seed);

  py::class_<FcnModel>(m, "FcnModel")
      .def(py::init<const FcnConfig&, int, int>(), py::arg("config"), py::arg("input_dim"),
           py::arg("output_dim"))
      .def("predict", &FcnModel::predict, py::arg("inputs"))
      .def("input_dim", &FcnModel::input_dim)
      .def("output_dim", &FcnModel::output_dim)
      .def("save", &FcnModel::save, py::arg("base"), py::arg("metadata_json") = std::string())
      .def_static("load", &FcnModel::load, py::arg("base"));

  m.def(
      "fcn_train",
      [](FcnModel& model, const Mat& train_in, const Mat& train_tgt, const Mat& val_in,
         const Mat& val_tgt, const FcnConfig& cfg) {
        const BatchSource train = batch_source(train_in, train_tgt);
        const BatchSource val = batch_source(val_in, val_tgt);
        TrainResult r = fcn_train(model, train, val, cfg);
        return py::make_tuple(r.train_mse, r.val_mse);
      },
      py::arg("model"), py::arg("train_inputs"), py::arg("train_targets"), py::arg("val_inputs"),
      py::arg("val_targets"), py::arg("config"));
  m.def("cosine_lr", &cosine_lr, py::arg("base"), py::arg("step"), py::arg("total_steps"));

  // ---- spectrogram pipeline ----
  m.attr("STFT_WINDOW") = kStftWindow;
  m.attr("STFT_HOP") = kStftHop;
  m.attr("STFT_BINS") = kStftBins;
  m.def(
      "stft_magnitude",
      [](const std::vector<double>& wave, int window, int hop) {
        return stft_magnitude(std::span<const double>(wave.data(), wave.size()), window, hop);
      },
      py::arg("wave"), py::arg("window") = kStftWindow, py::arg("hop") = kStftHop);
  m.def("normalize_magnitude", &normalize_magnitude, py::arg("spec"), py::arg("floor") = 1e-10);
  m.def("build_context_dataset", &build_context_dataset, py::arg("frames"), py::arg("m"));
  m.def(
      "split_clips",
      [](int n_clips, std::array<double, 3> fractions, std::uint64_t seed) {
        SplitIds ids = split_clips(n_clips, fractions, seed);
        return py::make_tuple(ids.train, ids.val, ids.test);
      },
      py::arg("n_clips"), py::arg("fractions") = std::array<double, 3>{0.66, 0.14, 0.20},
      py::arg("seed") = 0);

  // ---- bioacoustic synthesis ----
  py::class_<FormantSpec>(m, "FormantSpec")
      .def_readonly("center_hz", &FormantSpec::center_hz)
      .def_readonly("bandwidth_hz", &FormantSpec::bandwidth_hz);

  py::class_<SpeciesSpec>(m, "SpeciesSpec")
      .def_readonly("index", &SpeciesSpec::index)
      .def_readonly("f0_min_hz", &SpeciesSpec::f0_min_hz)
      .def_readonly("f0_max_hz", &SpeciesSpec::f0_max_hz)
      .def_readonly("harmonic_decay", &SpeciesSpec::harmonic_decay)
      .def_readonly("n_harmonics", &SpeciesSpec::n_harmonics)
      .def_readonly("wiener_threshold", &SpeciesSpec::wiener_threshold)
      .def_readonly("euclid_threshold", &SpeciesSpec::euclid_threshold)
      .def_readonly("formants", &SpeciesSpec::formants)
      .def_readonly("timing_jitter", &SpeciesSpec::timing_jitter)
      .def_readonly("power_jitter", &SpeciesSpec::power_jitter)
      .def_readonly("noise_sigma", &SpeciesSpec::noise_sigma);

  py::class_<ClipAnnotation>(m, "ClipAnnotation")
      .def_readonly("clip_id", &ClipAnnotation::clip_id)
      .def_readonly("species", &ClipAnnotation::species)
      .def_readonly("sample_rate", &ClipAnnotation::sample_rate)
      .def_readonly("calls", &ClipAnnotation::calls)
      .def_readonly("bouts", &ClipAnnotation::bouts);

  m.def("default_ladder", &default_ladder);
  m.def(
      "species_table",
      [](int n_species) { return species_table(n_species, default_ladder()); },
      py::arg("n_species"));
  m.def(
      "wiener_entropy",
      [](const Vec& spectrum) { return wiener_entropy(spectrum); },
      py::arg("spectrum"));
  m.def(
      "synthesize_clip",
      [](const SpeciesSpec& spec, double duration_s, int sample_rate, std::uint64_t seed) {
        ClipResult r = synthesize_clip(spec, duration_s, sample_rate, seed);
        return py::make_tuple(r.waveform, r.annotation);
      },
      py::arg("spec"), py::arg("duration_s") = 4.0, py::arg("sample_rate") = 16000,
      py::arg("seed") = 0);
  m.def(
      "mask_call_frames",
      [](const ClipAnnotation& ann, int t_frames, int hop, int window) {
        std::vector<std::uint8_t> mask = mask_call_frames(ann, t_frames, hop, window);
        return std::vector<bool>(mask.begin(), mask.end());
      },
      py::arg("annotation"), py::arg("t_frames"), py::arg("hop") = kStftHop,
      py::arg("window") = kStftWindow);

  // ---- experiment runners ----
  m.def(
      "run_experiment1",
      [](const std::string& profile, const std::string& config_json,
         const std::string& out_dir) {
        Exp1Config cfg = exp1_profile(profile);
        if (!config_json.empty()) {
          nlohmann::json j = nlohmann::json::parse(config_json);
          j.get_to(cfg);
        }
        Exp1Result result = run_experiment1(cfg);
        if (!out_dir.empty()) write_exp1_outputs(result, out_dir);
        nlohmann::ordered_json summary = nlohmann::ordered_json::array();
        for (const auto& s : result.summary) {
          summary.push_back({{"sigma2", s.sigma2},
                             {"n_total", s.n_total},
                             {"predictor", s.predictor},
                             {"mean_pecep", s.mean_pecep},
                             {"std_pecep", s.std_pecep},
                             {"theoretical_bound", s.theoretical_bound},
                             {"mean_bound_gap", s.mean_bound_gap}});
        }
        return summary.dump();
      },
      py::arg("profile") = "desk", py::arg("config_json") = std::string(),
      py::arg("out_dir") = std::string(),
      "Runs experiment 1 and returns the summary as a JSON string.");
  m.def(
      "run_experiment2",
      [](const std::string& profile, const std::string& config_json,
         const std::string& out_dir) {
        Exp2Config cfg = exp2_profile(profile);
        if (!config_json.empty()) {
          nlohmann::json j = nlohmann::json::parse(config_json);
          j.get_to(cfg);
        }
        RankingResult result = run_experiment2(cfg, out_dir);
        if (!out_dir.empty()) write_exp2_outputs(result, out_dir);
        nlohmann::ordered_json j;
        j["spearman_rho"] = result.spearman_rho;
        j["monotone_violations"] = result.monotone_violations;
        j["complete"] = result.complete;
        j["medians"] = nlohmann::ordered_json::array();
        for (const auto& s : result.per_species) j["medians"].push_back(s.median_pecep);
        return j.dump();
      },
      py::arg("profile") = "desk", py::arg("config_json") = std::string(),
      py::arg("out_dir") = std::string(),
      "Runs experiment 2 and returns the ranking as a JSON string.");

#ifdef VERSION_INFO
#define PECEP_STR_IMPL(x) #x
#define PECEP_STR(x) PECEP_STR_IMPL(x)
  m.attr("__version__") = PECEP_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
