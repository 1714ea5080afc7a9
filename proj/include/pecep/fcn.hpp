#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pecep/linalg.hpp"
#include "pecep/rng.hpp"

namespace pecep {

struct FcnConfig {
  int hidden1 = 512;
  int hidden2 = 256;
  double dropout_rate = 0.10;
  int epochs = 50;
  int batch_size = 128;
  double base_learning_rate = 1e-3;
  double weight_decay = 1e-2;
  std::uint64_t seed = 0;
};

// Minibatch provider. gather() fills preallocated (B x in_dim) and
// (B x out_dim) matrices for the requested row indices, so huge context
// datasets never need to be materialized whole.
struct BatchSource {
  std::int64_t rows = 0;
  int in_dim = 0;
  int out_dim = 0;
  std::function<void(const std::vector<std::int64_t>&, Mat&, Mat&)> gather;
};

BatchSource batch_source(const Mat& inputs, const Mat& targets);

struct FcnGradients {
  Mat w1, w2, w3;
  Vec b1, b2, b3;
};

// Three affine layers with ReLU after the first two, dropout between the
// hidden layers (inverted scaling, training only), sigmoid on the output.
class FcnModel {
 public:
  FcnModel(const FcnConfig& cfg, int input_dim, int output_dim);

  int input_dim() const { return static_cast<int>(w1_.rows()); }
  int output_dim() const { return static_cast<int>(w3_.cols()); }
  const char* kind_name() const { return "fcn"; }
  const FcnConfig& config() const { return cfg_; }

  // Inference forward pass: dropout off, deterministic.
  Mat predict(const Mat& inputs) const;

  // Training forward + backward. Returns the batch MSE and fills grads.
  // dropout_rng may be null to disable dropout regardless of config.
  double forward_backward(const Mat& inputs, const Mat& targets, Rng* dropout_rng,
                          FcnGradients& grads) const;

  double mse(const Mat& inputs, const Mat& targets) const;

  // Parameter access (w1: in x h1, w2: h1 x h2, w3: h2 x out).
  Mat& w1() { return w1_; }
  Mat& w2() { return w2_; }
  Mat& w3() { return w3_; }
  Vec& b1() { return b1_; }
  Vec& b2() { return b2_; }
  Vec& b3() { return b3_; }
  const Mat& w1() const { return w1_; }
  const Mat& w2() const { return w2_; }
  const Mat& w3() const { return w3_; }
  const Vec& b1() const { return b1_; }
  const Vec& b2() const { return b2_; }
  const Vec& b3() const { return b3_; }

  void save(const std::filesystem::path& base, const std::string& metadata_json) const;
  static FcnModel load(const std::filesystem::path& base);

 private:
  FcnConfig cfg_;
  Mat w1_, w2_, w3_;
  Vec b1_, b2_, b3_;
};

struct TrainResult {
  std::vector<double> train_mse;  // one entry per epoch
  std::vector<double> val_mse;
};

// Cosine annealing from base to ~0 over total_steps; step is 0-based.
double cosine_lr(double base, std::int64_t step, std::int64_t total_steps);

// Decoupled-weight-decay adaptive-moment minibatch training of the MSE
// loss. Runs cfg.epochs epochs, shuffling rows each epoch; dropout active
// only here. Throws DivergenceError naming the epoch if the loss leaves
// the finite range.
TrainResult fcn_train(FcnModel& model, const BatchSource& train, const BatchSource& val,
                      const FcnConfig& cfg);

double eval_mse(const FcnModel& model, const BatchSource& data, int batch_size = 256);

}  // namespace pecep
