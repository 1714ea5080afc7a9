#include "pecep/fcn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "pecep/errors.hpp"

namespace pecep {

namespace {

constexpr char kCheckpointMagic[8] = {'P', 'E', 'C', 'E', 'P', 'F', 'C', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

inline Mat sigmoid(const Mat& z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

inline Mat relu(const Mat& z) {
  return z.cwiseMax(0.0);
}

void init_uniform(Mat& w, double bound, Rng& rng) {
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      w(r, c) = rng.uniform(-bound, bound);
    }
  }
}

struct AdamState {
  Mat mw1, mw2, mw3, vw1, vw2, vw3;
  Vec mb1, mb2, mb3, vb1, vb2, vb3;
  std::int64_t t = 0;

  explicit AdamState(const FcnModel& m)
      : mw1(Mat::Zero(m.w1().rows(), m.w1().cols())),
        mw2(Mat::Zero(m.w2().rows(), m.w2().cols())),
        mw3(Mat::Zero(m.w3().rows(), m.w3().cols())),
        vw1(Mat::Zero(m.w1().rows(), m.w1().cols())),
        vw2(Mat::Zero(m.w2().rows(), m.w2().cols())),
        vw3(Mat::Zero(m.w3().rows(), m.w3().cols())),
        mb1(Vec::Zero(m.b1().size())),
        mb2(Vec::Zero(m.b2().size())),
        mb3(Vec::Zero(m.b3().size())),
        vb1(Vec::Zero(m.b1().size())),
        vb2(Vec::Zero(m.b2().size())),
        vb3(Vec::Zero(m.b3().size())) {}
};

template <typename T>
void adamw_update(T& param, T& m, T& v, const T& grad, double lr, double weight_decay,
                  std::int64_t t) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  param.array() -= lr * ((m.array() / bc1) / ((v.array() / bc2).sqrt() + eps) +
                         weight_decay * param.array());
}

void write_block(std::ofstream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 8));
}

void read_block(std::ifstream& in, double* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * 8));
  if (in.gcount() != static_cast<std::streamsize>(n * 8)) {
    throw IoError("FcnModel::load: truncated weight block");
  }
}

}  // namespace

BatchSource batch_source(const Mat& inputs, const Mat& targets) {
  if (inputs.rows() != targets.rows()) {
    throw InvalidInputError("batch_source: input/target row mismatch");
  }
  BatchSource src;
  src.rows = inputs.rows();
  src.in_dim = static_cast<int>(inputs.cols());
  src.out_dim = static_cast<int>(targets.cols());
  src.gather = [&inputs, &targets](const std::vector<std::int64_t>& idx, Mat& in, Mat& tgt) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      in.row(static_cast<Eigen::Index>(i)) = inputs.row(idx[i]);
      tgt.row(static_cast<Eigen::Index>(i)) = targets.row(idx[i]);
    }
  };
  return src;
}

FcnModel::FcnModel(const FcnConfig& cfg, int input_dim, int output_dim) : cfg_(cfg) {
  if (input_dim < 1 || output_dim < 1 || cfg.hidden1 < 1 || cfg.hidden2 < 1) {
    throw InvalidInputError("FcnModel: dimensions must be >= 1");
  }
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0) {
    throw InvalidConfigError("FcnModel: dropout_rate must be in [0, 1)");
  }
  if (cfg.epochs < 1) {
    throw InvalidConfigError("FcnModel: epochs must be >= 1");
  }
  w1_ = Mat(input_dim, cfg.hidden1);
  w2_ = Mat(cfg.hidden1, cfg.hidden2);
  w3_ = Mat(cfg.hidden2, output_dim);
  b1_ = Vec::Zero(cfg.hidden1);
  b2_ = Vec::Zero(cfg.hidden2);
  b3_ = Vec::Zero(output_dim);
  Rng rng(Rng::mix(cfg.seed, 0x1a17));
  init_uniform(w1_, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
  init_uniform(w2_, 1.0 / std::sqrt(static_cast<double>(cfg.hidden1)), rng);
  init_uniform(w3_, 1.0 / std::sqrt(static_cast<double>(cfg.hidden2)), rng);
}

Mat FcnModel::predict(const Mat& inputs) const {
  if (inputs.cols() != w1_.rows()) {
    throw InvalidInputError("FcnModel::predict: input width mismatch");
  }
  Mat h1 = relu((inputs * w1_).rowwise() + b1_.transpose());
  Mat h2 = relu((h1 * w2_).rowwise() + b2_.transpose());
  return sigmoid((h2 * w3_).rowwise() + b3_.transpose());
}

double FcnModel::forward_backward(const Mat& inputs, const Mat& targets, Rng* dropout_rng,
                                  FcnGradients& grads) const {
  const Eigen::Index batch = inputs.rows();
  const double denom = static_cast<double>(batch) * static_cast<double>(targets.cols());

  Mat z1 = (inputs * w1_).rowwise() + b1_.transpose();
  Mat h1 = relu(z1);

  Mat dropped = h1;
  Mat keep_scale;
  const bool use_dropout = dropout_rng != nullptr && cfg_.dropout_rate > 0.0;
  if (use_dropout) {
    const double keep = 1.0 - cfg_.dropout_rate;
    keep_scale = Mat(h1.rows(), h1.cols());
    for (Eigen::Index r = 0; r < h1.rows(); ++r) {
      for (Eigen::Index c = 0; c < h1.cols(); ++c) {
        keep_scale(r, c) = dropout_rng->uniform01() < keep ? 1.0 / keep : 0.0;
      }
    }
    dropped = h1.cwiseProduct(keep_scale);
  }

  Mat z2 = (dropped * w2_).rowwise() + b2_.transpose();
  Mat h2 = relu(z2);
  Mat y = sigmoid((h2 * w3_).rowwise() + b3_.transpose());

  Mat diff = y - targets;
  const double loss = diff.squaredNorm() / denom;

  // dL/dz3 through the sigmoid
  Mat dz3 = (2.0 / denom) * diff.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  grads.w3.noalias() = h2.transpose() * dz3;
  grads.b3 = dz3.colwise().sum().transpose();

  Mat dh2 = dz3 * w3_.transpose();
  Mat dz2 = dh2.cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  grads.w2.noalias() = dropped.transpose() * dz2;
  grads.b2 = dz2.colwise().sum().transpose();

  Mat ddropped = dz2 * w2_.transpose();
  Mat dh1 = use_dropout ? Mat(ddropped.cwiseProduct(keep_scale)) : ddropped;
  Mat dz1 = dh1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  grads.w1.noalias() = inputs.transpose() * dz1;
  grads.b1 = dz1.colwise().sum().transpose();

  return loss;
}

double FcnModel::mse(const Mat& inputs, const Mat& targets) const {
  Mat diff = predict(inputs) - targets;
  return diff.squaredNorm() /
         (static_cast<double>(inputs.rows()) * static_cast<double>(targets.cols()));
}

double cosine_lr(double base, std::int64_t step, std::int64_t total_steps) {
  if (total_steps <= 1) return base;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return base * 0.5 * (1.0 + std::cos(M_PI * frac));
}

double eval_mse(const FcnModel& model, const BatchSource& data, int batch_size) {
  if (data.rows == 0) return 0.0;
  Mat in(batch_size, data.in_dim), tgt(batch_size, data.out_dim);
  std::vector<std::int64_t> idx;
  double sq_sum = 0.0;
  for (std::int64_t start = 0; start < data.rows; start += batch_size) {
    const std::int64_t b = std::min<std::int64_t>(batch_size, data.rows - start);
    idx.resize(static_cast<std::size_t>(b));
    std::iota(idx.begin(), idx.end(), start);
    if (b != in.rows()) {
      in.resize(b, data.in_dim);
      tgt.resize(b, data.out_dim);
    }
    data.gather(idx, in, tgt);
    Mat diff = model.predict(in) - tgt;
    sq_sum += diff.squaredNorm();
  }
  return sq_sum / (static_cast<double>(data.rows) * static_cast<double>(data.out_dim));
}

TrainResult fcn_train(FcnModel& model, const BatchSource& train, const BatchSource& val,
                      const FcnConfig& cfg) {
  if (train.rows < 1) {
    throw InvalidInputError("fcn_train: empty training set");
  }
  if (train.in_dim != model.input_dim() || train.out_dim != model.output_dim()) {
    throw InvalidInputError("fcn_train: data dimensions do not match model");
  }
  const int batch = std::max(1, cfg.batch_size);
  const std::int64_t steps_per_epoch = (train.rows + batch - 1) / batch;
  const std::int64_t total_steps = steps_per_epoch * cfg.epochs;

  Rng shuffle_rng(Rng::mix(cfg.seed, 0x5u));
  Rng dropout_rng(Rng::mix(cfg.seed, 0xdu));

  std::vector<std::int64_t> order(static_cast<std::size_t>(train.rows));
  std::iota(order.begin(), order.end(), 0);

  AdamState adam(model);
  FcnGradients grads;
  TrainResult result;
  Mat in(batch, train.in_dim), tgt(batch, train.out_dim);
  std::vector<std::int64_t> idx;
  std::int64_t global_step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the seeded stream keeps runs reproducible.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<int>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::int64_t seen = 0;
    for (std::int64_t start = 0; start < train.rows; start += batch) {
      const std::int64_t b = std::min<std::int64_t>(batch, train.rows - start);
      idx.assign(order.begin() + start, order.begin() + start + b);
      if (b != in.rows()) {
        in.resize(b, train.in_dim);
        tgt.resize(b, train.out_dim);
      }
      train.gather(idx, in, tgt);
      const double loss = model.forward_backward(in, tgt, &dropout_rng, grads);
      if (!std::isfinite(loss)) {
        throw DivergenceError("fcn_train: non-finite loss at epoch " + std::to_string(epoch));
      }
      const double lr = cosine_lr(cfg.base_learning_rate, global_step, total_steps);
      ++adam.t;
      adamw_update(model.w1(), adam.mw1, adam.vw1, grads.w1, lr, cfg.weight_decay, adam.t);
      adamw_update(model.w2(), adam.mw2, adam.vw2, grads.w2, lr, cfg.weight_decay, adam.t);
      adamw_update(model.w3(), adam.mw3, adam.vw3, grads.w3, lr, cfg.weight_decay, adam.t);
      adamw_update(model.b1(), adam.mb1, adam.vb1, grads.b1, lr, cfg.weight_decay, adam.t);
      adamw_update(model.b2(), adam.mb2, adam.vb2, grads.b2, lr, cfg.weight_decay, adam.t);
      adamw_update(model.b3(), adam.mb3, adam.vb3, grads.b3, lr, cfg.weight_decay, adam.t);
      epoch_loss += loss * static_cast<double>(b);
      seen += b;
      ++global_step;
    }
    result.train_mse.push_back(epoch_loss / static_cast<double>(seen));
    result.val_mse.push_back(val.rows > 0 ? eval_mse(model, val) : 0.0);
  }
  return result;
}

void FcnModel::save(const std::filesystem::path& base, const std::string& metadata_json) const {
  std::filesystem::path bin = base;
  bin += ".bin";
  std::ofstream out(bin, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("FcnModel::save: cannot open " + bin.string());
  }
  out.write(kCheckpointMagic, 8);
  const std::uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::int32_t dims[4] = {input_dim(), cfg_.hidden1, cfg_.hidden2, output_dim()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  // column-major blocks, w then b per layer
  write_block(out, w1_.data(), static_cast<std::size_t>(w1_.size()));
  write_block(out, b1_.data(), static_cast<std::size_t>(b1_.size()));
  write_block(out, w2_.data(), static_cast<std::size_t>(w2_.size()));
  write_block(out, b2_.data(), static_cast<std::size_t>(b2_.size()));
  write_block(out, w3_.data(), static_cast<std::size_t>(w3_.size()));
  write_block(out, b3_.data(), static_cast<std::size_t>(b3_.size()));
  if (!out) {
    throw IoError("FcnModel::save: write failed for " + bin.string());
  }
  if (!metadata_json.empty()) {
    std::filesystem::path meta = base;
    meta += ".json";
    std::ofstream mout(meta, std::ios::trunc);
    if (!mout) {
      throw IoError("FcnModel::save: cannot open " + meta.string());
    }
    mout << metadata_json << "\n";
  }
}

FcnModel FcnModel::load(const std::filesystem::path& base) {
  std::filesystem::path bin = base;
  bin += ".bin";
  std::ifstream in(bin, std::ios::binary);
  if (!in) {
    throw IoError("FcnModel::load: cannot open " + bin.string());
  }
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw IoError("FcnModel::load: bad magic");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kCheckpointVersion) {
    throw IoError("FcnModel::load: unsupported version " + std::to_string(version));
  }
  std::int32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (in.gcount() != sizeof(dims)) {
    throw IoError("FcnModel::load: truncated header");
  }
  FcnConfig cfg;
  cfg.hidden1 = dims[1];
  cfg.hidden2 = dims[2];
  FcnModel model(cfg, dims[0], dims[3]);
  read_block(in, model.w1_.data(), static_cast<std::size_t>(model.w1_.size()));
  read_block(in, model.b1_.data(), static_cast<std::size_t>(model.b1_.size()));
  read_block(in, model.w2_.data(), static_cast<std::size_t>(model.w2_.size()));
  read_block(in, model.b2_.data(), static_cast<std::size_t>(model.b2_.size()));
  read_block(in, model.w3_.data(), static_cast<std::size_t>(model.w3_.size()));
  read_block(in, model.b3_.data(), static_cast<std::size_t>(model.b3_.size()));
  return model;
}

}  // namespace pecep
