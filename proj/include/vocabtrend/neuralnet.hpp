#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vocabtrend {

/// Seeded stream behind initialization, shuffling and dropout. Built on
/// mt19937_64 with explicit conversions so draws are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

struct Hyperparams {
  std::size_t hidden = 32;
  std::size_t dense1 = 64;
  std::size_t dense2 = 32;
  double dropout = 0.3;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 7;

  /// Throws InputError on out-of-range fields.
  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Every weight of the network in one flat buffer, exposed as Eigen views.
///
/// LSTM gate blocks are stacked in the order input, forget, cell, output;
/// each block has `hidden` rows. The input is a scalar per timestep, so the
/// input kernel is a single column.
class ModelParams {
 public:
  using Matrix = Eigen::MatrixXd;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  ModelParams() = default;
  /// All zeros.
  ModelParams(std::size_t hidden, std::size_t dense1, std::size_t dense2);

  std::size_t hidden() const { return hidden_; }
  std::size_t dense1() const { return dense1_; }
  std::size_t dense2() const { return dense2_; }
  bool same_shape(const ModelParams& other) const {
    return hidden_ == other.hidden_ && dense1_ == other.dense1_ &&
           dense2_ == other.dense2_;
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  VectorMap lstm_input() { return vec(0, 4 * hidden_); }
  MatrixMap lstm_recurrent() { return mat(recurrent_offset(), 4 * hidden_, hidden_); }
  VectorMap lstm_bias() { return vec(lstm_bias_offset(), 4 * hidden_); }
  MatrixMap dense1_weight() { return mat(d1w_offset(), dense1_, hidden_); }
  VectorMap dense1_bias() { return vec(d1b_offset(), dense1_); }
  MatrixMap dense2_weight() { return mat(d2w_offset(), dense2_, dense1_); }
  VectorMap dense2_bias() { return vec(d2b_offset(), dense2_); }
  MatrixMap dense3_weight() { return mat(d3w_offset(), 1, dense2_); }
  double& dense3_bias() { return values_[d3b_offset()]; }

  ConstVectorMap lstm_input() const { return cvec(0, 4 * hidden_); }
  ConstMatrixMap lstm_recurrent() const { return cmat(recurrent_offset(), 4 * hidden_, hidden_); }
  ConstVectorMap lstm_bias() const { return cvec(lstm_bias_offset(), 4 * hidden_); }
  ConstMatrixMap dense1_weight() const { return cmat(d1w_offset(), dense1_, hidden_); }
  ConstVectorMap dense1_bias() const { return cvec(d1b_offset(), dense1_); }
  ConstMatrixMap dense2_weight() const { return cmat(d2w_offset(), dense2_, dense1_); }
  ConstVectorMap dense2_bias() const { return cvec(d2b_offset(), dense2_); }
  ConstMatrixMap dense3_weight() const { return cmat(d3w_offset(), 1, dense2_); }
  double dense3_bias() const { return values_[d3b_offset()]; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t recurrent_offset() const { return 4 * hidden_; }
  std::size_t lstm_bias_offset() const { return recurrent_offset() + 4 * hidden_ * hidden_; }
  std::size_t d1w_offset() const { return lstm_bias_offset() + 4 * hidden_; }
  std::size_t d1b_offset() const { return d1w_offset() + dense1_ * hidden_; }
  std::size_t d2w_offset() const { return d1b_offset() + dense1_; }
  std::size_t d2b_offset() const { return d2w_offset() + dense2_ * dense1_; }
  std::size_t d3w_offset() const { return d2b_offset() + dense2_; }
  std::size_t d3b_offset() const { return d3w_offset() + dense2_; }

  VectorMap vec(std::size_t off, std::size_t n) {
    return VectorMap(values_.data() + off, static_cast<Eigen::Index>(n));
  }
  ConstVectorMap cvec(std::size_t off, std::size_t n) const {
    return ConstVectorMap(values_.data() + off, static_cast<Eigen::Index>(n));
  }
  MatrixMap mat(std::size_t off, std::size_t r, std::size_t c) {
    return MatrixMap(values_.data() + off, static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(c));
  }
  ConstMatrixMap cmat(std::size_t off, std::size_t r, std::size_t c) const {
    return ConstMatrixMap(values_.data() + off, static_cast<Eigen::Index>(r),
                          static_cast<Eigen::Index>(c));
  }

  std::size_t hidden_ = 0;
  std::size_t dense1_ = 0;
  std::size_t dense2_ = 0;
  std::vector<double> values_;
};

/// Uniform in +-1/sqrt(fan_in) for every weight and bias, then the forget
/// gate bias set to 1. LSTM fan-in is 1 + hidden.
ModelParams initialize_params(const Hyperparams& hyper, Rng& rng);

/// Everything the backward pass needs from one forward call.
struct ForwardCache {
  std::size_t steps = 0;
  std::size_t batch = 0;
  Eigen::MatrixXd inputs;              // batch x steps
  std::vector<Eigen::MatrixXd> gates;  // per step, 4H x batch, activated
  std::vector<Eigen::MatrixXd> cells;  // steps + 1 entries, c_0 = 0
  std::vector<Eigen::MatrixXd> hiddens;  // steps + 1 entries, h_0 = 0
  Eigen::MatrixXd pre1, mask1, out1;   // dense1 pre-activation, dropout mask, output
  Eigen::MatrixXd pre2, mask2, out2;
  Eigen::VectorXd predictions;
};

/// LSTM over the rows of `batch` (one scalar per timestep), last hidden
/// state through dense1-relu-dropout-dense2-relu-dropout-dense3. Inverted
/// dropout masks at `dropout` rate are drawn from `rng` only when
/// `training`; otherwise they are all ones. Throws NumericError on
/// non-finite input.
ForwardCache forward(const ModelParams& params, const Eigen::MatrixXd& batch,
                     bool training, double dropout, Rng& rng);

/// Inference without a stream.
Eigen::VectorXd predict(const ModelParams& params, const Eigen::MatrixXd& batch);

/// ln(cosh(x)) without overflow and without cancellation near zero.
double logcosh(double x);

/// Mean of logcosh(pred - target).
double logcosh_loss(std::span<const double> pred, std::span<const double> target);

/// Gradient of logcosh_loss with respect to every parameter, by
/// backpropagation through time.
ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     std::span<const double> target);

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ModelParams& p) {
    return AdamState{ModelParams(p.hidden(), p.dense1(), p.dense2()),
                     ModelParams(p.hidden(), p.dense1(), p.dense2()), 0};
  }
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update in place. Throws NumericError on a
/// non-finite gradient, leaving params and state untouched.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const Hyperparams& hyper);

/// Central differences of the inference-mode loss for every parameter.
ModelParams numerical_gradient(const ModelParams& params,
                               const Eigen::MatrixXd& batch,
                               std::span<const double> target, double epsilon);

/// max |a - n| / max(|a|, |n|, 1e-12) over all entries.
double max_relative_error(const ModelParams& analytic, const ModelParams& numeric);

/// Analytic (all-ones dropout masks) against central differences.
double grad_check(const ModelParams& params, const Eigen::MatrixXd& batch,
                  std::span<const double> target, double epsilon);

/// Hyperparameters, window size and all arrays. Round-trips bit-exactly.
struct Checkpoint {
  Hyperparams hyper;
  std::size_t window = 0;
  ModelParams params;
  AdamState adam;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace vocabtrend
