#include "vocabtrend/neuralnet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "vocabtrend/error.hpp"

namespace vocabtrend {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;

Index as_index(std::size_t n) { return static_cast<Index>(n); }

MatrixXd sigmoid(const MatrixXd& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

MatrixXd relu_mask(const MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

MatrixXd dropout_mask(Index rows, Index cols, double rate, bool training, Rng& rng) {
  MatrixXd mask = MatrixXd::Ones(rows, cols);
  if (!training || rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      mask(r, c) = rng.uniform() < rate ? 0.0 : keep_scale;
    }
  }
  return mask;
}

}  // namespace

std::size_t Rng::index(std::size_t n) {
  if (n == 0) return 0;
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = 0;
  do {
    draw = engine_();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % bound);
}

void Hyperparams::validate() const {
  auto fail = [](const std::string& what) { throw InputError("hyperparameter " + what); };
  if (hidden == 0 || dense1 == 0 || dense2 == 0) fail("layer sizes must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be > 0");
  if (batch_size == 0) fail("batch_size must be positive");
}

ModelParams::ModelParams(std::size_t hidden, std::size_t dense1, std::size_t dense2)
    : hidden_(hidden), dense1_(dense1), dense2_(dense2) {
  const std::size_t lstm = 4 * hidden + 4 * hidden * hidden + 4 * hidden;
  const std::size_t dense = dense1 * hidden + dense1 + dense2 * dense1 + dense2 + dense2 + 1;
  values_.assign(lstm + dense, 0.0);
}

ModelParams initialize_params(const Hyperparams& hyper, Rng& rng) {
  hyper.validate();
  ModelParams p(hyper.hidden, hyper.dense1, hyper.dense2);
  auto fill = [&rng](auto&& block, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (Index c = 0; c < block.cols(); ++c) {
      for (Index r = 0; r < block.rows(); ++r) block(r, c) = rng.uniform(-bound, bound);
    }
  };
  const double lstm_fan_in = 1.0 + static_cast<double>(hyper.hidden);
  fill(p.lstm_input(), lstm_fan_in);
  fill(p.lstm_recurrent(), lstm_fan_in);
  fill(p.lstm_bias(), lstm_fan_in);
  p.lstm_bias().segment(as_index(hyper.hidden), as_index(hyper.hidden)).setConstant(1.0);
  fill(p.dense1_weight(), static_cast<double>(hyper.hidden));
  fill(p.dense1_bias(), static_cast<double>(hyper.hidden));
  fill(p.dense2_weight(), static_cast<double>(hyper.dense1));
  fill(p.dense2_bias(), static_cast<double>(hyper.dense1));
  fill(p.dense3_weight(), static_cast<double>(hyper.dense2));
  const double bound = 1.0 / std::sqrt(static_cast<double>(hyper.dense2));
  p.dense3_bias() = rng.uniform(-bound, bound);
  return p;
}

ForwardCache forward(const ModelParams& params, const MatrixXd& batch, bool training,
                     double dropout, Rng& rng) {
  if (batch.rows() == 0 || batch.cols() == 0) {
    throw InputError("forward needs a non-empty batch");
  }
  if (!batch.allFinite()) throw NumericError("non-finite value in input batch");
  if (params.size() == 0) throw InputError("forward called with empty parameters");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("dropout must lie in [0, 1)");

  const Index h = as_index(params.hidden());
  const Index b = batch.rows();
  const auto steps = static_cast<std::size_t>(batch.cols());

  ForwardCache cache;
  cache.steps = steps;
  cache.batch = static_cast<std::size_t>(b);
  cache.inputs = batch;
  cache.gates.reserve(steps);
  cache.cells.reserve(steps + 1);
  cache.hiddens.reserve(steps + 1);
  cache.cells.push_back(MatrixXd::Zero(h, b));
  cache.hiddens.push_back(MatrixXd::Zero(h, b));

  const auto w_in = params.lstm_input();
  const auto w_rec = params.lstm_recurrent();
  const auto bias = params.lstm_bias();
  for (std::size_t t = 0; t < steps; ++t) {
    MatrixXd act = w_in * batch.col(as_index(t)).transpose() + w_rec * cache.hiddens.back();
    act.colwise() += bias;
    MatrixXd gates(4 * h, b);
    gates.topRows(h) = sigmoid(act.topRows(h));
    gates.middleRows(h, h) = sigmoid(act.middleRows(h, h));
    gates.middleRows(2 * h, h) = act.middleRows(2 * h, h).array().tanh().matrix();
    gates.bottomRows(h) = sigmoid(act.bottomRows(h));

    MatrixXd cell = gates.middleRows(h, h).cwiseProduct(cache.cells.back()) +
                    gates.topRows(h).cwiseProduct(gates.middleRows(2 * h, h));
    MatrixXd hidden = gates.bottomRows(h).cwiseProduct(cell.array().tanh().matrix());
    cache.gates.push_back(std::move(gates));
    cache.cells.push_back(std::move(cell));
    cache.hiddens.push_back(std::move(hidden));
  }

  cache.pre1 = params.dense1_weight() * cache.hiddens.back();
  cache.pre1.colwise() += params.dense1_bias();
  cache.mask1 = dropout_mask(cache.pre1.rows(), b, dropout, training, rng);
  cache.out1 = cache.pre1.cwiseMax(0.0).cwiseProduct(cache.mask1);

  cache.pre2 = params.dense2_weight() * cache.out1;
  cache.pre2.colwise() += params.dense2_bias();
  cache.mask2 = dropout_mask(cache.pre2.rows(), b, dropout, training, rng);
  cache.out2 = cache.pre2.cwiseMax(0.0).cwiseProduct(cache.mask2);

  cache.predictions = (params.dense3_weight() * cache.out2).transpose();
  cache.predictions.array() += params.dense3_bias();
  return cache;
}

Eigen::VectorXd predict(const ModelParams& params, const MatrixXd& batch) {
  Rng unused(0);
  return forward(params, batch, false, 0.0, unused).predictions;
}

double logcosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) {
    // cosh(x) - 1 = 2 sinh^2(x/2) keeps precision for small x.
    const double s = std::sinh(0.5 * a);
    return std::log1p(2.0 * s * s);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double logcosh_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw InputError("logcosh_loss length mismatch: " + std::to_string(pred.size()) +
                     " vs " + std::to_string(target.size()));
  }
  if (pred.empty()) throw InputError("logcosh_loss needs at least one element");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += logcosh(pred[i] - target[i]);
  return sum / static_cast<double>(pred.size());
}

ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                     std::span<const double> target) {
  const Index h = as_index(params.hidden());
  if (cache.steps == 0 || cache.gates.size() != cache.steps ||
      cache.hiddens.size() != cache.steps + 1 || cache.hiddens.back().rows() != h ||
      cache.pre1.rows() != as_index(params.dense1()) ||
      cache.pre2.rows() != as_index(params.dense2())) {
    throw InputError("forward cache does not match parameter shapes");
  }
  if (target.size() != cache.batch) {
    throw InputError("target length does not match batch size");
  }

  const Index b = as_index(cache.batch);
  ModelParams grads(params.hidden(), params.dense1(), params.dense2());

  Eigen::RowVectorXd d_pred(b);
  for (Index i = 0; i < b; ++i) {
    d_pred(i) = std::tanh(cache.predictions(i) - target[static_cast<std::size_t>(i)]) /
                static_cast<double>(b);
  }

  grads.dense3_weight() = d_pred * cache.out2.transpose();
  grads.dense3_bias() = d_pred.sum();

  MatrixXd d_pre2 = params.dense3_weight().transpose() * d_pred;
  d_pre2 = d_pre2.cwiseProduct(cache.mask2).cwiseProduct(relu_mask(cache.pre2));
  grads.dense2_weight() = d_pre2 * cache.out1.transpose();
  grads.dense2_bias() = d_pre2.rowwise().sum();

  MatrixXd d_pre1 = params.dense2_weight().transpose() * d_pre2;
  d_pre1 = d_pre1.cwiseProduct(cache.mask1).cwiseProduct(relu_mask(cache.pre1));
  grads.dense1_weight() = d_pre1 * cache.hiddens.back().transpose();
  grads.dense1_bias() = d_pre1.rowwise().sum();

  MatrixXd d_hidden = params.dense1_weight().transpose() * d_pre1;
  MatrixXd d_cell = MatrixXd::Zero(h, b);
  MatrixXd d_act(4 * h, b);
  auto g_in = grads.lstm_input();
  auto g_rec = grads.lstm_recurrent();
  auto g_bias = grads.lstm_bias();
  const auto w_rec = params.lstm_recurrent();

  for (std::size_t t = cache.steps; t-- > 0;) {
    const MatrixXd& gates = cache.gates[t];
    const auto in = gates.topRows(h).array();
    const auto forget = gates.middleRows(h, h).array();
    const auto cand = gates.middleRows(2 * h, h).array();
    const auto out = gates.bottomRows(h).array();
    const Eigen::ArrayXXd tanh_cell = cache.cells[t + 1].array().tanh();

    d_cell.array() += d_hidden.array() * out * (1.0 - tanh_cell.square());
    d_act.topRows(h) = (d_cell.array() * cand * in * (1.0 - in)).matrix();
    d_act.middleRows(h, h) =
        (d_cell.array() * cache.cells[t].array() * forget * (1.0 - forget)).matrix();
    d_act.middleRows(2 * h, h) = (d_cell.array() * in * (1.0 - cand.square())).matrix();
    d_act.bottomRows(h) = (d_hidden.array() * tanh_cell * out * (1.0 - out)).matrix();

    g_in += d_act * cache.inputs.col(as_index(t));
    g_rec += d_act * cache.hiddens[t].transpose();
    g_bias += d_act.rowwise().sum();

    d_hidden = w_rec.transpose() * d_act;
    d_cell = d_cell.cwiseProduct(gates.middleRows(h, h));
  }
  return grads;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const Hyperparams& hyper) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw InputError("adam_step shape mismatch");
  }
  const auto g = grads.values();
  if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericError("non-finite gradient in adam_step");
  }

  const std::uint64_t t = state.step + 1;
  const double correction1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
  auto theta = params.values();
  auto m = state.first_moment.values();
  auto v = state.second_moment.values();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
    v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    theta[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
  state.step = t;
}

namespace {

using Wide = long double;

Wide wide_sigmoid(Wide x) { return 1.0L / (1.0L + std::exp(-x)); }

Wide wide_logcosh(Wide x) {
  const Wide a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0L * a)) - std::numbers::ln2_v<Wide>;
}

// Inference loss in extended precision with plain loops over the flat
// buffer, independent of the Eigen forward pass. Parameters are read with
// one entry overridden so the probe never rounds theta +- epsilon to double.
Wide wide_loss(const ModelParams& params, std::size_t probe, Wide probe_value,
               const MatrixXd& batch, std::span<const double> target) {
  const std::size_t H = params.hidden();
  const std::size_t D1 = params.dense1();
  const std::size_t D2 = params.dense2();
  const auto v = params.values();
  auto w = [&](std::size_t k) -> Wide { return k == probe ? probe_value : static_cast<Wide>(v[k]); };
  const std::size_t rec = 4 * H;
  const std::size_t bias = rec + 4 * H * H;
  const std::size_t w1 = bias + 4 * H;
  const std::size_t b1 = w1 + D1 * H;
  const std::size_t w2 = b1 + D1;
  const std::size_t b2 = w2 + D2 * D1;
  const std::size_t w3 = b2 + D2;
  const std::size_t b3 = w3 + D2;

  Wide total = 0.0L;
  std::vector<Wide> h(H), c(H), a(4 * H), z1(D1), z2(D2);
  for (Eigen::Index b = 0; b < batch.rows(); ++b) {
    std::fill(h.begin(), h.end(), 0.0L);
    std::fill(c.begin(), c.end(), 0.0L);
    for (Eigen::Index t = 0; t < batch.cols(); ++t) {
      const Wide x = batch(b, t);
      for (std::size_t r = 0; r < 4 * H; ++r) {
        Wide s = w(r) * x + w(bias + r);
        for (std::size_t k = 0; k < H; ++k) s += w(rec + r + k * 4 * H) * h[k];
        a[r] = s;
      }
      for (std::size_t j = 0; j < H; ++j) {
        c[j] = wide_sigmoid(a[H + j]) * c[j] + wide_sigmoid(a[j]) * std::tanh(a[2 * H + j]);
        h[j] = wide_sigmoid(a[3 * H + j]) * std::tanh(c[j]);
      }
    }
    for (std::size_t r = 0; r < D1; ++r) {
      Wide s = w(b1 + r);
      for (std::size_t k = 0; k < H; ++k) s += w(w1 + r + k * D1) * h[k];
      z1[r] = std::max(0.0L, s);
    }
    for (std::size_t r = 0; r < D2; ++r) {
      Wide s = w(b2 + r);
      for (std::size_t k = 0; k < D1; ++k) s += w(w2 + r + k * D2) * z1[k];
      z2[r] = std::max(0.0L, s);
    }
    Wide out = w(b3);
    for (std::size_t k = 0; k < D2; ++k) out += w(w3 + k) * z2[k];
    total += wide_logcosh(out - static_cast<Wide>(target[static_cast<std::size_t>(b)]));
  }
  return total / static_cast<Wide>(batch.rows());
}

}  // namespace

ModelParams numerical_gradient(const ModelParams& params, const MatrixXd& batch,
                               std::span<const double> target, double epsilon) {
  if (batch.rows() == 0 || static_cast<std::size_t>(batch.rows()) != target.size()) {
    throw InputError("numerical_gradient: target length must match the batch");
  }
  ModelParams numeric(params.hidden(), params.dense1(), params.dense2());
  const auto theta = params.values();
  auto out = numeric.values();
  const Wide eps = epsilon;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const Wide plus = wide_loss(params, k, theta[k] + eps, batch, target);
    const Wide minus = wide_loss(params, k, theta[k] - eps, batch, target);
    out[k] = static_cast<double>((plus - minus) / (2.0L * eps));
  }
  return numeric;
}

double max_relative_error(const ModelParams& analytic, const ModelParams& numeric) {
  if (!analytic.same_shape(numeric)) throw InputError("gradient shape mismatch");
  const auto a = analytic.values();
  const auto n = numeric.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(n[i]), 1e-12});
    worst = std::max(worst, std::abs(a[i] - n[i]) / scale);
  }
  return worst;
}

double grad_check(const ModelParams& params, const MatrixXd& batch,
                  std::span<const double> target, double epsilon) {
  Rng unused(0);
  const ForwardCache cache = forward(params, batch, false, 0.0, unused);
  const ModelParams analytic = backward(params, cache, target);
  return max_relative_error(analytic, numerical_gradient(params, batch, target, epsilon));
}

// Checkpoint layout, all integers and IEEE-754 doubles little-endian:
//   8 bytes magic "VTRDCKPT", u32 version
//   u64 hidden, dense1, dense2
//   f64 dropout, learning_rate, beta1, beta2, epsilon
//   u64 epochs, batch_size, seed, window, adam_step, value_count
//   f64[value_count] params, first moment, second moment
namespace {

constexpr std::array<char, 8> kMagic{'V', 'T', 'R', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes{};
  for (std::size_t i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw InputError("checkpoint truncated");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw InputError("checkpoint truncated");
  }
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_values(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_f64(out, v);
}

void get_values(std::istream& in, std::span<double> values) {
  for (double& v : values) v = get_f64(in);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  if (!p.same_shape(ckpt.adam.first_moment) || !p.same_shape(ckpt.adam.second_moment)) {
    throw InputError("checkpoint moment shapes do not match parameters");
  }
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u64(out, p.hidden());
  put_u64(out, p.dense1());
  put_u64(out, p.dense2());
  put_f64(out, ckpt.hyper.dropout);
  put_f64(out, ckpt.hyper.learning_rate);
  put_f64(out, ckpt.hyper.beta1);
  put_f64(out, ckpt.hyper.beta2);
  put_f64(out, ckpt.hyper.epsilon);
  put_u64(out, ckpt.hyper.epochs);
  put_u64(out, ckpt.hyper.batch_size);
  put_u64(out, ckpt.hyper.seed);
  put_u64(out, ckpt.window);
  put_u64(out, ckpt.adam.step);
  put_u64(out, p.size());
  put_values(out, p.values());
  put_values(out, ckpt.adam.first_moment.values());
  put_values(out, ckpt.adam.second_moment.values());
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw InputError("not a vocabtrend checkpoint");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw InputError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.hyper.hidden = get_u64(in);
  ckpt.hyper.dense1 = get_u64(in);
  ckpt.hyper.dense2 = get_u64(in);
  ckpt.hyper.dropout = get_f64(in);
  ckpt.hyper.learning_rate = get_f64(in);
  ckpt.hyper.beta1 = get_f64(in);
  ckpt.hyper.beta2 = get_f64(in);
  ckpt.hyper.epsilon = get_f64(in);
  ckpt.hyper.epochs = get_u64(in);
  ckpt.hyper.batch_size = get_u64(in);
  ckpt.hyper.seed = get_u64(in);
  ckpt.window = get_u64(in);
  ckpt.hyper.validate();
  ckpt.params = ModelParams(ckpt.hyper.hidden, ckpt.hyper.dense1, ckpt.hyper.dense2);
  ckpt.adam = AdamState::zeros_like(ckpt.params);
  ckpt.adam.step = get_u64(in);
  if (get_u64(in) != ckpt.params.size()) {
    throw InputError("checkpoint value count does not match layer sizes");
  }
  get_values(in, ckpt.params.values());
  get_values(in, ckpt.adam.first_moment.values());
  get_values(in, ckpt.adam.second_moment.values());
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ckpt) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file.string());
  write_checkpoint(out, ckpt);
  if (!out) throw InputError("failed writing " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read checkpoint " + file.string());
  return read_checkpoint(in);
}

}  // namespace vocabtrend
