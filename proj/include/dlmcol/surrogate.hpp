#pragma once

// Color-permutation invariant regression network (deep-set layers).
//
// A coloring enters as k one-hot group vectors V_1..V_k over the vertices.
// Each layer maps the k group rows independently and mixes in their average:
//
//   Z_i = beta + V_i Lambda + rho(V) Gamma,     rho(V) = (1/k) sum_i V_i
//
// followed (hidden layers) by batch normalization whose statistics pool the
// batch and all k groups, then LeakyReLU. The output layer is affine only and
// the network output is the average of the final per-group scalars.
//
// Training is online: Adam on MSE against standardized targets, continuing
// from the previous parameters and optimizer moments on every call.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlmcol/coloring.hpp"
#include "dlmcol/parallel.hpp"
#include "dlmcol/rng.hpp"

namespace dlmcol {

enum class NetSchedule { small, paper_wvcp, paper_col };

/// Hidden layer widths for an instance with n vertices.
inline std::vector<int> hidden_widths(NetSchedule schedule, int n) {
  auto w = [](int x) { return std::max(1, x); };
  switch (schedule) {
    case NetSchedule::small:
      return {w(2 * n), w(n), w(n / 2)};
    case NetSchedule::paper_wvcp:
      return {w(5 * n), w(2 * n), w(n), w(n / 2)};
    case NetSchedule::paper_col:
      return {w(10 * n), w(5 * n), w(2 * n), w(2 * n), w(2 * n), w(2 * n), w(2 * n), w(n), w(n / 2)};
  }
  return {};
}

struct SurrogateHyper {
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 20;
  int batch_size = 100;
  double leaky_slope = 0.2;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;
  /// Batch-norm scale/shift as one scalar per layer instead of per feature.
  bool scalar_bn_affine = false;
  bool standardize_targets = true;
};

struct LayerSpec {
  int in = 0;
  int out = 0;
  bool batch_norm = true;
  bool activation = true;
};

struct TrainingSet {
  std::vector<Coloring> inputs;
  std::vector<double> targets;
};

struct TrainingReport {
  std::vector<double> epoch_loss;  ///< mean minibatch MSE per epoch (standardized scale)
  bool aborted = false;            ///< non-finite loss; parameters were restored
  std::size_t samples = 0;
};

enum class NetMode { train, eval };

template <typename Scalar = double>
class SurrogateNet {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  /// One trainable tensor with its gradient and Adam moments.
  struct Param {
    Matrix value, grad, m, v;
    void resize(Eigen::Index r, Eigen::Index c) {
      value = Matrix::Zero(r, c);
      grad = m = v = value;
    }
  };

  struct Layer {
    LayerSpec spec;
    Param lambda;    // in x out, per group
    Param gamma;     // in x out, on the group average
    Param beta;      // 1 x out
    Param bn_scale;  // 1 x out, or 1 x 1 in scalar mode
    Param bn_shift;
    RowVector running_mean;
    RowVector running_var;
  };

  /// Per-layer intermediates kept by a train-mode forward pass.
  struct Cache {
    std::vector<Matrix> input;    // dense layer inputs (empty for layer 0)
    std::vector<Matrix> group_avg;  // B x in
    std::vector<Matrix> xhat;
    std::vector<RowVector> mean, var, inv_std;
    std::vector<Matrix> pre_activation;  // post batch norm
    std::span<const Coloring> batch;
  };

  SurrogateNet() = default;

  /// n vertices, k color slots, hidden widths; output width 1 is appended.
  SurrogateNet(int n, int k, const std::vector<int>& hidden, SurrogateHyper hyper, std::uint64_t seed)
      : n_(n), k_(k), hyper_(hyper) {
    if (n < 1 || k < 1) throw std::invalid_argument("network needs n >= 1 and k >= 1");
    std::vector<LayerSpec> specs;
    int in = n;
    for (int width : hidden) {
      specs.push_back({in, width, true, true});
      in = width;
    }
    specs.push_back({in, 1, false, false});
    build(specs, seed);
  }

  /// Explicit layer list (first in == n, last out == 1).
  SurrogateNet(int n, int k, const std::vector<LayerSpec>& specs, SurrogateHyper hyper, std::uint64_t seed)
      : n_(n), k_(k), hyper_(hyper) {
    if (specs.empty() || specs.front().in != n || specs.back().out != 1)
      throw std::invalid_argument("layer schedule must start at n inputs and end at one output");
    build(specs, seed);
  }

  int vertices() const noexcept { return n_; }
  int colors() const noexcept { return k_; }
  const SurrogateHyper& hyper() const noexcept { return hyper_; }
  SurrogateHyper& hyper() noexcept { return hyper_; }
  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::uint64_t adam_steps() const noexcept { return adam_step_; }
  double target_mean() const noexcept { return target_mean_; }
  double target_scale() const noexcept { return target_scale_; }

  void for_each_param(const std::function<void(Param&)>& fn) {
    for (auto& l : layers_) {
      fn(l.lambda);
      fn(l.gamma);
      fn(l.beta);
      if (l.spec.batch_norm) {
        fn(l.bn_scale);
        fn(l.bn_shift);
      }
    }
  }

  bool all_finite() const {
    for (const auto& l : layers_)
      if (!l.lambda.value.allFinite() || !l.gamma.value.allFinite() || !l.beta.value.allFinite() ||
          !l.bn_scale.value.allFinite() || !l.bn_shift.value.allFinite() || !l.running_mean.allFinite() ||
          !l.running_var.allFinite())
        return false;
    return true;
  }

  /// Raw network outputs (standardized scale). Train mode uses batch
  /// statistics and, given a cache, records what backward() needs; it never
  /// touches the running statistics.
  std::vector<Scalar> forward(std::span<const Coloring> batch, NetMode mode, Cache* cache = nullptr) const {
    check_batch(batch);
    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index rows = B * k_;
    const Scalar inv_k = Scalar(1) / Scalar(k_);
    if (cache) *cache = Cache{};
    if (cache) cache->batch = batch;

    Matrix x;  // current layer input (dense, from layer 1 on)
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const Layer& l = layers_[li];
      const Eigen::Index out = l.spec.out;
      Matrix z(rows, out);
      Matrix avg;
      if (li == 0) {
        // V_i Lambda = sum of Lambda rows over the vertices in group i.
        z.setZero();
        avg = Matrix::Zero(B, l.spec.in);
        for (Eigen::Index b = 0; b < B; ++b) {
          const Coloring& s = batch[static_cast<std::size_t>(b)];
          for (int v = 0; v < n_; ++v) {
            z.row(b * k_ + s[v]) += l.lambda.value.row(v);
            avg(b, v) += inv_k;
          }
        }
      } else {
        z.noalias() = x * l.lambda.value;
        avg = Matrix::Zero(B, l.spec.in);
        for (Eigen::Index b = 0; b < B; ++b) avg.row(b) = x.middleRows(b * k_, k_).colwise().sum() * inv_k;
      }
      const Matrix mix = avg * l.gamma.value;
      for (Eigen::Index b = 0; b < B; ++b) z.middleRows(b * k_, k_).rowwise() += mix.row(b) + l.beta.value.row(0);

      if (cache) {
        cache->input.push_back(li == 0 ? Matrix() : x);
        cache->group_avg.push_back(avg);
      }

      if (l.spec.batch_norm) {
        RowVector mean, var;
        if (mode == NetMode::train) {
          mean = z.colwise().mean();
          var = (z.rowwise() - mean).array().square().colwise().mean().matrix();
        } else {
          mean = l.running_mean;
          var = l.running_var;
        }
        const RowVector inv_std = (var.array() + Scalar(hyper_.bn_eps)).rsqrt().matrix();
        Matrix xhat = ((z.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
        z = xhat;
        if (hyper_.scalar_bn_affine) {
          z = (z.array() * l.bn_scale.value(0, 0) + l.bn_shift.value(0, 0)).matrix();
        } else {
          z = ((z.array().rowwise() * l.bn_scale.value.row(0).array()).rowwise() + l.bn_shift.value.row(0).array()).matrix();
        }
        if (cache) {
          cache->xhat.push_back(std::move(xhat));
          cache->mean.push_back(mean);
          cache->var.push_back(var);
          cache->inv_std.push_back(inv_std);
        }
      } else if (cache) {
        cache->xhat.emplace_back();
        cache->mean.emplace_back();
        cache->var.emplace_back();
        cache->inv_std.emplace_back();
      }
      if (cache) cache->pre_activation.push_back(z);
      if (l.spec.activation) {
        const Scalar slope = Scalar(hyper_.leaky_slope);
        z = z.unaryExpr([slope](Scalar t) { return t > 0 ? t : slope * t; });
      }
      x = std::move(z);
    }

    std::vector<Scalar> result(static_cast<std::size_t>(B));
    const Eigen::Index width = x.cols();
    for (Eigen::Index b = 0; b < B; ++b)
      result[static_cast<std::size_t>(b)] = x.middleRows(b * k_, k_).sum() * inv_k / Scalar(width);
    return result;
  }

  /// Accumulates parameter gradients (overwrites .grad) of a loss whose
  /// derivative with respect to each output is d_output.
  void backward(const Cache& cache, const std::vector<Scalar>& d_output) {
    const Eigen::Index B = static_cast<Eigen::Index>(d_output.size());
    const Eigen::Index rows = B * k_;
    const Scalar inv_k = Scalar(1) / Scalar(k_);
    Matrix grad(rows, layers_.back().spec.out);
    for (Eigen::Index b = 0; b < B; ++b)
      grad.middleRows(b * k_, k_).setConstant(d_output[static_cast<std::size_t>(b)] * inv_k / Scalar(grad.cols()));

    for (std::size_t li = layers_.size(); li-- > 0;) {
      Layer& l = layers_[li];
      if (l.spec.activation) {
        const Scalar slope = Scalar(hyper_.leaky_slope);
        grad = grad.binaryExpr(cache.pre_activation[li], [slope](Scalar g, Scalar y) { return y > 0 ? g : slope * g; });
      }
      if (l.spec.batch_norm) {
        const Matrix& xhat = cache.xhat[li];
        const Scalar n = Scalar(rows);
        RowVector dxhat_sum, dxhat_dot;
        Matrix dxhat;
        if (hyper_.scalar_bn_affine) {
          l.bn_scale.grad(0, 0) = (grad.array() * xhat.array()).sum();
          l.bn_shift.grad(0, 0) = grad.sum();
          dxhat = grad * l.bn_scale.value(0, 0);
        } else {
          l.bn_scale.grad.row(0) = (grad.array() * xhat.array()).colwise().sum().matrix();
          l.bn_shift.grad.row(0) = grad.colwise().sum();
          dxhat = (grad.array().rowwise() * l.bn_scale.value.row(0).array()).matrix();
        }
        dxhat_sum = dxhat.colwise().sum();
        dxhat_dot = (dxhat.array() * xhat.array()).colwise().sum().matrix();
        Matrix dz = ((dxhat.array() * n).rowwise() - dxhat_sum.array()).matrix();
        dz -= (xhat.array().rowwise() * dxhat_dot.array()).matrix();
        grad = ((dz.array().rowwise() * cache.inv_std[li].array()) / n).matrix();
      }
      // grad is now dL/dZ for this layer's affine part.
      Matrix per_sample(B, grad.cols());
      for (Eigen::Index b = 0; b < B; ++b) per_sample.row(b) = grad.middleRows(b * k_, k_).colwise().sum();
      l.beta.grad.row(0) = grad.colwise().sum();
      l.gamma.grad.noalias() = cache.group_avg[li].transpose() * per_sample;
      if (li == 0) {
        l.lambda.grad.setZero();
        for (Eigen::Index b = 0; b < B; ++b) {
          const Coloring& s = cache.batch[static_cast<std::size_t>(b)];
          for (int v = 0; v < n_; ++v) l.lambda.grad.row(v) += grad.row(b * k_ + s[v]);
        }
      } else {
        const Matrix& x = cache.input[li];
        l.lambda.grad.noalias() = x.transpose() * grad;
        Matrix dx = grad * l.lambda.value.transpose();
        const Matrix mix_back = per_sample * l.gamma.value.transpose() * inv_k;
        for (Eigen::Index b = 0; b < B; ++b) dx.middleRows(b * k_, k_).rowwise() += mix_back.row(b);
        grad = std::move(dx);
      }
    }
  }

  /// MSE over the batch and its gradient; returns the loss.
  static Scalar mse(const std::vector<Scalar>& out, const std::vector<Scalar>& target, std::vector<Scalar>& d_out) {
    const std::size_t B = out.size();
    d_out.resize(B);
    Scalar loss = 0;
    for (std::size_t i = 0; i < B; ++i) {
      const Scalar e = out[i] - target[i];
      loss += e * e;
      d_out[i] = Scalar(2) * e / Scalar(B);
    }
    return loss / Scalar(B);
  }

  /// One Adam step on a minibatch (targets already standardized). Updates
  /// running batch-norm statistics. Returns the minibatch loss before the step.
  Scalar train_step(std::span<const Coloring> batch, const std::vector<Scalar>& targets) {
    Cache cache;
    const auto out = forward(batch, NetMode::train, &cache);
    std::vector<Scalar> d_out;
    const Scalar loss = mse(out, targets, d_out);
    if (!std::isfinite(static_cast<double>(loss))) return loss;
    backward(cache, d_out);
    update_running_stats(cache, static_cast<Eigen::Index>(batch.size()) * k_);
    adam_update();
    return loss;
  }

  /// Online training on one generation's dataset: `epochs` passes of shuffled
  /// minibatches. On a non-finite loss the parameters and optimizer state
  /// revert to their values on entry.
  TrainingReport train_generation(const TrainingSet& data, Rng& rng) {
    TrainingReport report;
    report.samples = data.inputs.size();
    if (data.inputs.empty()) return report;
    if (data.inputs.size() != data.targets.size()) throw std::invalid_argument("inputs and targets differ in length");

    double mean = 0, scale = 1;
    if (hyper_.standardize_targets) {
      mean = std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / static_cast<double>(data.targets.size());
      double sq = 0;
      for (double t : data.targets) sq += (t - mean) * (t - mean);
      const double sd = std::sqrt(sq / static_cast<double>(data.targets.size()));
      scale = sd > 1e-12 ? sd : 1.0;
    }
    std::vector<Scalar> standardized(data.targets.size());
    for (std::size_t i = 0; i < standardized.size(); ++i) standardized[i] = Scalar((data.targets[i] - mean) / scale);

    const SurrogateNet snapshot = *this;
    std::vector<std::size_t> order(data.inputs.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Coloring> batch;
    std::vector<Scalar> batch_targets;
    const std::size_t bs = static_cast<std::size_t>(std::max(1, hyper_.batch_size));
    for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
      shuffle(order.begin(), order.end(), rng);
      double sum = 0;
      std::size_t batches = 0;
      for (std::size_t start = 0; start < order.size(); start += bs) {
        const std::size_t end = std::min(order.size(), start + bs);
        batch.clear();
        batch_targets.clear();
        for (std::size_t i = start; i < end; ++i) {
          batch.push_back(data.inputs[order[i]]);
          batch_targets.push_back(standardized[order[i]]);
        }
        const Scalar loss = train_step(batch, batch_targets);
        if (!std::isfinite(static_cast<double>(loss)) || !all_finite()) {
          *this = snapshot;
          report.aborted = true;
          return report;
        }
        sum += static_cast<double>(loss);
        ++batches;
      }
      report.epoch_loss.push_back(sum / static_cast<double>(batches));
    }
    target_mean_ = mean;
    target_scale_ = scale;
    return report;
  }

  /// Eval-mode predictions mapped back to the target scale of the latest
  /// training. Fixed-size chunks keep results independent of `threads`.
  std::vector<double> predict_batch(std::span<const Coloring> candidates, int threads = 1) const {
    constexpr std::size_t kChunk = 64;
    std::vector<double> out(candidates.size());
    const std::size_t chunks = (candidates.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(candidates.size(), begin + kChunk);
      const auto raw = forward(candidates.subspan(begin, end - begin), NetMode::eval);
      for (std::size_t i = begin; i < end; ++i)
        out[i] = static_cast<double>(raw[i - begin]) * target_scale_ + target_mean_;
    });
    return out;
  }

  // --- checkpoints: portable text, all reals with max_digits10 ---------------

  void save(std::ostream& os) const {
    os << "dlmcol-surrogate 1\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << n_ << ' ' << k_ << ' ' << layers_.size() << ' ' << adam_step_ << ' ' << target_mean_ << ' ' << target_scale_ << '\n';
    os << hyper_.learning_rate << ' ' << hyper_.adam_beta1 << ' ' << hyper_.adam_beta2 << ' ' << hyper_.adam_eps << ' '
       << hyper_.epochs << ' ' << hyper_.batch_size << ' ' << hyper_.leaky_slope << ' ' << hyper_.bn_eps << ' '
       << hyper_.bn_momentum << ' ' << hyper_.scalar_bn_affine << ' ' << hyper_.standardize_targets << '\n';
    auto put = [&](const auto& mat) {
      os << mat.rows() << ' ' << mat.cols();
      for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) os << ' ' << static_cast<double>(mat(i, j));
      os << '\n';
    };
    for (const auto& l : layers_) {
      os << l.spec.in << ' ' << l.spec.out << ' ' << l.spec.batch_norm << ' ' << l.spec.activation << '\n';
      for (const Param* p : {&l.lambda, &l.gamma, &l.beta, &l.bn_scale, &l.bn_shift}) {
        put(p->value);
        put(p->m);
        put(p->v);
      }
      put(l.running_mean);
      put(l.running_var);
    }
  }

  static SurrogateNet load(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "dlmcol-surrogate" || version != 1) throw std::runtime_error("not a surrogate checkpoint");
    SurrogateNet net;
    std::size_t layer_count = 0;
    is >> net.n_ >> net.k_ >> layer_count >> net.adam_step_ >> net.target_mean_ >> net.target_scale_;
    auto& h = net.hyper_;
    is >> h.learning_rate >> h.adam_beta1 >> h.adam_beta2 >> h.adam_eps >> h.epochs >> h.batch_size >> h.leaky_slope >>
        h.bn_eps >> h.bn_momentum >> h.scalar_bn_affine >> h.standardize_targets;
    auto get = [&](auto& mat) {
      Eigen::Index r = 0, c = 0;
      is >> r >> c;
      mat.resize(r, c);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
          double x = 0;
          is >> x;
          mat(i, j) = Scalar(x);
        }
    };
    for (std::size_t i = 0; i < layer_count; ++i) {
      Layer l;
      is >> l.spec.in >> l.spec.out >> l.spec.batch_norm >> l.spec.activation;
      for (Param* p : {&l.lambda, &l.gamma, &l.beta, &l.bn_scale, &l.bn_shift}) {
        get(p->value);
        get(p->m);
        get(p->v);
        p->grad = Matrix::Zero(p->value.rows(), p->value.cols());
      }
      get(l.running_mean);
      get(l.running_var);
      net.layers_.push_back(std::move(l));
    }
    if (!is) throw std::runtime_error("truncated surrogate checkpoint");
    return net;
  }

 private:
  void build(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    Rng rng = make_stream(seed, StreamTag::network_init, 0);
    for (const auto& spec : specs) {
      Layer l;
      l.spec = spec;
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.in));
      auto fill = [&](Param& p, Eigen::Index r, Eigen::Index c) {
        p.resize(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
          for (Eigen::Index j = 0; j < c; ++j) p.value(i, j) = Scalar((2.0 * rng.uniform01() - 1.0) * bound);
      };
      fill(l.lambda, spec.in, spec.out);
      fill(l.gamma, spec.in, spec.out);
      fill(l.beta, 1, spec.out);
      const Eigen::Index affine = hyper_.scalar_bn_affine ? 1 : spec.out;
      l.bn_scale.resize(1, affine);
      l.bn_scale.value.setOnes();
      l.bn_shift.resize(1, affine);
      l.running_mean = RowVector::Zero(spec.out);
      l.running_var = RowVector::Ones(spec.out);
      layers_.push_back(std::move(l));
    }
  }

  void check_batch(std::span<const Coloring> batch) const {
    for (const Coloring& s : batch)
      if (s.size() != n_ || s.k() != k_)
        throw std::invalid_argument("coloring shape (" + std::to_string(s.size()) + ", " + std::to_string(s.k()) +
                                    ") does not match network (" + std::to_string(n_) + ", " + std::to_string(k_) + ")");
  }

  void update_running_stats(const Cache& cache, Eigen::Index rows) {
    const Scalar momentum = Scalar(hyper_.bn_momentum);
    const Scalar unbias = rows > 1 ? Scalar(rows) / Scalar(rows - 1) : Scalar(1);
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      Layer& l = layers_[li];
      if (!l.spec.batch_norm) continue;
      l.running_mean = (Scalar(1) - momentum) * l.running_mean + momentum * cache.mean[li];
      l.running_var = (Scalar(1) - momentum) * l.running_var + momentum * unbias * cache.var[li];
    }
  }

  void adam_update() {
    ++adam_step_;
    const double b1 = hyper_.adam_beta1, b2 = hyper_.adam_beta2;
    const auto t = static_cast<double>(adam_step_);
    const Scalar step = Scalar(hyper_.learning_rate / (1.0 - std::pow(b1, t)));
    const Scalar v_correction = Scalar(1.0 / (1.0 - std::pow(b2, t)));
    const Scalar eps = Scalar(hyper_.adam_eps);
    for_each_param([&](Param& p) {
      p.m = Scalar(b1) * p.m + Scalar(1 - b1) * p.grad;
      p.v = (Scalar(b2) * p.v.array() + Scalar(1 - b2) * p.grad.array().square()).matrix();
      p.value.array() -= step * p.m.array() / ((p.v.array() * v_correction).sqrt() + eps);
    });
  }

  int n_ = 0;
  int k_ = 0;
  SurrogateHyper hyper_;
  std::vector<Layer> layers_;
  std::uint64_t adam_step_ = 0;
  double target_mean_ = 0;
  double target_scale_ = 1;
};

}  // namespace dlmcol
