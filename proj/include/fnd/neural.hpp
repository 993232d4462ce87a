#ifndef FND_NEURAL_HPP
#define FND_NEURAL_HPP

// Dense layers with hand-written reverse passes: the edge weight estimator
// (MLP + sigmoid), a two-layer GCN on a weighted sparse graph, the losses that
// train them and Adam. Everything is templated on the scalar type; the
// pipeline instantiates double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fnd::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Undirected edges as (src, dst) rows of local node indices.
using EdgePairs = Eigen::Matrix<int, Eigen::Dynamic, 2>;

template <typename Scalar>
struct Parameter {
  std::string name;
  Matrix<Scalar> value;
  Matrix<Scalar> grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix<Scalar>::Zero(rows, cols)), grad(Matrix<Scalar>::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every entry.
template <typename Scalar, typename Urng>
void fan_in_uniform(Parameter<Scalar>& p, Eigen::Index fan_in, Urng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) p.value(r, c) = static_cast<Scalar>(dist(rng));
  }
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// Row-wise softmax.
template <typename Derived>
Matrix<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = logits;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i).array() -= out.row(i).maxCoeff();
    out.row(i) = out.row(i).array().exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Edge weight estimator: w = sigmoid(relu(z W1 + b1) W2 + b2)

template <typename Scalar>
struct EdgeEstimator {
  Parameter<Scalar> w1, b1, w2, b2;

  struct Cache {
    Matrix<Scalar> hidden_pre;
    Matrix<Scalar> hidden;
    Vector<Scalar> weights;
  };

  EdgeEstimator() = default;
  EdgeEstimator(Eigen::Index in_dim, Eigen::Index hidden_dim)
      : w1("estimator.w1", in_dim, hidden_dim),
        b1("estimator.b1", 1, hidden_dim),
        w2("estimator.w2", hidden_dim, 1),
        b2("estimator.b2", 1, 1) {}

  template <typename Urng>
  void initialize(Urng& rng) {
    fan_in_uniform(w1, w1.value.rows(), rng);
    fan_in_uniform(b1, w1.value.rows(), rng);
    fan_in_uniform(w2, w2.value.rows(), rng);
    fan_in_uniform(b2, w2.value.rows(), rng);
  }

  Eigen::Index input_dim() const { return w1.value.rows(); }

  std::vector<Parameter<Scalar>*> parameters() { return {&w1, &b1, &w2, &b2}; }

  /// Weights in (0, 1), one per row of `z`.
  Vector<Scalar> forward(const Matrix<Scalar>& z, Cache* cache = nullptr) const {
    if (z.cols() != input_dim()) throw std::invalid_argument("edge estimator: feature dimension mismatch");
    Matrix<Scalar> pre = z * w1.value;
    pre.rowwise() += b1.value.row(0);
    Matrix<Scalar> hidden = relu(pre);
    Vector<Scalar> logit = hidden * w2.value;
    logit.array() += b2.value(0, 0);
    Vector<Scalar> w = logit.unaryExpr([](Scalar x) { return sigmoid(x); });
    if (cache) {
      cache->hidden_pre = std::move(pre);
      cache->hidden = std::move(hidden);
      cache->weights = w;
    }
    return w;
  }

  /// Accumulates parameter gradients for upstream dL/dw.
  void backward(const Matrix<Scalar>& z, const Cache& cache, const Vector<Scalar>& d_weights) {
    const Vector<Scalar> d_logit = d_weights.cwiseProduct(
        cache.weights.cwiseProduct((Vector<Scalar>::Ones(cache.weights.size()) - cache.weights)));
    w2.grad += cache.hidden.transpose() * d_logit;
    b2.grad(0, 0) += d_logit.sum();
    Matrix<Scalar> d_hidden = d_logit * w2.value.transpose();
    d_hidden = d_hidden.cwiseProduct((cache.hidden_pre.array() > Scalar(0)).template cast<Scalar>().matrix());
    w1.grad += z.transpose() * d_hidden;
    b1.grad += d_hidden.colwise().sum();
  }
};

// ---------------------------------------------------------------------------
// Symmetric normalization with unit self loops: D^-1/2 (W + I) D^-1/2.

template <typename Scalar>
class NormalizedAdjacency {
 public:
  NormalizedAdjacency(Eigen::Index num_nodes, const EdgePairs& edges, const Vector<Scalar>& weights)
      : edges_(edges), weights_(weights) {
    if (weights.size() != edges.rows()) throw std::invalid_argument("adjacency: one weight per edge required");
    Vector<Scalar> degree = Vector<Scalar>::Ones(num_nodes);
    for (Eigen::Index k = 0; k < edges.rows(); ++k) {
      if (weights[k] < Scalar(0)) throw std::invalid_argument("adjacency: negative edge weight");
      degree[edges(k, 0)] += weights[k];
      degree[edges(k, 1)] += weights[k];
    }
    degree_ = degree;
    inv_sqrt_ = degree.array().rsqrt().matrix();
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(static_cast<std::size_t>(num_nodes + 2 * edges.rows()));
    for (Eigen::Index i = 0; i < num_nodes; ++i) triplets.emplace_back(i, i, inv_sqrt_[i] * inv_sqrt_[i]);
    for (Eigen::Index k = 0; k < edges.rows(); ++k) {
      const int i = edges(k, 0), j = edges(k, 1);
      const Scalar v = inv_sqrt_[i] * inv_sqrt_[j] * weights[k];
      triplets.emplace_back(i, j, v);
      triplets.emplace_back(j, i, v);
    }
    matrix_.resize(num_nodes, num_nodes);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
  }

  Eigen::Index num_nodes() const { return matrix_.rows(); }
  const Eigen::SparseMatrix<Scalar>& matrix() const { return matrix_; }
  const Vector<Scalar>& weights() const { return weights_; }

  /// Adds the gradient contributions of one propagation P = A_hat * m with
  /// upstream dL/dP = g. `d_inv_sqrt` and `d_weights` accumulate across
  /// propagations; finish with `finish_weight_grad`.
  void accumulate_weight_grad(const Matrix<Scalar>& g, const Matrix<Scalar>& m, Vector<Scalar>& d_inv_sqrt,
                              Vector<Scalar>& d_weights) const {
    using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor gr = g;
    const RowMajor mr = m;
    for (Eigen::Index i = 0; i < num_nodes(); ++i) d_inv_sqrt[i] += Scalar(2) * inv_sqrt_[i] * gr.row(i).dot(mr.row(i));
    for (Eigen::Index k = 0; k < edges_.rows(); ++k) {
      const int i = edges_(k, 0), j = edges_(k, 1);
      const Scalar both = gr.row(i).dot(mr.row(j)) + gr.row(j).dot(mr.row(i));
      d_weights[k] += inv_sqrt_[i] * inv_sqrt_[j] * both;
      d_inv_sqrt[i] += inv_sqrt_[j] * weights_[k] * both;
      d_inv_sqrt[j] += inv_sqrt_[i] * weights_[k] * both;
    }
  }

  /// Chains d(deg^-1/2) through the degrees into the edge weights.
  void finish_weight_grad(const Vector<Scalar>& d_inv_sqrt, Vector<Scalar>& d_weights) const {
    const Vector<Scalar> d_degree =
        (d_inv_sqrt.array() * Scalar(-0.5) * degree_.array().pow(Scalar(-1.5))).matrix();
    for (Eigen::Index k = 0; k < edges_.rows(); ++k) d_weights[k] += d_degree[edges_(k, 0)] + d_degree[edges_(k, 1)];
  }

 private:
  EdgePairs edges_;
  Vector<Scalar> weights_;
  Vector<Scalar> degree_;
  Vector<Scalar> inv_sqrt_;
  Eigen::SparseMatrix<Scalar> matrix_;
};

// ---------------------------------------------------------------------------
// Two-layer GCN: logits = A_hat relu(A_hat X W1 + b1) W2 + b2

template <typename Scalar>
struct GcnClassifier {
  Parameter<Scalar> w1, b1, w2, b2;

  struct Cache {
    /// A_hat X when the input is narrower than the hidden layer, else X W1.
    bool propagate_input = false;
    Matrix<Scalar> first;
    Matrix<Scalar> z1;
    Matrix<Scalar> h1;
    Matrix<Scalar> hw2;
  };

  GcnClassifier() = default;
  GcnClassifier(Eigen::Index in_dim, Eigen::Index hidden_dim, Eigen::Index classes = 2)
      : w1("classifier.w1", in_dim, hidden_dim),
        b1("classifier.b1", 1, hidden_dim),
        w2("classifier.w2", hidden_dim, classes),
        b2("classifier.b2", 1, classes) {}

  template <typename Urng>
  void initialize(Urng& rng) {
    fan_in_uniform(w1, w1.value.rows(), rng);
    fan_in_uniform(b1, w1.value.rows(), rng);
    fan_in_uniform(w2, w2.value.rows(), rng);
    fan_in_uniform(b2, w2.value.rows(), rng);
  }

  Eigen::Index input_dim() const { return w1.value.rows(); }

  std::vector<Parameter<Scalar>*> parameters() { return {&w1, &b1, &w2, &b2}; }

  Matrix<Scalar> forward(const Matrix<Scalar>& x, const NormalizedAdjacency<Scalar>& adj,
                         Cache* cache = nullptr) const {
    if (x.cols() != input_dim()) throw std::invalid_argument("gcn: node feature dimension mismatch");
    if (x.rows() != adj.num_nodes()) throw std::invalid_argument("gcn: node count mismatch");
    const bool propagate_input = w1.value.rows() <= w1.value.cols();
    Matrix<Scalar> first, z1;
    if (propagate_input) {
      first = adj.matrix() * x;
      z1 = first * w1.value;
    } else {
      first = x * w1.value;
      z1 = adj.matrix() * first;
    }
    z1.rowwise() += b1.value.row(0);
    Matrix<Scalar> h1 = relu(z1);
    Matrix<Scalar> hw2 = h1 * w2.value;
    Matrix<Scalar> logits = adj.matrix() * hw2;
    logits.rowwise() += b2.value.row(0);
    if (cache) {
      cache->propagate_input = propagate_input;
      cache->first = std::move(first);
      cache->z1 = std::move(z1);
      cache->h1 = std::move(h1);
      cache->hw2 = std::move(hw2);
    }
    return logits;
  }

  /// Accumulates parameter gradients; when `d_edge_weights` is given it is
  /// overwritten with dL/dw for every edge of `adj`. A_hat is symmetric, so
  /// it stands in for its transpose.
  void backward(const Matrix<Scalar>& x, const NormalizedAdjacency<Scalar>& adj, const Cache& cache,
                const Matrix<Scalar>& d_logits, Vector<Scalar>* d_edge_weights = nullptr) {
    b2.grad += d_logits.colwise().sum();
    const Matrix<Scalar> d_hw2 = adj.matrix() * d_logits;
    w2.grad += cache.h1.transpose() * d_hw2;
    Matrix<Scalar> d_z1 = d_hw2 * w2.value.transpose();
    d_z1 = d_z1.cwiseProduct((cache.z1.array() > Scalar(0)).template cast<Scalar>().matrix());
    b1.grad += d_z1.colwise().sum();
    Matrix<Scalar> d_first;
    if (cache.propagate_input) {
      w1.grad += cache.first.transpose() * d_z1;
      if (d_edge_weights) d_first = d_z1 * w1.value.transpose();
    } else {
      const Matrix<Scalar> d_xw1 = adj.matrix() * d_z1;
      w1.grad += x.transpose() * d_xw1;
    }

    if (d_edge_weights) {
      Vector<Scalar> d_inv_sqrt = Vector<Scalar>::Zero(adj.num_nodes());
      d_edge_weights->setZero(adj.weights().size());
      adj.accumulate_weight_grad(d_logits, cache.hw2, d_inv_sqrt, *d_edge_weights);
      if (cache.propagate_input) {
        adj.accumulate_weight_grad(d_first, x, d_inv_sqrt, *d_edge_weights);
      } else {
        adj.accumulate_weight_grad(d_z1, cache.first, d_inv_sqrt, *d_edge_weights);
      }
      adj.finish_weight_grad(d_inv_sqrt, *d_edge_weights);
    }
  }
};

// ---------------------------------------------------------------------------
// Losses. Each returns the value and the gradient w.r.t. its inputs.

template <typename Scalar>
struct PairLoss {
  Scalar value = 0;
  Vector<Scalar> d_clean;
  Vector<Scalar> d_noisy;
};

/// (1 / (Kc Kn)) sum_i sum_j max(0, margin - (clean_i - noisy_j)).
/// Throws std::invalid_argument if either list is empty.
template <typename Scalar>
PairLoss<Scalar> ranking_loss(const Vector<Scalar>& clean, const Vector<Scalar>& noisy, Scalar margin) {
  if (clean.size() == 0 || noisy.size() == 0) throw std::invalid_argument("ranking loss needs clean and noisy samples");
  PairLoss<Scalar> out;
  out.d_clean = Vector<Scalar>::Zero(clean.size());
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  Array active_per_noisy = Array::Zero(noisy.size());
  Array slack(noisy.size()), active(noisy.size());
  const Scalar scale = Scalar(1) / (static_cast<Scalar>(clean.size()) * static_cast<Scalar>(noisy.size()));
  Scalar total = 0;
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    slack = (noisy.array() + (margin - clean[i])).cwiseMax(Scalar(0));
    active = (slack > Scalar(0)).template cast<Scalar>();
    total += slack.sum();
    out.d_clean[i] = -active.sum() * scale;
    active_per_noisy += active;
  }
  out.value = total * scale;
  out.d_noisy = (active_per_noisy * scale).matrix();
  return out;
}

/// Mean binary cross-entropy over both lists, clean targets 1 and noisy 0.
/// Inputs are clamped to [1e-12, 1 - 1e-12] before taking logs.
template <typename Scalar>
PairLoss<Scalar> bc_loss(const Vector<Scalar>& clean, const Vector<Scalar>& noisy) {
  const Eigen::Index n = clean.size() + noisy.size();
  if (n == 0) throw std::invalid_argument("binary classification loss needs samples");
  constexpr Scalar eps = Scalar(1e-12);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  const auto c = clean.array().max(eps).min(Scalar(1) - eps);
  const auto q = noisy.array().max(eps).min(Scalar(1) - eps);
  PairLoss<Scalar> out;
  out.value = -(c.log().sum() + (Scalar(1) - q).log().sum()) * inv_n;
  out.d_clean = (-inv_n / c).matrix();
  out.d_noisy = (inv_n / (Scalar(1) - q)).matrix();
  return out;
}

enum class Reduction { sum, mean };

template <typename Scalar>
struct CrossEntropy {
  Scalar value = 0;
  Matrix<Scalar> d_logits;
};

/// Cross entropy of softmax(logits) against `labels` over `nodes`. Throws
/// std::invalid_argument when a listed node has a label outside {0, 1}.
template <typename Scalar>
CrossEntropy<Scalar> ce_loss(const Matrix<Scalar>& logits, const Eigen::VectorXi& labels, std::span<const int> nodes,
                             Reduction reduction = Reduction::sum) {
  CrossEntropy<Scalar> out;
  out.d_logits = Matrix<Scalar>::Zero(logits.rows(), logits.cols());
  if (nodes.empty()) return out;
  const Scalar scale = reduction == Reduction::mean ? Scalar(1) / static_cast<Scalar>(nodes.size()) : Scalar(1);
  for (int n : nodes) {
    const int y = labels[n];
    if (y < 0 || y >= logits.cols()) throw std::invalid_argument("cross entropy: node " + std::to_string(n) + " is unlabeled");
    const Scalar mx = logits.row(n).maxCoeff();
    const RowVector<Scalar> e = (logits.row(n).array() - mx).exp().matrix();
    const Scalar z = e.sum();
    out.value += (std::log(z) + mx - logits(n, y)) * scale;
    out.d_logits.row(n) = e / z * scale;
    out.d_logits(n, y) -= scale;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adam

template <typename Scalar>
struct AdamConfig {
  Scalar lr = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
};

template <typename Scalar>
struct AdamState {
  std::vector<Matrix<Scalar>> m;
  std::vector<Matrix<Scalar>> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update on every parameter. Throws
/// std::domain_error naming the first parameter with a non-finite gradient;
/// nothing is updated in that case.
template <typename Scalar>
void adam_step(std::span<Parameter<Scalar>* const> params, AdamState<Scalar>& state, const AdamConfig<Scalar>& cfg) {
  for (const auto* p : params) {
    if (!p->grad.allFinite()) throw std::domain_error("non-finite gradient in parameter '" + p->name + "'");
  }
  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (const auto* p : params) {
      state.m.push_back(Matrix<Scalar>::Zero(p->value.rows(), p->value.cols()));
      state.v.push_back(Matrix<Scalar>::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++state.step;
  const Scalar c1 = Scalar(1) - std::pow(cfg.beta1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(cfg.beta2, static_cast<Scalar>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols()) {
      throw std::invalid_argument("adam: moment shape mismatch for '" + p.name + "'");
    }
    m = cfg.beta1 * m + (Scalar(1) - cfg.beta1) * p.grad;
    v = cfg.beta2 * v + (Scalar(1) - cfg.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  }
}

// ---------------------------------------------------------------------------

/// Estimator and classifier parameters plus the optimizer state.
template <typename Scalar>
struct ModelParams {
  EdgeEstimator<Scalar> estimator;
  GcnClassifier<Scalar> classifier;
  AdamState<Scalar> adam;

  ModelParams() = default;
  ModelParams(Eigen::Index edge_dim, Eigen::Index node_dim, Eigen::Index estimator_hidden = 16,
              Eigen::Index classifier_hidden = 64)
      : estimator(edge_dim, estimator_hidden), classifier(node_dim, classifier_hidden) {}

  std::vector<Parameter<Scalar>*> parameters() {
    auto p = estimator.parameters();
    auto q = classifier.parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  }

  std::vector<const Parameter<Scalar>*> parameters() const {
    auto p = const_cast<ModelParams*>(this)->parameters();
    return {p.begin(), p.end()};
  }

  void zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
  }
};

}  // namespace fnd::nn

#endif  // FND_NEURAL_HPP
