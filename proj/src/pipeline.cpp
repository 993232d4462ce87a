#include "fnd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "fnd/random.hpp"

namespace fnd {
namespace {

nn::EdgePairs edge_pairs(const SocialGraph& graph) {
  nn::EdgePairs pairs(static_cast<Eigen::Index>(graph.num_edges()), 2);
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    pairs(static_cast<Eigen::Index>(k), 0) = graph.edges[k].src;
    pairs(static_cast<Eigen::Index>(k), 1) = graph.edges[k].dst;
  }
  return pairs;
}

Eigen::VectorXd edge_counts(const SocialGraph& graph) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(graph.num_edges()));
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    w[static_cast<Eigen::Index>(k)] = static_cast<double>(graph.edges[k].weight);
  }
  return w;
}

std::vector<int> labeled_nodes(const SocialGraph& graph) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < graph.labels.size(); ++i) {
    if (graph.labels[i] != kUnlabeled) out.push_back(static_cast<int>(i));
  }
  return out;
}

Eigen::VectorXd band_weights(const nn::ModelParams<double>& params, const BandData& band, const TrainConfig& config) {
  if (!config.reweight) return band.counts;
  if (band.pairs.rows() == 0) return Eigen::VectorXd(0);
  return params.estimator.forward(band.inputs.values);
}

std::string format_value(std::optional<double> v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::array<BandData, 3> prepare_bands(const Corpus& corpus, const TemporalSplit& split,
                                      const EarlinessConfig& earliness) {
  std::array<BandData, 3> out;
  EarlinessConfig cfg = earliness;
  cfg.min_engagements = split.min_engagements;
  for (Band b : kBands) {
    auto& d = out[static_cast<std::size_t>(b)];
    const BandSet& set = split[b];
    d.band = b;
    d.engagement = build_engagement_matrix(corpus, set);
    d.graph = build_social_graph(d.engagement, corpus);
    d.earliness = compute_earliness(corpus, set.engagements, cfg);
    d.features = build_edge_features(d.graph, d.engagement, corpus, d.earliness);
    d.pairs = edge_pairs(d.graph);
    d.counts = edge_counts(d.graph);
  }
  return out;
}

void assign_edge_inputs(std::array<BandData, 3>& bands, const TrainConfig& config) {
  Rng rng = make_rng(config.seed, "features.random");
  auto& train = bands[static_cast<std::size_t>(Band::train)];
  train.inputs = make_edge_inputs(train.features, train.graph, config.feature_variant, rng);
  for (Band b : {Band::val, Band::test}) {
    auto& d = bands[static_cast<std::size_t>(b)];
    const Eigen::RowVectorXd* reuse =
        config.normalization_reuse && train.inputs.maxima.size() > 0 ? &train.inputs.maxima : nullptr;
    d.inputs = make_edge_inputs(d.features, d.graph, config.feature_variant, rng, reuse);
  }
}

TemporalSplit make_split(const Corpus& corpus, const RunConfig& config) {
  const int m = config.train.earliness.min_engagements;
  if (config.cuts) return split_by_timestamps(corpus, (*config.cuts)[0], (*config.cuts)[1], (*config.cuts)[2], m);
  return split_by_fraction(corpus, config.fractions, m);
}

EdgePartition partition_edges(const SocialGraph& graph, bool allow_unlabeled) {
  EdgePartition p;
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const int a = graph.labels[graph.edges[k].src], b = graph.labels[graph.edges[k].dst];
    if (a == kUnlabeled || b == kUnlabeled) {
      if (!allow_unlabeled) throw std::invalid_argument("training graph has an edge with an unlabeled endpoint");
      p.unlabeled.push_back(static_cast<int>(k));
    } else if (a == b) {
      p.clean.push_back(static_cast<int>(k));
    } else {
      p.noisy.push_back(static_cast<int>(k));
    }
  }
  return p;
}

bool uses_pair_loss(const TrainConfig& config) {
  return config.reweight && config.loss_variant != LossVariant::none && config.alpha > 0.0;
}

TrainResult train(const BandData& train_band, const BandData& val_band, const TrainConfig& config) {
  config.check();
  const SocialGraph& g = train_band.graph;
  if (g.num_nodes() == 0) throw std::invalid_argument("empty training graph");
  for (Eigen::Index i = 0; i < g.labels.size(); ++i) {
    if (g.labels[i] == kUnlabeled) throw std::invalid_argument("training band has unlabeled articles");
  }
  const bool pair_loss = uses_pair_loss(config);
  const EdgePartition part = partition_edges(g);
  if (pair_loss && (part.clean.empty() || part.noisy.empty())) {
    throw std::invalid_argument("pair loss needs at least one clean and one noisy training edge");
  }
  if (config.reweight && train_band.inputs.values.rows() != train_band.pairs.rows()) {
    throw std::invalid_argument("training edge inputs are not assigned");
  }

  const Eigen::Index edge_dim = config.reweight ? train_band.inputs.values.cols()
                                                : variant_dim(config.feature_variant, static_cast<std::size_t>(g.features.cols()));
  TrainResult result;
  nn::ModelParams<double> model(edge_dim, g.features.cols(), config.estimator_hidden, config.classifier_hidden);
  {
    Rng init = make_rng(config.seed, "init");
    model.estimator.initialize(init);
    model.classifier.initialize(init);
  }
  Rng sampler = make_rng(config.seed, "sampling");
  std::uniform_int_distribution<std::size_t> pick_clean(0, part.clean.empty() ? 0 : part.clean.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_noisy(0, part.noisy.empty() ? 0 : part.noisy.size() - 1);

  const std::vector<int> train_nodes = labeled_nodes(g);
  const std::vector<int> val_nodes = labeled_nodes(val_band.graph);
  Eigen::VectorXi val_truth(static_cast<Eigen::Index>(val_nodes.size()));
  for (std::size_t i = 0; i < val_nodes.size(); ++i) val_truth[static_cast<Eigen::Index>(i)] = val_band.graph.labels[val_nodes[i]];
  const nn::AdamConfig<double> adam{config.lr, 0.9, 0.999, 1e-8};
  const Eigen::Index n = static_cast<Eigen::Index>(g.num_nodes());
  const Eigen::Index k = config.k;

  nn::EdgeEstimator<double>::Cache est_cache;
  nn::GcnClassifier<double>::Cache gcn_cache;
  Eigen::VectorXd clean_w(k), noisy_w(k);
  std::vector<int> clean_idx(static_cast<std::size_t>(k)), noisy_idx(static_cast<std::size_t>(k));
  result.best_val_f1 = -1.0;
  result.history.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    model.zero_grad();
    Eigen::VectorXd weights;
    if (config.reweight && train_band.pairs.rows() > 0) {
      weights = model.estimator.forward(train_band.inputs.values, &est_cache);
    } else if (config.reweight) {
      weights.resize(0);
    } else {
      weights = train_band.counts;
    }
    const nn::NormalizedAdjacency<double> adj(n, train_band.pairs, weights);
    const Eigen::MatrixXd logits = model.classifier.forward(g.features, adj, &gcn_cache);
    const auto ce = nn::ce_loss<double>(logits, g.labels, train_nodes, config.ce_reduction);

    double l_rank = 0.0;
    Eigen::VectorXd d_weights;
    const bool edge_grad = config.reweight && train_band.pairs.rows() > 0;
    model.classifier.backward(g.features, adj, gcn_cache, ce.d_logits, edge_grad ? &d_weights : nullptr);
    if (pair_loss) {
      for (Eigen::Index s = 0; s < k; ++s) {
        clean_idx[static_cast<std::size_t>(s)] = part.clean[pick_clean(sampler)];
        noisy_idx[static_cast<std::size_t>(s)] = part.noisy[pick_noisy(sampler)];
      }
      result.edge_draws += 2 * k;
      for (Eigen::Index s = 0; s < k; ++s) {
        clean_w[s] = weights[clean_idx[static_cast<std::size_t>(s)]];
        noisy_w[s] = weights[noisy_idx[static_cast<std::size_t>(s)]];
      }
      const auto pl = config.loss_variant == LossVariant::rank ? nn::ranking_loss<double>(clean_w, noisy_w, config.margin)
                                                                 : nn::bc_loss<double>(clean_w, noisy_w);
      l_rank = pl.value;
      for (Eigen::Index s = 0; s < k; ++s) {
        d_weights[clean_idx[static_cast<std::size_t>(s)]] += config.alpha * pl.d_clean[s];
        d_weights[noisy_idx[static_cast<std::size_t>(s)]] += config.alpha * pl.d_noisy[s];
      }
    }
    const double total = ce.value + config.alpha * l_rank;
    if (!std::isfinite(total)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
    }
    if (edge_grad) model.estimator.backward(train_band.inputs.values, est_cache, d_weights);

    auto params = model.parameters();
    try {
      nn::adam_step<double>(params, model.adam, adam);
    } catch (const std::domain_error& e) {
      throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
    }

    HistoryRow row;
    row.epoch = epoch;
    row.l_gnn = ce.value;
    row.l_rank = l_rank;
    row.total = total;
    if (!val_nodes.empty()) {
      const Inference inf = infer(model, val_band, config);
      Eigen::VectorXi pred(static_cast<Eigen::Index>(val_nodes.size()));
      for (std::size_t i = 0; i < val_nodes.size(); ++i) pred[static_cast<Eigen::Index>(i)] = inf.labels[val_nodes[i]];
      const EvalReport r = classification_metrics(pred, val_truth);
      row.val_acc = r.accuracy;
      row.val_f1 = r.f1;
    }
    result.history.push_back(row);
    if (row.val_f1 > result.best_val_f1) {
      result.best_val_f1 = row.val_f1;
      result.best_epoch = epoch;
      result.params = model;
    }
  }
  return result;
}

Inference infer(const nn::ModelParams<double>& params, const BandData& band, const TrainConfig& config) {
  const SocialGraph& g = band.graph;
  Inference out;
  out.weights = band_weights(params, band, config);
  const nn::NormalizedAdjacency<double> adj(static_cast<Eigen::Index>(g.num_nodes()), band.pairs, out.weights);
  const Eigen::MatrixXd logits = params.classifier.forward(g.features, adj);
  out.probabilities = nn::softmax_rows(logits);
  out.labels.resize(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out.labels[i] = logits(i, 1) > logits(i, 0) ? 1 : 0;
  return out;
}

EvalReport evaluate(const nn::ModelParams<double>& params, const BandData& band, const TrainConfig& config) {
  const SocialGraph& g = band.graph;
  const Inference inf = infer(params, band, config);
  const std::vector<int> nodes = labeled_nodes(g);
  Eigen::VectorXi pred(static_cast<Eigen::Index>(nodes.size())), truth(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    pred[static_cast<Eigen::Index>(i)] = inf.labels[nodes[i]];
    truth[static_cast<Eigen::Index>(i)] = g.labels[nodes[i]];
  }
  EvalReport report = classification_metrics(pred, truth);

  std::vector<GraphEdge> edges;
  std::vector<double> before, after;
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    const GraphEdge& e = g.edges[k];
    if (g.labels[e.src] == kUnlabeled || g.labels[e.dst] == kUnlabeled) continue;
    edges.push_back(e);
    before.push_back(band.counts[static_cast<Eigen::Index>(k)]);
    after.push_back(inf.weights[static_cast<Eigen::Index>(k)]);
  }
  if (!edges.empty()) {
    const Eigen::Index m = static_cast<Eigen::Index>(edges.size());
    report.homophily_original = homophily_ratio(edges, Eigen::Map<const Eigen::VectorXd>(before.data(), m), g.labels);
    report.homophily_reweighted = homophily_ratio(edges, Eigen::Map<const Eigen::VectorXd>(after.data(), m), g.labels);
  }
  return report;
}

EdgeWeightMeans edge_weight_means(const nn::ModelParams<double>& params, const BandData& band,
                                  const TrainConfig& config) {
  const EdgePartition part = partition_edges(band.graph, true);
  const Eigen::VectorXd w = band_weights(params, band, config);
  auto mean = [&](const std::vector<int>& idx) {
    if (idx.empty()) return 0.0;
    double s = 0.0;
    for (int k : idx) s += w[k];
    return s / static_cast<double>(idx.size());
  };
  return {mean(part.clean), mean(part.noisy)};
}

const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> names{"dawn", "no-rank", "bc", "rand", "no-user", "no-eng", "ratio", "nf", "gcn"};
  return names;
}

TrainConfig apply_variant(TrainConfig base, std::string_view variant) {
  base.reweight = true;
  base.loss_variant = LossVariant::rank;
  base.feature_variant = FeatureVariant::joint;
  if (variant == "dawn") {
  } else if (variant == "no-rank") {
    base.loss_variant = LossVariant::none;
  } else if (variant == "bc") {
    base.loss_variant = LossVariant::bc;
  } else if (variant == "rand") {
    base.feature_variant = FeatureVariant::random;
  } else if (variant == "no-user") {
    base.feature_variant = FeatureVariant::no_user;
  } else if (variant == "no-eng") {
    base.feature_variant = FeatureVariant::no_eng;
  } else if (variant == "ratio") {
    base.feature_variant = FeatureVariant::ratio;
  } else if (variant == "nf") {
    base.feature_variant = FeatureVariant::node_features;
  } else if (variant == "gcn") {
    base.reweight = false;
    base.loss_variant = LossVariant::none;
  } else {
    throw ConfigError("unknown variant '" + std::string(variant) + "'");
  }
  return base;
}

ExperimentResult run_experiment(const Corpus& corpus, const RunConfig& config) {
  config.train.check();
  const TemporalSplit split = make_split(corpus, config);
  auto bands = prepare_bands(corpus, split, config.train.earliness);
  assign_edge_inputs(bands, config.train);
  const BandData& tr = bands[static_cast<std::size_t>(Band::train)];
  ExperimentResult out;
  out.training = train(tr, bands[static_cast<std::size_t>(Band::val)], config.train);
  out.test = evaluate(out.training.params, bands[static_cast<std::size_t>(Band::test)], config.train);
  out.train_weights = edge_weight_means(out.training.params, tr, config.train);
  return out;
}

std::vector<AblationRow> run_ablation(const Corpus& corpus, const RunConfig& base,
                                      const std::vector<std::string>& variants, int n_seeds) {
  if (n_seeds < 1) throw ConfigError("ablation needs at least one seed");
  std::vector<TrainConfig> configs;
  for (const auto& v : variants) configs.push_back(apply_variant(base.train, v));
  base.train.check();
  const TemporalSplit split = make_split(corpus, base);
  auto bands = prepare_bands(corpus, split, base.train.earliness);
  std::vector<AblationRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (int s = 0; s < n_seeds; ++s) {
      TrainConfig cfg = configs[v];
      cfg.seed = base.train.seed + static_cast<std::uint64_t>(s);
      assign_edge_inputs(bands, cfg);
      const BandData& tr = bands[static_cast<std::size_t>(Band::train)];
      const TrainResult res = train(tr, bands[static_cast<std::size_t>(Band::val)], cfg);
      AblationRow row;
      row.variant = variants[v];
      row.seed = cfg.seed;
      row.report = evaluate(res.params, bands[static_cast<std::size_t>(Band::test)], cfg);
      row.train_weights = edge_weight_means(res.params, tr, cfg);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_history_tsv(const std::vector<HistoryRow>& history, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "epoch\tL_GNN\tL_rank\ttotal\tval_acc\tval_f1\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.9g\t%.6f\t%.6f\n", r.epoch, r.l_gnn, r.l_rank, r.total, r.val_acc,
                  r.val_f1);
    os << buf;
  }
}

void write_results_tsv(const std::vector<AblationRow>& rows, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "variant\tseed\tacc\tf1\thomophily_before\thomophily_after\n";
  for (const auto& r : rows) {
    os << r.variant << '\t' << r.seed << '\t' << format_value(r.report.accuracy) << '\t' << format_value(r.report.f1) << '\t'
       << format_value(r.report.homophily_original) << '\t' << format_value(r.report.homophily_reweighted) << '\n';
  }
}

}  // namespace fnd
