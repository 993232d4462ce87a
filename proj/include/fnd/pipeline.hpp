#ifndef FND_PIPELINE_HPP
#define FND_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fnd/config.hpp"
#include "fnd/data_model.hpp"
#include "fnd/earliness.hpp"
#include "fnd/edge_features.hpp"
#include "fnd/graph_builder.hpp"
#include "fnd/metrics.hpp"
#include "fnd/neural.hpp"
#include "fnd/temporal_split.hpp"

namespace fnd {

/// Graph, earliness labels and edge inputs of one band.
struct BandData {
  Band band = Band::train;
  EngagementMatrix engagement;
  SocialGraph graph;
  EarlinessLabels earliness;
  EdgeFeatureTable features;
  /// Estimator inputs for the configured feature variant.
  EdgeInputs inputs;
  /// graph.edges as (src, dst) rows.
  nn::EdgePairs pairs;
  /// graph.edges weights as doubles.
  Eigen::VectorXd counts;
};

/// Builds the count-level structures of every band. Inputs are left empty;
/// see assign_edge_inputs.
std::array<BandData, 3> prepare_bands(const Corpus& corpus, const TemporalSplit& split,
                                      const EarlinessConfig& earliness);

/// Fills `inputs` of every band for `config.feature_variant`. Random features
/// come from the "features.random" stream of `config.seed`.
void assign_edge_inputs(std::array<BandData, 3>& bands, const TrainConfig& config);

TemporalSplit make_split(const Corpus& corpus, const RunConfig& config);

struct EdgePartition {
  std::vector<int> clean;
  std::vector<int> noisy;
  std::vector<int> unlabeled;
};

/// Clean (same label) and noisy (real-fake) edge indices. Throws
/// std::invalid_argument on an unlabeled endpoint unless `allow_unlabeled`,
/// in which case such edges go to `unlabeled`.
EdgePartition partition_edges(const SocialGraph& graph, bool allow_unlabeled = false);

struct HistoryRow {
  int epoch = 0;
  double l_gnn = 0.0;
  double l_rank = 0.0;
  double total = 0.0;
  double val_acc = 0.0;
  double val_f1 = 0.0;
};

struct TrainResult {
  nn::ModelParams<double> params;
  int best_epoch = 0;
  double best_val_f1 = 0.0;
  std::vector<HistoryRow> history;
  /// Edges drawn for the pair loss over the whole run (2K per epoch when on).
  std::int64_t edge_draws = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint training of estimator and classifier on the train band with
/// model selection by validation F1 (ties keep the earlier epoch).
/// Throws std::invalid_argument on unlabeled training nodes or missing
/// clean/noisy edges when the pair loss is on, TrainingError on a non-finite
/// loss.
TrainResult train(const BandData& train_band, const BandData& val_band, const TrainConfig& config);

/// Whether the edge weight estimator and a pair loss take part in training.
bool uses_pair_loss(const TrainConfig& config);

struct Inference {
  Eigen::VectorXi labels;
  Eigen::MatrixXd probabilities;
  /// Weight per graph edge fed to the classifier.
  Eigen::VectorXd weights;
};

/// argmax of softmax rows, ties toward label 0.
Inference infer(const nn::ModelParams<double>& params, const BandData& band, const TrainConfig& config);

/// Metrics over the labeled nodes of `band`; homophily over the edges whose
/// endpoints are both labeled.
EvalReport evaluate(const nn::ModelParams<double>& params, const BandData& band, const TrainConfig& config);

/// Mean estimated weight over clean and over noisy edges of a labeled band.
struct EdgeWeightMeans {
  double clean = 0.0;
  double noisy = 0.0;
};
EdgeWeightMeans edge_weight_means(const nn::ModelParams<double>& params, const BandData& band,
                                  const TrainConfig& config);

/// Supported names: dawn, no-rank, bc, rand, no-user, no-eng, ratio, nf, gcn.
TrainConfig apply_variant(TrainConfig base, std::string_view variant);
const std::vector<std::string>& known_variants();

struct ExperimentResult {
  TrainResult training;
  EvalReport test;
  EdgeWeightMeans train_weights;
};

/// Split, band preparation, training and test evaluation in one call.
ExperimentResult run_experiment(const Corpus& corpus, const RunConfig& config);

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  EvalReport report;
  EdgeWeightMeans train_weights;
};

/// One row per (variant, seed); seeds are base.train.seed + 0..n_seeds-1.
std::vector<AblationRow> run_ablation(const Corpus& corpus, const RunConfig& base,
                                      const std::vector<std::string>& variants, int n_seeds);

void write_history_tsv(const std::vector<HistoryRow>& history, const std::filesystem::path& path);
/// variant, seed, acc, f1, homophily_before, homophily_after; undefined
/// homophily is written as NA.
void write_results_tsv(const std::vector<AblationRow>& rows, const std::filesystem::path& path);

}  // namespace fnd

#endif  // FND_PIPELINE_HPP
