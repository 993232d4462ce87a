#ifndef FND_EDGE_FEATURES_HPP
#define FND_EDGE_FEATURES_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fnd/earliness.hpp"
#include "fnd/graph_builder.hpp"
#include "fnd/random.hpp"

namespace fnd {

using RawEdgeFeatures = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 4>;

/// Per-edge (|EE|, |EL|, |LE|, |LL|) counts, rows aligned with graph.edges.
struct EdgeFeatureTable {
  std::vector<GraphEdge> edges;
  RawEdgeFeatures raw;
  Eigen::MatrixXd normalized;
};

/// For edge (i, j), every engagement on i or j by a user with nonzero counts
/// on both adds its multiplicity to the counter of its joint group.
/// `earliness` must be computed from the same band as `engagement`.
EdgeFeatureTable build_edge_features(const SocialGraph& graph, const EngagementMatrix& engagement,
                                     const Corpus& corpus, const EarlinessLabels& earliness);

/// Largest value per column.
template <typename Derived>
Eigen::RowVectorXd column_maxima(const Eigen::MatrixBase<Derived>& raw) {
  if (raw.rows() == 0) return Eigen::RowVectorXd::Zero(raw.cols());
  return raw.template cast<double>().colwise().maxCoeff();
}

/// Divides every column by `maxima`; columns with a zero maximum stay zero.
template <typename Derived>
Eigen::MatrixXd normalize_columns(const Eigen::MatrixBase<Derived>& raw, const Eigen::RowVectorXd& maxima) {
  Eigen::MatrixXd out = raw.template cast<double>();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    if (maxima[c] > 0.0) {
      out.col(c) /= maxima[c];
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

template <typename Derived>
Eigen::MatrixXd normalize_columns(const Eigen::MatrixBase<Derived>& raw) {
  return normalize_columns(raw, column_maxima(raw));
}

enum class FeatureVariant { joint, random, no_user, no_eng, ratio, node_features };

std::string_view to_string(FeatureVariant v);
/// Accepts joint, rand, no-user, no-eng, ratio, nf (and the enum spellings).
/// Throws std::invalid_argument on anything else.
FeatureVariant parse_feature_variant(std::string_view name);

/// Raw count matrix of a count-based variant: joint (4 columns), no_user
/// (early, late engagement), no_eng (early-user, late-user engagement).
Eigen::MatrixXd variant_counts(const RawEdgeFeatures& raw, FeatureVariant variant);

/// Input dimension of the edge estimator for `variant`.
Eigen::Index variant_dim(FeatureVariant variant, std::size_t node_feature_dim);

struct EdgeInputs {
  Eigen::MatrixXd values;
  /// Column maxima used for count variants; empty otherwise.
  Eigen::RowVectorXd maxima;
};

/// Estimator inputs for `variant`. Count variants are column-normalized, by
/// `reuse_maxima` when given. ratio maps zero-sum rows to 0.25 everywhere;
/// random draws U[0,1) from `rng`; node_features concatenates the endpoint
/// feature rows in (src, dst) order.
EdgeInputs make_edge_inputs(const EdgeFeatureTable& table, const SocialGraph& graph, FeatureVariant variant,
                            Rng& rng, const Eigen::RowVectorXd* reuse_maxima = nullptr);

/// TSV dump: src_id, dst_id, ee, el, le, ll, then the normalized values.
void write_edge_features_tsv(const EdgeFeatureTable& table, const SocialGraph& graph, const Corpus& corpus,
                             const std::filesystem::path& path);

}  // namespace fnd

#endif  // FND_EDGE_FEATURES_HPP
