#ifndef FND_GRAPH_BUILDER_HPP
#define FND_GRAPH_BUILDER_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Sparse>

#include "fnd/data_model.hpp"
#include "fnd/temporal_split.hpp"

namespace fnd {

using CountMatrix = Eigen::SparseMatrix<std::int64_t>;

/// User x article engagement counts of one band.
struct EngagementMatrix {
  std::vector<int> users;     // corpus user index per row
  std::vector<int> articles;  // corpus article index per column
  CountMatrix counts;
};

/// Counts engagements of `band` whose user is active in the band and whose
/// article belongs to it.
EngagementMatrix build_engagement_matrix(const Corpus& corpus, const BandSet& band);

/// Undirected edge between local node indices, src < dst.
struct GraphEdge {
  int src = 0;
  int dst = 0;
  std::int64_t weight = 0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Article co-engagement graph. Node i is corpus article nodes[i].
struct SocialGraph {
  std::vector<int> nodes;
  Eigen::VectorXi labels;    // kUnlabeled where unknown
  Eigen::MatrixXd features;  // one row per node
  /// Symmetric, zero diagonal.
  CountMatrix adjacency;
  /// Upper triangle of `adjacency`, sorted by (src, dst).
  std::vector<GraphEdge> edges;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }
};

/// A = E^T E with the diagonal removed, computed on the sparse structure.
SocialGraph build_social_graph(const EngagementMatrix& engagement, const Corpus& corpus);

/// Writes `src_id dst_id weight` (TSV with header) and a node table
/// `id label publish_time` where a missing label is written as `-`.
void write_graph_tsv(const SocialGraph& graph, const Corpus& corpus, const std::filesystem::path& edges_path,
                     const std::filesystem::path& nodes_path);

}  // namespace fnd

#endif  // FND_GRAPH_BUILDER_HPP
