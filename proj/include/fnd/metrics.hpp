#ifndef FND_METRICS_HPP
#define FND_METRICS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fnd/graph_builder.hpp"

namespace fnd {

/// Binary metrics with fake (1) as the positive class.
struct EvalReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> homophily_original;
  std::optional<double> homophily_reweighted;

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Throws std::invalid_argument on length mismatch. F1 is 0 when precision
/// and recall are both 0.
EvalReport classification_metrics(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

/// sum of clean-edge weights / sum of all edge weights; nullopt when the
/// total is zero. Throws std::invalid_argument on an empty edge list, a
/// negative weight, or an unlabeled endpoint.
std::optional<double> homophily_ratio(std::span<const GraphEdge> edges, const Eigen::VectorXd& weights,
                                      const Eigen::VectorXi& labels);

/// homophily_ratio with the graph's own co-engagement counts as weights.
std::optional<double> homophily_ratio(const SocialGraph& graph);

}  // namespace fnd

#endif  // FND_METRICS_HPP
