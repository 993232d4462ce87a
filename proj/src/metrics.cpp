#include "fnd/metrics.hpp"

#include <stdexcept>

namespace fnd {

EvalReport classification_metrics(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth lengths differ");
  EvalReport r;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1, t = truth[i] == 1;
    if (p && t) {
      ++r.tp;
    } else if (p) {
      ++r.fp;
    } else if (t) {
      ++r.fn;
    } else {
      ++r.tn;
    }
  }
  const auto n = static_cast<double>(r.total());
  r.accuracy = n > 0 ? static_cast<double>(r.tp + r.tn) / n : 0.0;
  const double precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  const double recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return r;
}

std::optional<double> homophily_ratio(std::span<const GraphEdge> edges, const Eigen::VectorXd& weights,
                                      const Eigen::VectorXi& labels) {
  if (edges.empty()) throw std::invalid_argument("homophily ratio of an edgeless graph");
  if (static_cast<std::size_t>(weights.size()) != edges.size()) throw std::invalid_argument("one weight per edge required");
  double clean = 0.0, total = 0.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int a = labels[edges[k].src], b = labels[edges[k].dst];
    if (a == kUnlabeled || b == kUnlabeled) throw std::invalid_argument("homophily ratio needs labeled endpoints");
    const double w = weights[static_cast<Eigen::Index>(k)];
    if (w < 0.0) throw std::invalid_argument("negative edge weight");
    total += w;
    if (a == b) clean += w;
  }
  if (total <= 0.0) return std::nullopt;
  return clean / total;
}

std::optional<double> homophily_ratio(const SocialGraph& graph) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(graph.num_edges()));
  for (std::size_t k = 0; k < graph.num_edges(); ++k) w[static_cast<Eigen::Index>(k)] = static_cast<double>(graph.edges[k].weight);
  return homophily_ratio(graph.edges, w, graph.labels);
}

}  // namespace fnd
