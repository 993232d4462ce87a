#include "fnd/graph_builder.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace fnd {

EngagementMatrix build_engagement_matrix(const Corpus& corpus, const BandSet& band) {
  EngagementMatrix m;
  m.users = band.users;
  m.articles = band.articles;

  std::vector<int> row_of(corpus.num_users(), -1);
  for (std::size_t i = 0; i < m.users.size(); ++i) row_of[static_cast<std::size_t>(m.users[i])] = static_cast<int>(i);
  std::vector<int> col_of(corpus.num_articles(), -1);
  for (std::size_t j = 0; j < m.articles.size(); ++j) col_of[static_cast<std::size_t>(m.articles[j])] = static_cast<int>(j);

  std::vector<Eigen::Triplet<std::int64_t>> triplets;
  for (int e : band.engagements) {
    const auto idx = static_cast<std::size_t>(e);
    const int row = row_of[static_cast<std::size_t>(corpus.engagement_user(idx))];
    const int col = col_of[static_cast<std::size_t>(corpus.engagement_article(idx))];
    if (row >= 0 && col >= 0) triplets.emplace_back(row, col, 1);
  }
  m.counts.resize(static_cast<Eigen::Index>(m.users.size()), static_cast<Eigen::Index>(m.articles.size()));
  m.counts.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SocialGraph build_social_graph(const EngagementMatrix& engagement, const Corpus& corpus) {
  SocialGraph g;
  g.nodes = engagement.articles;
  const auto n = static_cast<Eigen::Index>(g.nodes.size());
  g.labels.resize(n);
  g.features.resize(n, static_cast<Eigen::Index>(corpus.feature_dim()));
  for (Eigen::Index i = 0; i < n; ++i) {
    g.labels[i] = corpus.label(g.nodes[static_cast<std::size_t>(i)]);
    g.features.row(i) = corpus.features().row(g.nodes[static_cast<std::size_t>(i)]);
  }

  g.adjacency = CountMatrix(engagement.counts.transpose() * engagement.counts);
  g.adjacency.prune([](Eigen::Index row, Eigen::Index col, std::int64_t value) { return row != col && value != 0; });
  g.adjacency.makeCompressed();

  for (Eigen::Index col = 0; col < g.adjacency.outerSize(); ++col) {
    for (CountMatrix::InnerIterator it(g.adjacency, col); it; ++it) {
      if (it.row() < it.col()) {
        g.edges.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return a.src != b.src ? a.src < b.src : a.dst < b.dst; });
  return g;
}

void write_graph_tsv(const SocialGraph& graph, const Corpus& corpus, const std::filesystem::path& edges_path,
                     const std::filesystem::path& nodes_path) {
  std::ofstream edges(edges_path);
  std::ofstream nodes(nodes_path);
  if (!edges || !nodes) throw std::runtime_error("cannot write graph export");
  edges << "src_id\tdst_id\tweight\n";
  for (const auto& e : graph.edges) {
    edges << corpus.article_id(graph.nodes[static_cast<std::size_t>(e.src)]) << '\t'
          << corpus.article_id(graph.nodes[static_cast<std::size_t>(e.dst)]) << '\t' << e.weight << '\n';
  }
  nodes << "id\tlabel\tpublish_time\n";
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    const int a = graph.nodes[i];
    nodes << corpus.article_id(a) << '\t';
    if (corpus.label(a) == kUnlabeled) {
      nodes << '-';
    } else {
      nodes << corpus.label(a);
    }
    nodes << '\t' << corpus.publish_time(a) << '\n';
  }
}

}  // namespace fnd
