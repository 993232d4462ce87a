#include "fnd/edge_features.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace fnd {

EdgeFeatureTable build_edge_features(const SocialGraph& graph, const EngagementMatrix& engagement,
                                     const Corpus& corpus, const EarlinessLabels& earliness) {
  EdgeFeatureTable table;
  table.edges = graph.edges;
  table.raw = RawEdgeFeatures::Zero(static_cast<Eigen::Index>(graph.num_edges()), 4);

  const auto n_cols = static_cast<std::uint64_t>(engagement.articles.size());
  std::unordered_map<std::uint64_t, Eigen::Index> edge_index;
  edge_index.reserve(graph.num_edges());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto& e = graph.edges[k];
    edge_index.emplace(static_cast<std::uint64_t>(e.src) * n_cols + static_cast<std::uint64_t>(e.dst),
                       static_cast<Eigen::Index>(k));
  }

  std::vector<int> row_of(corpus.num_users(), -1);
  for (std::size_t i = 0; i < engagement.users.size(); ++i) {
    row_of[static_cast<std::size_t>(engagement.users[i])] = static_cast<int>(i);
  }
  std::vector<int> col_of(corpus.num_articles(), -1);
  for (std::size_t j = 0; j < engagement.articles.size(); ++j) {
    col_of[static_cast<std::size_t>(engagement.articles[j])] = static_cast<int>(j);
  }

  // Group counts per (user row, article column) over the engagements that
  // make up the engagement matrix.
  using GroupCounts = Eigen::Matrix<std::int64_t, 1, 4>;
  std::unordered_map<std::uint64_t, GroupCounts> cell;
  for (std::size_t i = 0; i < earliness.engagements.size(); ++i) {
    if (!earliness.groups[i]) continue;
    const auto e = static_cast<std::size_t>(earliness.engagements[i]);
    const int row = row_of[static_cast<std::size_t>(corpus.engagement_user(e))];
    const int col = col_of[static_cast<std::size_t>(corpus.engagement_article(e))];
    if (row < 0 || col < 0) continue;
    auto [it, inserted] = cell.try_emplace(static_cast<std::uint64_t>(row) * n_cols + static_cast<std::uint64_t>(col),
                                           GroupCounts::Zero());
    it->second[static_cast<int>(*earliness.groups[i])] += 1;
  }

  const Eigen::SparseMatrix<std::int64_t, Eigen::RowMajor> by_user = engagement.counts;
  std::vector<std::pair<int, GroupCounts>> touched;
  for (Eigen::Index row = 0; row < by_user.outerSize(); ++row) {
    touched.clear();
    for (decltype(by_user)::InnerIterator it(by_user, row); it; ++it) {
      auto c = cell.find(static_cast<std::uint64_t>(row) * n_cols + static_cast<std::uint64_t>(it.col()));
      touched.emplace_back(static_cast<int>(it.col()), c == cell.end() ? GroupCounts::Zero() : c->second);
    }
    for (std::size_t a = 0; a < touched.size(); ++a) {
      for (std::size_t b = a + 1; b < touched.size(); ++b) {
        const auto key = static_cast<std::uint64_t>(touched[a].first) * n_cols + static_cast<std::uint64_t>(touched[b].first);
        const Eigen::Index k = edge_index.at(key);
        table.raw.row(k) += touched[a].second + touched[b].second;
      }
    }
  }
  table.normalized = normalize_columns(table.raw);
  return table;
}

std::string_view to_string(FeatureVariant v) {
  switch (v) {
    case FeatureVariant::joint: return "joint";
    case FeatureVariant::random: return "rand";
    case FeatureVariant::no_user: return "no-user";
    case FeatureVariant::no_eng: return "no-eng";
    case FeatureVariant::ratio: return "ratio";
    case FeatureVariant::node_features: return "nf";
  }
  return "?";
}

FeatureVariant parse_feature_variant(std::string_view name) {
  if (name == "joint") return FeatureVariant::joint;
  if (name == "rand" || name == "random") return FeatureVariant::random;
  if (name == "no-user" || name == "no_user") return FeatureVariant::no_user;
  if (name == "no-eng" || name == "no_eng") return FeatureVariant::no_eng;
  if (name == "ratio") return FeatureVariant::ratio;
  if (name == "nf" || name == "node_features" || name == "node-features") return FeatureVariant::node_features;
  throw std::invalid_argument("unknown feature variant '" + std::string(name) + "'");
}

Eigen::MatrixXd variant_counts(const RawEdgeFeatures& raw, FeatureVariant variant) {
  const Eigen::MatrixXd z = raw.cast<double>();
  const auto ee = z.col(0), el = z.col(1), le = z.col(2), ll = z.col(3);
  Eigen::MatrixXd out;
  switch (variant) {
    case FeatureVariant::joint:
      return z;
    case FeatureVariant::no_user:
      out.resize(z.rows(), 2);
      out.col(0) = ee + le;
      out.col(1) = el + ll;
      return out;
    case FeatureVariant::no_eng:
      out.resize(z.rows(), 2);
      out.col(0) = ee + el;
      out.col(1) = le + ll;
      return out;
    default:
      throw std::invalid_argument("variant '" + std::string(to_string(variant)) + "' is not count based");
  }
}

Eigen::Index variant_dim(FeatureVariant variant, std::size_t node_feature_dim) {
  switch (variant) {
    case FeatureVariant::no_user:
    case FeatureVariant::no_eng:
      return 2;
    case FeatureVariant::node_features:
      return 2 * static_cast<Eigen::Index>(node_feature_dim);
    default:
      return 4;
  }
}

EdgeInputs make_edge_inputs(const EdgeFeatureTable& table, const SocialGraph& graph, FeatureVariant variant,
                            Rng& rng, const Eigen::RowVectorXd* reuse_maxima) {
  EdgeInputs out;
  const Eigen::Index n = table.raw.rows();
  switch (variant) {
    case FeatureVariant::joint:
    case FeatureVariant::no_user:
    case FeatureVariant::no_eng: {
      const Eigen::MatrixXd counts = variant_counts(table.raw, variant);
      out.maxima = reuse_maxima ? *reuse_maxima : column_maxima(counts);
      if (out.maxima.size() != counts.cols()) throw std::invalid_argument("reused maxima have the wrong width");
      out.values = normalize_columns(counts, out.maxima);
      break;
    }
    case FeatureVariant::random: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      out.values.resize(n, 4);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < 4; ++c) out.values(i, c) = unit(rng);
      }
      break;
    }
    case FeatureVariant::ratio: {
      const Eigen::MatrixXd z = table.raw.cast<double>();
      out.values.resize(n, 4);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sum = z.row(i).sum();
        if (sum > 0.0) {
          out.values.row(i) = z.row(i) / sum;
        } else {
          out.values.row(i).setConstant(0.25);
        }
      }
      break;
    }
    case FeatureVariant::node_features: {
      const Eigen::Index f = graph.features.cols();
      out.values.resize(n, 2 * f);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& e = table.edges[static_cast<std::size_t>(i)];
        out.values.row(i).head(f) = graph.features.row(e.src);
        out.values.row(i).tail(f) = graph.features.row(e.dst);
      }
      break;
    }
  }
  return out;
}

void write_edge_features_tsv(const EdgeFeatureTable& table, const SocialGraph& graph, const Corpus& corpus,
                             const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.precision(17);
  os << "src_id\tdst_id\tee\tel\tle\tll\tee_norm\tel_norm\tle_norm\tll_norm\n";
  for (std::size_t k = 0; k < table.edges.size(); ++k) {
    const auto& e = table.edges[k];
    const auto row = static_cast<Eigen::Index>(k);
    os << corpus.article_id(graph.nodes[static_cast<std::size_t>(e.src)]) << '\t'
       << corpus.article_id(graph.nodes[static_cast<std::size_t>(e.dst)]);
    for (int c = 0; c < 4; ++c) os << '\t' << table.raw(row, c);
    for (int c = 0; c < 4; ++c) os << '\t' << table.normalized(row, c);
    os << '\n';
  }
}

}  // namespace fnd
