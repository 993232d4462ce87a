#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace fnd::testing {

Dataset random_dataset(std::mt19937_64& rng, const RandomDatasetSpec& spec) {
  std::uniform_int_distribution<int> n_art(1, spec.max_articles);
  std::uniform_int_distribution<int> n_usr(1, spec.max_users);
  std::uniform_int_distribution<int> n_eng(0, spec.max_engagements);
  std::uniform_int_distribution<std::int64_t> publish(0, spec.time_span - 1);
  std::uniform_int_distribution<std::int64_t> delay(-spec.skew, spec.delay_span - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset d;
  d.feature_dim = spec.feature_dim;
  const int articles = n_art(rng);
  const int users = n_usr(rng);
  const int engagements = n_eng(rng);
  for (int a = 0; a < articles; ++a) {
    Article art;
    char id[16];
    std::snprintf(id, sizeof(id), "p%03d", a);
    art.id = id;
    art.publish_time = publish(rng);
    if (unit(rng) >= spec.unlabeled_fraction) art.label = unit(rng) < 0.5 ? Veracity::real : Veracity::fake;
    art.features.resize(static_cast<Eigen::Index>(spec.feature_dim));
    for (Eigen::Index f = 0; f < art.features.size(); ++f) art.features[f] = normal(rng);
    d.articles.push_back(std::move(art));
  }
  std::uniform_int_distribution<int> pick_article(0, articles - 1);
  std::uniform_int_distribution<int> pick_user(0, users - 1);
  for (int e = 0; e < engagements; ++e) {
    const auto& art = d.articles[static_cast<std::size_t>(pick_article(rng))];
    char user[16];
    std::snprintf(user, sizeof(user), "u%03d", pick_user(rng));
    d.engagements.push_back({user, art.id, art.publish_time + delay(rng)});
  }
  std::sort(d.articles.begin(), d.articles.end(), [](const Article& a, const Article& b) {
    return std::tie(a.publish_time, a.id) < std::tie(b.publish_time, b.id);
  });
  return d;
}

Dataset small_dataset(const std::vector<std::pair<std::string, std::int64_t>>& articles,
                      const std::vector<int>& labels,
                      const std::vector<std::tuple<std::string, std::string, std::int64_t>>& engagements,
                      std::size_t feature_dim) {
  Dataset d;
  d.feature_dim = feature_dim;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    Article a;
    a.id = articles[i].first;
    a.publish_time = articles[i].second;
    if (i < labels.size() && labels[i] >= 0) a.label = static_cast<Veracity>(labels[i]);
    a.features = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(feature_dim), static_cast<double>(i));
    d.articles.push_back(std::move(a));
  }
  for (const auto& [u, a, t] : engagements) d.engagements.push_back({u, a, t});
  return d;
}

std::set<int> oracle_active_users(const Corpus& corpus, std::int64_t cut, int m) {
  std::map<int, int> count;
  for (std::size_t e = 0; e < corpus.num_engagements(); ++e) {
    if (corpus.engagement_time(e) <= cut) ++count[corpus.engagement_user(e)];
  }
  std::set<int> out;
  for (const auto& [u, c] : count) {
    if (c >= m) out.insert(u);
  }
  return out;
}

DenseBand oracle_engagement_matrix(const Corpus& corpus, const std::vector<int>& band_articles, std::int64_t cut, int m) {
  DenseBand band;
  const auto active = oracle_active_users(corpus, cut, m);
  band.users.assign(active.begin(), active.end());
  band.articles = band_articles;
  band.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(band.users.size()),
                                      static_cast<Eigen::Index>(band.articles.size()));
  for (std::size_t e = 0; e < corpus.num_engagements(); ++e) {
    if (corpus.engagement_time(e) > cut) continue;
    const auto u = std::find(band.users.begin(), band.users.end(), corpus.engagement_user(e));
    const auto a = std::find(band.articles.begin(), band.articles.end(), corpus.engagement_article(e));
    if (u == band.users.end() || a == band.articles.end()) continue;
    band.counts(u - band.users.begin(), a - band.articles.begin()) += 1.0;
  }
  return band;
}

Eigen::MatrixXd oracle_adjacency(const DenseBand& band) {
  const Eigen::Index n = band.counts.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      for (Eigen::Index u = 0; u < band.counts.rows(); ++u) a(i, j) += band.counts(u, i) * band.counts(u, j);
    }
  }
  return a;
}

std::map<std::pair<int, int>, std::array<std::int64_t, 4>> oracle_edge_features(
    const Corpus& corpus, const std::vector<int>& band_articles, std::int64_t cut, const EarlinessConfig& config) {
  // Per-user earliness over every engagement up to the cut.
  std::map<int, std::pair<int, int>> early_total;
  std::vector<std::size_t> log;
  for (std::size_t e = 0; e < corpus.num_engagements(); ++e) {
    if (corpus.engagement_time(e) > cut) continue;
    log.push_back(e);
    auto& [early, total] = early_total[corpus.engagement_user(e)];
    const std::int64_t delta = corpus.engagement_time(e) - corpus.publish_time(corpus.engagement_article(e));
    early += delta < config.deadline_seconds ? 1 : 0;
    ++total;
  }
  const std::set<int> in_band(band_articles.begin(), band_articles.end());
  std::map<std::pair<int, int>, std::array<std::int64_t, 4>> out;
  for (int a : band_articles) {
    for (int b : band_articles) {
      if (a >= b) continue;
      std::array<std::int64_t, 4> z{0, 0, 0, 0};
      for (const auto& [user, et] : early_total) {
        if (et.second < config.min_engagements) continue;
        bool on_a = false, on_b = false;
        for (std::size_t e : log) {
          if (corpus.engagement_user(e) != user) continue;
          on_a |= corpus.engagement_article(e) == a;
          on_b |= corpus.engagement_article(e) == b;
        }
        if (!on_a || !on_b) continue;
        const bool early_user = static_cast<double>(et.first) / et.second > config.user_threshold;
        for (std::size_t e : log) {
          const int art = corpus.engagement_article(e);
          if (corpus.engagement_user(e) != user || (art != a && art != b)) continue;
          const bool early = corpus.engagement_time(e) - corpus.publish_time(art) < config.deadline_seconds;
          z[(early_user ? 0 : 2) + (early ? 0 : 1)] += 1;
        }
      }
      if (z[0] + z[1] + z[2] + z[3] > 0) out[{a, b}] = z;
    }
  }
  return out;
}

double oracle_ranking_loss(const Eigen::VectorXd& clean, const Eigen::VectorXd& noisy, double margin) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    for (Eigen::Index j = 0; j < noisy.size(); ++j) total += std::max(0.0, -(clean[i] - noisy[j]) + margin);
  }
  return total / (static_cast<double>(clean.size()) * static_cast<double>(noisy.size()));
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    worst = std::max(worst, std::abs(x - y) / std::max({floor, std::abs(x), std::abs(y)}));
  }
  return worst;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fnd-tests-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fnd::testing
