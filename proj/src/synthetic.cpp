#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "fnd/ingestion.hpp"
#include "fnd/random.hpp"

namespace fnd {

void SyntheticSpec::check() const {
  if (n_articles < 1 || n_users < 1) throw std::invalid_argument("synthetic: n_articles and n_users must be >= 1");
  if (!(fake_fraction >= 0.0 && fake_fraction <= 1.0)) throw std::invalid_argument("synthetic: fake_fraction not in [0,1]");
  if (!(0.0 <= late_bias && late_bias <= early_bias && early_bias <= 1.0)) {
    throw std::invalid_argument("synthetic: need 0 <= late_bias <= early_bias <= 1");
  }
  if (!(user_effect >= 0.0 && user_effect <= 1.0)) throw std::invalid_argument("synthetic: user_effect not in [0,1]");
  if (!(engagements_mean > 0.0) || !(engagements_dispersion > 0.0)) {
    throw std::invalid_argument("synthetic: engagement mean and dispersion must be positive");
  }
  if (deadline_seconds <= 0 || horizon_seconds <= 0) throw std::invalid_argument("synthetic: durations must be positive");
  if (!(late_delay_factor > 0.0)) throw std::invalid_argument("synthetic: late_delay_factor must be positive");
  if (feature_dim < 1) throw std::invalid_argument("synthetic: feature_dim must be >= 1");
  if (!(separation >= 0.0)) throw std::invalid_argument("synthetic: separation must be non-negative");
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.check();
  const auto n = static_cast<std::size_t>(spec.n_articles);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Articles: publish times uniform over the horizon, exact fake count.
  Rng article_rng = make_rng(spec.seed, "synthetic.articles");
  std::vector<Timestamp> times(n);
  for (auto& t : times) {
    t = spec.start_time + static_cast<Timestamp>(std::floor(unit(article_rng) * static_cast<double>(spec.horizon_seconds)));
  }
  std::sort(times.begin(), times.end());
  const auto n_fake = static_cast<std::size_t>(std::llround(spec.fake_fraction * static_cast<double>(n)));
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_fake), 1);
  std::shuffle(labels.begin(), labels.end(), article_rng);

  Dataset d;
  d.feature_dim = static_cast<std::size_t>(spec.feature_dim);
  d.articles.resize(n);
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "a%05zu", i);
    d.articles[i].id = id;
    d.articles[i].publish_time = times[i];
    d.articles[i].label = static_cast<Veracity>(labels[i]);
    by_class[labels[i]].push_back(static_cast<int>(i));
  }

  // Features: class means at +/- separation/2 along a random unit direction.
  Rng feature_rng = make_rng(spec.seed, "synthetic.features");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd direction(spec.feature_dim);
  for (auto& v : direction) v = gauss(feature_rng);
  direction.normalize();
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = labels[i] == 1 ? 0.5 : -0.5;
    Eigen::VectorXd x(spec.feature_dim);
    for (auto& v : x) v = gauss(feature_rng);
    d.articles[i].features = x + sign * spec.separation * direction;
  }

  // Users and their engagements. Each engagement consumes exactly four
  // uniforms so that changing a bias leaves every other draw in place.
  Rng user_rng = make_rng(spec.seed, "synthetic.users");
  Rng eng_rng = make_rng(spec.seed, "synthetic.engagements");
  std::gamma_distribution<double> rate_dist(spec.engagements_dispersion,
                                            spec.engagements_mean / spec.engagements_dispersion);
  const double late_mean = spec.late_delay_factor * static_cast<double>(spec.deadline_seconds);
  const double gap = spec.early_bias - spec.late_bias;

  struct Row {
    Timestamp time;
    int user;
    int article;
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(spec.n_users * spec.engagements_mean * 1.2));
  for (int u = 0; u < spec.n_users; ++u) {
    const int preferred = unit(user_rng) < spec.fake_fraction ? 1 : 0;
    const double propensity = unit(user_rng);
    // Gamma-Poisson (negative binomial) count, at least one.
    std::poisson_distribution<int> count_dist(std::max(1e-9, rate_dist(user_rng)));
    const int k = std::max(1, count_dist(user_rng));
    for (int j = 0; j < k; ++j) {
      const double u_early = unit(eng_rng);
      const double u_same = unit(eng_rng);
      const double u_pick = unit(eng_rng);
      const double u_delay = unit(eng_rng);
      const bool early = u_early < propensity;
      const double same_prob =
          spec.late_bias + gap * ((1.0 - spec.user_effect) * (early ? 1.0 : 0.0) + spec.user_effect * propensity);
      int cls = u_same < same_prob ? preferred : 1 - preferred;
      if (by_class[cls].empty()) cls = 1 - cls;
      const auto& pool = by_class[cls];
      const auto idx = std::min(pool.size() - 1, static_cast<std::size_t>(u_pick * static_cast<double>(pool.size())));
      const int a = pool[idx];
      Timestamp delay = 0;
      if (early) {
        delay = static_cast<Timestamp>(std::floor(u_delay * static_cast<double>(spec.deadline_seconds)));
      } else {
        delay = spec.deadline_seconds + static_cast<Timestamp>(std::floor(-std::log1p(-u_delay) * late_mean));
      }
      rows.push_back({times[static_cast<std::size_t>(a)] + delay, u, a});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.time, x.user, x.article) < std::tie(y.time, y.user, y.article);
  });
  d.engagements.reserve(rows.size());
  for (const auto& row : rows) {
    char uid[32];
    std::snprintf(uid, sizeof(uid), "u%06d", row.user);
    d.engagements.push_back({uid, d.articles[static_cast<std::size_t>(row.article)].id, row.time});
  }
  return d;
}

}  // namespace fnd
