#include <doctest.h>

#include <map>
#include <numeric>

#include "fnd/earliness.hpp"
#include "fnd/ingestion.hpp"
#include "support.hpp"

using namespace fnd;

namespace {

SyntheticSpec small_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.n_articles = 200;
  s.n_users = 600;
  s.feature_dim = 4;
  s.seed = seed;
  return s;
}

// Per-user FNA over the engagements whose earliness matches `which`
// (0 = early only, 1 = late only, 2 = all), recomputed from the raw log.
std::vector<double> oracle_fna(const Dataset& d, Timestamp deadline, int which) {
  std::map<std::string, std::pair<Timestamp, int>> article;
  for (const auto& a : d.articles) article[a.id] = {a.publish_time, static_cast<int>(*a.label)};
  std::map<std::string, std::pair<int, int>> fake_total;
  for (const auto& e : d.engagements) {
    const auto& [publish, label] = article.at(e.article);
    const bool early = e.time - publish < deadline;
    if (which == 0 && !early) continue;
    if (which == 1 && early) continue;
    auto& [fake, total] = fake_total[e.user];
    fake += label;
    ++total;
  }
  std::vector<double> out;
  for (const auto& [user, ft] : fake_total) out.push_back(static_cast<double>(ft.first) / ft.second);
  return out;
}

double mean_distance(const std::vector<double>& scores) {
  double s = 0.0;
  for (double x : scores) s += std::abs(x - 0.5);
  return scores.empty() ? 0.0 : 2.0 * s / static_cast<double>(scores.size());
}

}  // namespace

TEST_CASE("generate_synthetic is deterministic in the seed") {
  const auto a = generate_synthetic(small_spec(7));
  const auto b = generate_synthetic(small_spec(7));
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(generate_synthetic(small_spec(8))) != fingerprint(a));
}

TEST_CASE("generated datasets validate and are sorted by publish time") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto spec = small_spec(seed);
    spec.fake_fraction = 0.2 + 0.15 * static_cast<double>(seed);
    const auto d = generate_synthetic(spec);
    CHECK(validate_dataset(d).valid());
    CHECK(d.articles.size() == 200);
    CHECK(d.feature_dim == 4);
    for (std::size_t i = 1; i < d.articles.size(); ++i) {
      CHECK(d.articles[i - 1].publish_time <= d.articles[i].publish_time);
    }
    for (const auto& e : d.engagements) CHECK(e.time >= spec.start_time);
  }
}

TEST_CASE("fake fraction within 2 points for 500+ articles") {
  for (double fraction : {0.1, 0.5, 0.527, 0.9}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      SyntheticSpec spec;
      spec.n_articles = 500 + static_cast<int>(seed) * 37;
      spec.n_users = 50;
      spec.fake_fraction = fraction;
      spec.seed = seed;
      const auto d = generate_synthetic(spec);
      int fake = 0;
      for (const auto& a : d.articles) fake += *a.label == Veracity::fake ? 1 : 0;
      CHECK(std::abs(static_cast<double>(fake) / spec.n_articles - fraction) <= 0.02);
    }
  }
}

TEST_CASE("full bias puts every user's FNA at exactly 0 or 1") {
  auto spec = small_spec(3);
  spec.early_bias = 1.0;
  spec.late_bias = 1.0;
  const auto scores = oracle_fna(generate_synthetic(spec), spec.deadline_seconds, 2);
  REQUIRE(scores.size() > 100);
  for (double s : scores) CHECK((s == 0.0 || s == 1.0));
}

TEST_CASE("early-engagement FNA is more extreme than late-engagement FNA") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto spec = small_spec(seed);
    spec.early_bias = 1.0;
    spec.late_bias = 0.5;
    const auto d = generate_synthetic(spec);
    const double early = mean_distance(oracle_fna(d, spec.deadline_seconds, 0));
    const double late = mean_distance(oracle_fna(d, spec.deadline_seconds, 1));
    CHECK(early > late);
    CHECK(early == doctest::Approx(1.0));
  }
}

TEST_CASE("early-engagement FNA histogram sits in the outer bins under full early bias") {
  auto spec = small_spec(4);
  spec.early_bias = 1.0;
  spec.late_bias = 0.3;
  const auto d = generate_synthetic(spec);
  Corpus corpus(d);
  std::vector<int> all(corpus.num_engagements());
  std::iota(all.begin(), all.end(), 0);
  EarlinessConfig cfg;
  cfg.deadline_seconds = spec.deadline_seconds;
  cfg.min_engagements = 1;
  const auto grouped = grouped_fna_scores(corpus, all, cfg);
  const auto values = score_values(grouped.at("early"));
  const auto hist = fna_histogram(values, 10);
  std::size_t inner = 0;
  for (std::size_t b = 1; b + 1 < hist.size(); ++b) inner += hist[b];
  CHECK(inner == 0);
  CHECK(hist.front() + hist.back() == values.size());
  CHECK(values.size() > 50);
  CHECK(skewness(values) == doctest::Approx(mean_distance(oracle_fna(d, spec.deadline_seconds, 0))));
}

TEST_CASE("raising early_bias never lowers early-engagement skewness") {
  double previous = -1.0;
  for (double bias : {0.55, 0.65, 0.75, 0.85, 0.95, 1.0}) {
    auto spec = small_spec(5);
    spec.early_bias = bias;
    spec.late_bias = 0.55;
    const double s = mean_distance(oracle_fna(generate_synthetic(spec), spec.deadline_seconds, 0));
    CHECK(s >= previous);
    previous = s;
  }
}

TEST_CASE("generator settings are validated") {
  auto spec = small_spec(0);
  CHECK_NOTHROW(spec.check());
  spec.late_bias = 0.99;
  CHECK_THROWS_AS(spec.check(), std::invalid_argument);
  spec = small_spec(0);
  spec.n_users = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  spec = small_spec(0);
  spec.fake_fraction = 1.2;
  CHECK_THROWS_AS(spec.check(), std::invalid_argument);
  spec = small_spec(0);
  spec.separation = -1.0;
  CHECK_THROWS_AS(spec.check(), std::invalid_argument);
}
