#include "fnd/temporal_split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fnd/random.hpp"

namespace fnd {
namespace {

std::vector<int> publish_order(const Corpus& corpus) {
  std::vector<int> order(corpus.num_articles());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (corpus.publish_time(a) != corpus.publish_time(b)) return corpus.publish_time(a) < corpus.publish_time(b);
    return corpus.article_id(a) < corpus.article_id(b);
  });
  return order;
}

void fill_context(const Corpus& corpus, TemporalSplit& split) {
  for (auto& band : split.bands) {
    std::sort(band.articles.begin(), band.articles.end());
    band.engagements.clear();
    for (std::size_t e = 0; e < corpus.num_engagements(); ++e) {
      if (corpus.engagement_time(e) <= band.cut) band.engagements.push_back(static_cast<int>(e));
    }
    band.users = active_users(corpus, band.engagements, split.min_engagements);
  }
}

void check_fractions(SplitFractions f) {
  if (!(f.train > 0 && f.val > 0 && f.test > 0)) throw std::invalid_argument("split fractions must be positive");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
}

std::array<std::size_t, 3> band_sizes(std::size_t n, SplitFractions f) {
  // Guard against 0.7 * 10 landing a hair above 7.
  auto take = [n](double frac) {
    return static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
  };
  const std::size_t n_train = take(f.train);
  const std::size_t n_val = take(f.val);
  if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
    throw std::invalid_argument("dataset with " + std::to_string(n) +
                                " articles is too small for the requested split fractions");
  }
  return {n_train, n_val, n - n_train - n_val};
}

}  // namespace

std::string_view to_string(Band band) {
  switch (band) {
    case Band::train: return "train";
    case Band::val: return "val";
    case Band::test: return "test";
  }
  return "?";
}

std::vector<int> active_users(const Corpus& corpus, const std::vector<int>& engagements, int min_engagements) {
  std::vector<int> counts(corpus.num_users(), 0);
  for (int e : engagements) ++counts[static_cast<std::size_t>(corpus.engagement_user(static_cast<std::size_t>(e)))];
  std::vector<int> users;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (counts[u] >= min_engagements) users.push_back(static_cast<int>(u));
  }
  return users;
}

TemporalSplit split_by_fraction(const Corpus& corpus, SplitFractions fractions, int min_engagements) {
  check_fractions(fractions);
  if (min_engagements < 1) throw std::invalid_argument("min_engagements must be >= 1");
  const auto order = publish_order(corpus);
  const auto sizes = band_sizes(order.size(), fractions);

  TemporalSplit split;
  split.min_engagements = min_engagements;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    auto& band = split.bands[b];
    band.articles.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + sizes[b]));
    pos += sizes[b];
    band.cut = corpus.publish_time(order[pos - 1]);
  }
  auto& test = split[Band::test];
  for (std::size_t e = 0; e < corpus.num_engagements(); ++e) test.cut = std::max(test.cut, corpus.engagement_time(e));
  fill_context(corpus, split);
  return split;
}

TemporalSplit split_by_timestamps(const Corpus& corpus, Timestamp t_train, Timestamp t_val, Timestamp t_test,
                                  int min_engagements) {
  if (!(t_train < t_val && t_val < t_test)) throw std::invalid_argument("cuts must satisfy t_train < t_val < t_test");
  if (min_engagements < 1) throw std::invalid_argument("min_engagements must be >= 1");
  TemporalSplit split;
  split.min_engagements = min_engagements;
  split[Band::train].cut = t_train;
  split[Band::val].cut = t_val;
  split[Band::test].cut = t_test;
  for (std::size_t a = 0; a < corpus.num_articles(); ++a) {
    const Timestamp t = corpus.publish_time(static_cast<int>(a));
    if (t <= t_train) {
      split[Band::train].articles.push_back(static_cast<int>(a));
    } else if (t <= t_val) {
      split[Band::val].articles.push_back(static_cast<int>(a));
    } else if (t <= t_test) {
      split[Band::test].articles.push_back(static_cast<int>(a));
    }
  }
  const auto& train = split[Band::train].articles;
  if (train.empty()) throw std::invalid_argument("no article is published at or before t_train");
  if (std::none_of(train.begin(), train.end(), [&](int a) { return corpus.label(a) != kUnlabeled; })) {
    throw std::invalid_argument("training band has no labeled article");
  }
  fill_context(corpus, split);
  return split;
}

TemporalSplit split_random(const Corpus& corpus, SplitFractions fractions, int min_engagements,
                           std::uint64_t seed) {
  check_fractions(fractions);
  if (min_engagements < 1) throw std::invalid_argument("min_engagements must be >= 1");
  std::vector<int> order(corpus.num_articles());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, "split.random");
  std::shuffle(order.begin(), order.end(), rng);
  const auto sizes = band_sizes(order.size(), fractions);

  Timestamp last = std::numeric_limits<Timestamp>::min();
  for (std::size_t a = 0; a < corpus.num_articles(); ++a) last = std::max(last, corpus.publish_time(static_cast<int>(a)));
  for (std::size_t e = 0; e < corpus.num_engagements(); ++e) last = std::max(last, corpus.engagement_time(e));

  TemporalSplit split;
  split.min_engagements = min_engagements;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    split.bands[b].articles.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                   order.begin() + static_cast<std::ptrdiff_t>(pos + sizes[b]));
    pos += sizes[b];
    split.bands[b].cut = last;
  }
  fill_context(corpus, split);
  return split;
}

}  // namespace fnd
