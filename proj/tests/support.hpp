#ifndef FND_TESTS_SUPPORT_HPP
#define FND_TESTS_SUPPORT_HPP

// Random dataset generators and brute-force oracles shared by the unit and
// acceptance tests. The oracles work from the raw engagement log with dense
// containers and never call the code under test beyond the Corpus interning.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fnd/data_model.hpp"
#include "fnd/temporal_split.hpp"

namespace fnd::testing {

struct RandomDatasetSpec {
  int max_articles = 20;
  int max_users = 30;
  int max_engagements = 120;
  std::size_t feature_dim = 3;
  /// Publish times are drawn from [0, time_span); engagement delays from
  /// [-skew, delay_span).
  std::int64_t time_span = 1000;
  std::int64_t delay_span = 400;
  std::int64_t skew = 0;
  double unlabeled_fraction = 0.0;
};

Dataset random_dataset(std::mt19937_64& rng, const RandomDatasetSpec& spec = {});

Dataset small_dataset(const std::vector<std::pair<std::string, std::int64_t>>& articles,
                      const std::vector<int>& labels,
                      const std::vector<std::tuple<std::string, std::string, std::int64_t>>& engagements,
                      std::size_t feature_dim = 2);

/// Dense user x article counts for the active users of a band; rows follow
/// sorted user ids, columns the band's article list order.
struct DenseBand {
  std::vector<int> users;
  std::vector<int> articles;
  Eigen::MatrixXd counts;
};

/// Recounts U_x from the raw log filtered to time <= cut.
std::set<int> oracle_active_users(const Corpus& corpus, std::int64_t cut, int m);

DenseBand oracle_engagement_matrix(const Corpus& corpus, const std::vector<int>& band_articles, std::int64_t cut, int m);

/// E^T E with the diagonal zeroed.
Eigen::MatrixXd oracle_adjacency(const DenseBand& band);

/// (EE, EL, LE, LL) per article pair (by corpus index, a < b) enumerated
/// from the log: every engagement on a or b by a user active in the band who
/// engaged both a and b.
std::map<std::pair<int, int>, std::array<std::int64_t, 4>> oracle_edge_features(
    const Corpus& corpus, const std::vector<int>& band_articles, std::int64_t cut, const EarlinessConfig& config);

/// Brute-force double loop of the pairwise hinge ranking loss.
double oracle_ranking_loss(const Eigen::VectorXd& clean, const Eigen::VectorXd& noisy, double margin);

/// max |a - b| / max(floor, |a|, |b|) over all entries.
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-5);

/// Fresh empty directory under the system temp path.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace fnd::testing

#endif  // FND_TESTS_SUPPORT_HPP
