#ifndef FND_EARLINESS_HPP
#define FND_EARLINESS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fnd/data_model.hpp"

namespace fnd {

/// (user class, engagement class). The enum value is also the column of the
/// group in edge feature tables.
enum class JointGroup : int { EE = 0, EL = 1, LE = 2, LL = 3 };

std::string_view to_string(JointGroup g);

constexpr JointGroup joint_group(bool early_user, bool early_engagement) {
  return early_user ? (early_engagement ? JointGroup::EE : JointGroup::EL)
                    : (early_engagement ? JointGroup::LE : JointGroup::LL);
}

/// Per-user score keyed by corpus user index.
using UserScores = std::map<int, double>;

struct EngagementClasses {
  /// Aligned with the input engagement list.
  std::vector<std::uint8_t> early;
  /// Positions (into the input list) of engagements that predate their
  /// article's publish time. They are classified early.
  std::vector<std::size_t> flagged;
};

/// Early iff time - publish_time < deadline (strict).
EngagementClasses classify_engagements(const Corpus& corpus, std::span<const int> engagements, Timestamp deadline);

struct FnaResult {
  UserScores scores;
  /// Engagements on unlabeled articles, left out of every score.
  std::vector<int> excluded;
};

/// Share of each user's engagements that target fake articles. Users with
/// fewer than `min_engagements` listed engagements are not scored.
FnaResult fna_scores(const Corpus& corpus, std::span<const int> engagements, int min_engagements);

/// Share of each user's engagements that are early.
UserScores user_earliness(const Corpus& corpus, std::span<const int> engagements, Timestamp deadline,
                          int min_engagements);

/// Group of every listed engagement; nullopt where the user is not scored.
/// A user is early iff UE > user_threshold (strict).
std::vector<std::optional<JointGroup>> joint_groups(const Corpus& corpus, std::span<const int> engagements,
                                                    const EarlinessConfig& config);

/// Everything the edge features need for one band, computed from that band's
/// engagements only.
struct EarlinessLabels {
  std::vector<int> engagements;
  std::vector<std::uint8_t> early;
  std::vector<std::size_t> flagged;
  UserScores user_earliness;
  std::vector<std::optional<JointGroup>> groups;  // aligned with `engagements`

  bool is_early_user(int user, double threshold) const;
};

EarlinessLabels compute_earliness(const Corpus& corpus, std::span<const int> engagements,
                                  const EarlinessConfig& config);

/// Counts over [0, 1] in `bins` equal bins, last bin closed on the right.
/// Throws std::invalid_argument when bins < 2.
std::vector<std::size_t> fna_histogram(std::span<const double> scores, int bins);

/// 2 * mean(|s - 0.5|): 0 when every score is 0.5, 1 when all are 0 or 1.
double skewness(std::span<const double> scores);

std::vector<double> score_values(const UserScores& scores);

/// FNA histograms for the whole log and per earliness group. Group-wise
/// scores use only the group's engagements per user (among users active in
/// the full list). Keys: "all", "early", "late", "early_user", "late_user",
/// "EE", "EL", "LE", "LL".
std::map<std::string, UserScores> grouped_fna_scores(const Corpus& corpus, std::span<const int> engagements,
                                                     const EarlinessConfig& config);

/// Writes fna_hist.tsv, fna_hist_by_engagement_class.tsv,
/// fna_hist_by_user_class.tsv and fna_hist_joint.tsv into `out_dir`.
void write_fna_tables(const std::map<std::string, UserScores>& grouped, int bins,
                      const std::filesystem::path& out_dir);

}  // namespace fnd

#endif  // FND_EARLINESS_HPP
