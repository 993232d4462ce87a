#ifndef FND_INGESTION_HPP
#define FND_INGESTION_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "fnd/data_model.hpp"

namespace fnd {

/// Raised for malformed input files; the message carries `file:line`.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default file names inside a dataset directory.
inline constexpr const char* kArticlesFile = "articles.tsv";
inline constexpr const char* kEngagementsFile = "engagements.tsv";
inline constexpr const char* kFeaturesFile = "features.txt";

/// Reads the three-file dataset layout:
///  - articles: TSV with header, columns `id`, `publish_time`, `label` (0, 1 or empty)
///  - engagements: TSV with header, columns `user_id`, `article_id`, `time`
///  - features: `article_id f_1 ... f_F` per line, whitespace separated, no header
/// An empty file counts as zero rows. Articles come back sorted by publish
/// time, ties by id. Throws IngestError.
Dataset load_dataset(const std::filesystem::path& articles_path,
                     const std::filesystem::path& engagements_path,
                     const std::filesystem::path& features_path);

/// load_dataset on the default file names inside `dir`.
Dataset load_dataset_dir(const std::filesystem::path& dir);

/// Writes `d` in the layout read by load_dataset. Reals are written with
/// round-trip precision.
void write_dataset(const Dataset& d, const std::filesystem::path& dir);

/// Content hash over the canonical serialization, as 16 hex digits.
std::string fingerprint(const Dataset& d);

/// Parses an epoch-seconds field; fractional seconds are truncated.
/// Returns kInvalidTime on failure.
Timestamp parse_timestamp(std::string_view field);

struct SyntheticSpec {
  int n_articles = 600;
  double fake_fraction = 0.5;
  int n_users = 2000;
  double engagements_mean = 6.0;
  double engagements_dispersion = 2.0;
  /// Probability that an early engagement targets the user's preferred class.
  double early_bias = 0.95;
  /// Same for late engagements; must not exceed early_bias.
  double late_bias = 0.55;
  /// Share of the bias gap driven by the user's earliness propensity rather
  /// than by the engagement's own timing. 0 makes bias purely per engagement.
  double user_effect = 0.0;
  Timestamp deadline_seconds = 48 * 3600;
  /// Late delays are deadline + Exp(mean = late_delay_factor * deadline).
  double late_delay_factor = 3.0;
  Timestamp horizon_seconds = 365LL * 24 * 3600;
  Timestamp start_time = 1'500'000'000;
  int feature_dim = 16;
  /// Distance between the two class means; noise is unit variance.
  double separation = 1.0;
  std::uint64_t seed = 0;

  void check() const;
};

/// Deterministic in `spec`. Every user has a preferred class and an earliness
/// propensity; each engagement is drawn early or late from the propensity and
/// lands on a preferred-class article with probability
///   late_bias + (early_bias - late_bias) * ((1 - user_effect) * [early] + user_effect * propensity).
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace fnd

#endif  // FND_INGESTION_HPP
