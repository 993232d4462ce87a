#ifndef FND_DATA_MODEL_HPP
#define FND_DATA_MODEL_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace fnd {

/// Epoch seconds. Sub-second precision is truncated on ingest.
using Timestamp = std::int64_t;

/// Sentinel for a timestamp that could not be represented.
inline constexpr Timestamp kInvalidTime = std::numeric_limits<Timestamp>::min();

/// Label value used in integer label vectors for articles without a label.
inline constexpr int kUnlabeled = -1;

enum class Veracity : int { real = 0, fake = 1 };

struct Article {
  std::string id;
  Timestamp publish_time = 0;
  std::optional<Veracity> label;
  Eigen::VectorXd features;
};

struct Engagement {
  std::string user;
  std::string article;
  Timestamp time = 0;
};

struct Dataset {
  std::vector<Article> articles;
  std::vector<Engagement> engagements;
  std::size_t feature_dim = 0;
};

struct EarlinessConfig {
  Timestamp deadline_seconds = 48 * 3600;
  double user_threshold = 0.3;
  int min_engagements = 3;

  /// Throws std::invalid_argument when a field is out of range.
  void check() const;
};

enum class IssueKind {
  dangling_reference,
  duplicate_article,
  non_finite_time,
  non_finite_feature,
  feature_length,
};

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  std::size_t row;  // index into articles or engagements, by kind
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const { return issues.empty(); }
  std::size_t count(IssueKind kind) const;
  std::string summary(std::size_t max_lines = 10) const;
};

/// Lists every problem found in `d`; never throws and never modifies `d`.
ValidationReport validate_dataset(const Dataset& d);

/// A validated dataset with users and articles interned to dense indices.
/// Articles keep the dataset order; users are sorted by id.
class Corpus {
 public:
  /// Throws std::invalid_argument if `d` does not validate.
  explicit Corpus(Dataset d);

  const Dataset& dataset() const { return data_; }
  std::size_t num_articles() const { return data_.articles.size(); }
  std::size_t num_engagements() const { return data_.engagements.size(); }
  std::size_t num_users() const { return users_.size(); }
  std::size_t feature_dim() const { return data_.feature_dim; }

  const std::string& article_id(int a) const { return data_.articles[a].id; }
  const std::string& user_id(int u) const { return users_[u]; }
  Timestamp publish_time(int a) const { return data_.articles[a].publish_time; }
  /// 0, 1 or kUnlabeled.
  int label(int a) const { return labels_[a]; }
  const Eigen::VectorXi& labels() const { return labels_; }
  /// One row per article.
  const Eigen::MatrixXd& features() const { return features_; }

  int engagement_user(std::size_t e) const { return eng_user_[e]; }
  int engagement_article(std::size_t e) const { return eng_article_[e]; }
  Timestamp engagement_time(std::size_t e) const { return data_.engagements[e].time; }

  std::optional<int> find_article(std::string_view id) const;
  std::optional<int> find_user(std::string_view id) const;

 private:
  Dataset data_;
  std::vector<std::string> users_;
  std::unordered_map<std::string, int> article_pos_;
  std::unordered_map<std::string, int> user_pos_;
  std::vector<int> eng_user_;
  std::vector<int> eng_article_;
  Eigen::VectorXi labels_;
  Eigen::MatrixXd features_;
};

}  // namespace fnd

#endif  // FND_DATA_MODEL_HPP
