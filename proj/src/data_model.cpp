#include "fnd/data_model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fnd {

void EarlinessConfig::check() const {
  if (deadline_seconds <= 0) {
    throw std::invalid_argument("earliness: deadline_seconds must be positive");
  }
  if (!(user_threshold >= 0.0 && user_threshold <= 1.0)) {
    throw std::invalid_argument("earliness: user_threshold must lie in [0, 1]");
  }
  if (min_engagements < 1) {
    throw std::invalid_argument("earliness: min_engagements must be >= 1");
  }
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::dangling_reference: return "dangling_reference";
    case IssueKind::duplicate_article: return "duplicate_article";
    case IssueKind::non_finite_time: return "non_finite_time";
    case IssueKind::non_finite_feature: return "non_finite_feature";
    case IssueKind::feature_length: return "feature_length";
  }
  return "unknown";
}

std::size_t ValidationReport::count(IssueKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [&](const auto& i) { return i.kind == kind; }));
}

std::string ValidationReport::summary(std::size_t max_lines) const {
  std::ostringstream os;
  os << issues.size() << " issue(s)";
  for (std::size_t i = 0; i < issues.size() && i < max_lines; ++i) {
    os << "\n  " << to_string(issues[i].kind) << " [row " << issues[i].row
       << "]: " << issues[i].detail;
  }
  if (issues.size() > max_lines) os << "\n  ...";
  return os.str();
}

ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport report;
  std::unordered_set<std::string_view> seen;
  seen.reserve(d.articles.size());
  for (std::size_t i = 0; i < d.articles.size(); ++i) {
    const Article& a = d.articles[i];
    if (!seen.insert(a.id).second) {
      report.issues.push_back({IssueKind::duplicate_article, i, "duplicate article id '" + a.id + "'"});
    }
    if (a.publish_time == kInvalidTime) {
      report.issues.push_back({IssueKind::non_finite_time, i, "article '" + a.id + "' has no valid publish time"});
    }
    if (static_cast<std::size_t>(a.features.size()) != d.feature_dim) {
      report.issues.push_back({IssueKind::feature_length, i,
                               "article '" + a.id + "' has " + std::to_string(a.features.size()) +
                                   " features, expected " + std::to_string(d.feature_dim)});
    } else if (!a.features.allFinite()) {
      report.issues.push_back({IssueKind::non_finite_feature, i, "article '" + a.id + "' has non-finite features"});
    }
  }
  for (std::size_t i = 0; i < d.engagements.size(); ++i) {
    const Engagement& e = d.engagements[i];
    if (!seen.contains(e.article)) {
      report.issues.push_back({IssueKind::dangling_reference, i,
                               "engagement by '" + e.user + "' references unknown article '" + e.article + "'"});
    }
    if (e.time == kInvalidTime) {
      report.issues.push_back({IssueKind::non_finite_time, i, "engagement by '" + e.user + "' has no valid time"});
    }
  }
  return report;
}

Corpus::Corpus(Dataset d) : data_(std::move(d)) {
  if (auto report = validate_dataset(data_); !report.valid()) {
    throw std::invalid_argument("invalid dataset: " + report.summary());
  }
  const auto n = static_cast<Eigen::Index>(data_.articles.size());
  const auto f = static_cast<Eigen::Index>(data_.feature_dim);
  labels_.resize(n);
  features_.resize(n, f);
  article_pos_.reserve(data_.articles.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Article& a = data_.articles[i];
    article_pos_.emplace(a.id, static_cast<int>(i));
    labels_[i] = a.label ? static_cast<int>(*a.label) : kUnlabeled;
    if (f > 0) features_.row(i) = a.features.transpose();
  }

  users_.reserve(data_.engagements.size());
  for (const auto& e : data_.engagements) users_.push_back(e.user);
  std::sort(users_.begin(), users_.end());
  users_.erase(std::unique(users_.begin(), users_.end()), users_.end());
  user_pos_.reserve(users_.size());
  for (std::size_t u = 0; u < users_.size(); ++u) user_pos_.emplace(users_[u], static_cast<int>(u));

  eng_user_.reserve(data_.engagements.size());
  eng_article_.reserve(data_.engagements.size());
  for (const auto& e : data_.engagements) {
    eng_user_.push_back(user_pos_.at(e.user));
    eng_article_.push_back(article_pos_.at(e.article));
  }
}

std::optional<int> Corpus::find_article(std::string_view id) const {
  if (auto it = article_pos_.find(std::string(id)); it != article_pos_.end()) return it->second;
  return std::nullopt;
}

std::optional<int> Corpus::find_user(std::string_view id) const {
  if (auto it = user_pos_.find(std::string(id)); it != user_pos_.end()) return it->second;
  return std::nullopt;
}

}  // namespace fnd
