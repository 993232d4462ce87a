#include "fnd/earliness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fnd {
namespace {

std::vector<int> user_counts(const Corpus& corpus, std::span<const int> engagements) {
  std::vector<int> counts(corpus.num_users(), 0);
  for (int e : engagements) ++counts[static_cast<std::size_t>(corpus.engagement_user(static_cast<std::size_t>(e)))];
  return counts;
}

UserScores ratio_scores(const std::vector<int>& hits, const std::vector<int>& totals, const std::vector<int>& eligible,
                        int min_engagements) {
  UserScores out;
  for (std::size_t u = 0; u < totals.size(); ++u) {
    if (eligible[u] >= min_engagements && totals[u] > 0) {
      out.emplace(static_cast<int>(u), static_cast<double>(hits[u]) / static_cast<double>(totals[u]));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(JointGroup g) {
  switch (g) {
    case JointGroup::EE: return "EE";
    case JointGroup::EL: return "EL";
    case JointGroup::LE: return "LE";
    case JointGroup::LL: return "LL";
  }
  return "?";
}

EngagementClasses classify_engagements(const Corpus& corpus, std::span<const int> engagements, Timestamp deadline) {
  EngagementClasses out;
  out.early.resize(engagements.size());
  for (std::size_t i = 0; i < engagements.size(); ++i) {
    const auto e = static_cast<std::size_t>(engagements[i]);
    const Timestamp delta = corpus.engagement_time(e) - corpus.publish_time(corpus.engagement_article(e));
    out.early[i] = delta < deadline ? 1 : 0;
    if (delta < 0) out.flagged.push_back(i);
  }
  return out;
}

FnaResult fna_scores(const Corpus& corpus, std::span<const int> engagements, int min_engagements) {
  FnaResult out;
  const auto all = user_counts(corpus, engagements);
  std::vector<int> fake(corpus.num_users(), 0), labeled(corpus.num_users(), 0);
  for (int e : engagements) {
    const auto idx = static_cast<std::size_t>(e);
    const int label = corpus.label(corpus.engagement_article(idx));
    if (label == kUnlabeled) {
      out.excluded.push_back(e);
      continue;
    }
    const auto u = static_cast<std::size_t>(corpus.engagement_user(idx));
    ++labeled[u];
    fake[u] += label;
  }
  out.scores = ratio_scores(fake, labeled, all, min_engagements);
  return out;
}

UserScores user_earliness(const Corpus& corpus, std::span<const int> engagements, Timestamp deadline,
                          int min_engagements) {
  const auto classes = classify_engagements(corpus, engagements, deadline);
  const auto all = user_counts(corpus, engagements);
  std::vector<int> early(corpus.num_users(), 0);
  for (std::size_t i = 0; i < engagements.size(); ++i) {
    early[static_cast<std::size_t>(corpus.engagement_user(static_cast<std::size_t>(engagements[i])))] += classes.early[i];
  }
  return ratio_scores(early, all, all, min_engagements);
}

bool EarlinessLabels::is_early_user(int user, double threshold) const {
  auto it = user_earliness.find(user);
  return it != user_earliness.end() && it->second > threshold;
}

EarlinessLabels compute_earliness(const Corpus& corpus, std::span<const int> engagements,
                                  const EarlinessConfig& config) {
  config.check();
  EarlinessLabels out;
  out.engagements.assign(engagements.begin(), engagements.end());
  auto classes = classify_engagements(corpus, engagements, config.deadline_seconds);
  out.early = std::move(classes.early);
  out.flagged = std::move(classes.flagged);
  out.user_earliness = user_earliness(corpus, engagements, config.deadline_seconds, config.min_engagements);
  out.groups.resize(engagements.size());
  for (std::size_t i = 0; i < engagements.size(); ++i) {
    const int u = corpus.engagement_user(static_cast<std::size_t>(engagements[i]));
    auto it = out.user_earliness.find(u);
    if (it == out.user_earliness.end()) continue;
    out.groups[i] = joint_group(it->second > config.user_threshold, out.early[i] != 0);
  }
  return out;
}

std::vector<std::optional<JointGroup>> joint_groups(const Corpus& corpus, std::span<const int> engagements,
                                                    const EarlinessConfig& config) {
  return compute_earliness(corpus, engagements, config).groups;
}

std::vector<std::size_t> fna_histogram(std::span<const double> scores, int bins) {
  if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double s : scores) {
    const double clamped = std::clamp(s, 0.0, 1.0);
    auto bin = static_cast<std::size_t>(std::floor(clamped * bins));
    ++counts[std::min(bin, counts.size() - 1)];
  }
  return counts;
}

double skewness(std::span<const double> scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (double s : scores) sum += std::abs(s - 0.5);
  return 2.0 * sum / static_cast<double>(scores.size());
}

std::vector<double> score_values(const UserScores& scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& [user, s] : scores) out.push_back(s);
  return out;
}

std::map<std::string, UserScores> grouped_fna_scores(const Corpus& corpus, std::span<const int> engagements,
                                                     const EarlinessConfig& config) {
  const auto labels = compute_earliness(corpus, engagements, config);
  std::map<std::string, std::vector<int>> members;
  for (std::size_t i = 0; i < engagements.size(); ++i) {
    if (!labels.groups[i]) continue;
    const JointGroup g = *labels.groups[i];
    const int e = engagements[i];
    members["all"].push_back(e);
    members[labels.early[i] ? "early" : "late"].push_back(e);
    members[(g == JointGroup::EE || g == JointGroup::EL) ? "early_user" : "late_user"].push_back(e);
    members[std::string(to_string(g))].push_back(e);
  }
  std::map<std::string, UserScores> out;
  for (const char* key : {"all", "early", "late", "early_user", "late_user", "EE", "EL", "LE", "LL"}) {
    // Membership already implies an active user; any engagement count qualifies.
    out[key] = fna_scores(corpus, members[key], 1).scores;
  }
  return out;
}

void write_fna_tables(const std::map<std::string, UserScores>& grouped, int bins,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* file, std::initializer_list<const char*> keys) {
    std::ofstream os(out_dir / file);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / file).string());
    os << "bin_lo\tbin_hi\tcount\tgroup\n";
    for (const char* key : keys) {
      auto it = grouped.find(key);
      const auto values = it == grouped.end() ? std::vector<double>{} : score_values(it->second);
      const auto counts = fna_histogram(values, bins);
      for (int b = 0; b < bins; ++b) {
        os << static_cast<double>(b) / bins << '\t' << static_cast<double>(b + 1) / bins << '\t'
           << counts[static_cast<std::size_t>(b)] << '\t' << key << '\n';
      }
    }
  };
  write("fna_hist.tsv", {"all"});
  write("fna_hist_by_engagement_class.tsv", {"early", "late"});
  write("fna_hist_by_user_class.tsv", {"early_user", "late_user"});
  write("fna_hist_joint.tsv", {"EE", "EL", "LE", "LL"});
}

}  // namespace fnd
