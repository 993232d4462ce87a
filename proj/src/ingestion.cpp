#include "fnd/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "fnd/random.hpp"

namespace fnd {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw IngestError(path.string() + ": cannot open");
  }
  bool next(std::string_view& line) {
    while (std::getline(in_, buf_)) {
      ++lineno_;
      line = chomp(buf_);
      if (!line.empty()) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw IngestError(path_.string() + ":" + std::to_string(lineno_) + ": " + msg);
  }
  std::size_t lineno() const { return lineno_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string buf_;
  std::size_t lineno_ = 0;
};

// An empty file reads as a header with every required column and no rows.
std::unordered_map<std::string, std::size_t> header_columns(LineReader& reader,
                                                            std::initializer_list<const char*> required) {
  std::unordered_map<std::string, std::size_t> cols;
  std::string_view line;
  if (!reader.next(line)) {
    std::size_t i = 0;
    for (const char* name : required) cols.emplace(name, i++);
    return cols;
  }
  auto fields = split(line, '\t');
  for (std::size_t i = 0; i < fields.size(); ++i) cols.emplace(std::string(fields[i]), i);
  for (const char* name : required) {
    if (!cols.contains(name)) reader.fail(std::string("header lacks column '") + name + "'");
  }
  return cols;
}

void write_real(std::ostream& os, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, end - buf);
}

void write_articles(const Dataset& d, std::ostream& os) {
  os << "id\tpublish_time\tlabel\n";
  for (const auto& a : d.articles) {
    os << a.id << '\t' << a.publish_time << '\t';
    if (a.label) os << static_cast<int>(*a.label);
    os << '\n';
  }
}

void write_engagements(const Dataset& d, std::ostream& os) {
  os << "user_id\tarticle_id\ttime\n";
  for (const auto& e : d.engagements) os << e.user << '\t' << e.article << '\t' << e.time << '\n';
}

void write_features(const Dataset& d, std::ostream& os) {
  for (const auto& a : d.articles) {
    os << a.id;
    for (Eigen::Index k = 0; k < a.features.size(); ++k) {
      os << ' ';
      write_real(os, a.features[k]);
    }
    os << '\n';
  }
}

}  // namespace

Timestamp parse_timestamp(std::string_view field) {
  Timestamp t = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
  if (ec == std::errc() && ptr == field.data() + field.size()) return t;
  double v = 0;
  auto [p2, ec2] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec2 != std::errc() || p2 != field.data() + field.size() || !std::isfinite(v)) return kInvalidTime;
  if (std::abs(v) > 9.0e18) return kInvalidTime;
  return static_cast<Timestamp>(std::trunc(v));
}

Dataset load_dataset(const std::filesystem::path& articles_path,
                     const std::filesystem::path& engagements_path,
                     const std::filesystem::path& features_path) {
  Dataset d;
  std::unordered_map<std::string, std::size_t> article_row;

  {
    LineReader reader(articles_path);
    auto cols = header_columns(reader, {"id", "publish_time", "label"});
    const std::size_t c_id = cols["id"], c_time = cols["publish_time"], c_label = cols["label"];
    const std::size_t width = std::max({c_id, c_time, c_label}) + 1;
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, '\t');
      if (f.size() < width) reader.fail("expected at least " + std::to_string(width) + " fields");
      Article a;
      a.id = std::string(f[c_id]);
      if (a.id.empty()) reader.fail("empty article id");
      a.publish_time = parse_timestamp(f[c_time]);
      if (a.publish_time == kInvalidTime) reader.fail("bad publish_time '" + std::string(f[c_time]) + "'");
      if (f[c_label] == "0") {
        a.label = Veracity::real;
      } else if (f[c_label] == "1") {
        a.label = Veracity::fake;
      } else if (!f[c_label].empty()) {
        reader.fail("label must be 0, 1 or empty, got '" + std::string(f[c_label]) + "'");
      }
      if (!article_row.emplace(a.id, d.articles.size()).second) reader.fail("duplicate article id '" + a.id + "'");
      d.articles.push_back(std::move(a));
    }
  }

  {
    LineReader reader(engagements_path);
    auto cols = header_columns(reader, {"user_id", "article_id", "time"});
    const std::size_t c_user = cols["user_id"], c_article = cols["article_id"], c_time = cols["time"];
    const std::size_t width = std::max({c_user, c_article, c_time}) + 1;
    std::string_view line;
    while (reader.next(line)) {
      auto f = split(line, '\t');
      if (f.size() < width) reader.fail("expected at least " + std::to_string(width) + " fields");
      Engagement e{std::string(f[c_user]), std::string(f[c_article]), parse_timestamp(f[c_time])};
      if (e.time == kInvalidTime) reader.fail("bad time '" + std::string(f[c_time]) + "'");
      if (!article_row.contains(e.article)) {
        reader.fail("engagement references unknown article '" + e.article + "'");
      }
      d.engagements.push_back(std::move(e));
    }
  }

  {
    LineReader reader(features_path);
    std::vector<bool> has(d.articles.size(), false);
    bool first = true;
    std::string_view line;
    while (reader.next(line)) {
      auto f = split_ws(line);
      if (f.empty()) continue;
      const std::size_t dim = f.size() - 1;
      if (first) {
        d.feature_dim = dim;
        first = false;
      } else if (dim != d.feature_dim) {
        reader.fail("feature dimension " + std::to_string(dim) + " differs from " + std::to_string(d.feature_dim));
      }
      auto it = article_row.find(std::string(f[0]));
      if (it == article_row.end()) reader.fail("features for unknown article '" + std::string(f[0]) + "'");
      if (has[it->second]) reader.fail("duplicate features for article '" + std::string(f[0]) + "'");
      Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
      for (std::size_t k = 0; k < dim; ++k) {
        auto s = f[k + 1];
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) reader.fail("bad real '" + std::string(s) + "'");
        x[static_cast<Eigen::Index>(k)] = v;
      }
      d.articles[it->second].features = std::move(x);
      has[it->second] = true;
    }
    for (std::size_t i = 0; i < has.size(); ++i) {
      if (!has[i]) {
        throw IngestError(features_path.string() + ": no features for article '" + d.articles[i].id + "'");
      }
    }
  }

  std::stable_sort(d.articles.begin(), d.articles.end(), [](const Article& a, const Article& b) {
    return a.publish_time != b.publish_time ? a.publish_time < b.publish_time : a.id < b.id;
  });

  if (auto report = validate_dataset(d); !report.valid()) {
    throw IngestError("dataset failed validation: " + report.summary());
  }
  return d;
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
  return load_dataset(dir / kArticlesFile, dir / kEngagementsFile, dir / kFeaturesFile);
}

void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open(kArticlesFile);
    write_articles(d, os);
  }
  {
    auto os = open(kEngagementsFile);
    write_engagements(d, os);
  }
  {
    auto os = open(kFeaturesFile);
    write_features(d, os);
  }
}

std::string fingerprint(const Dataset& d) {
  std::ostringstream os;
  write_articles(d, os);
  write_engagements(d, os);
  write_features(d, os);
  std::uint64_t h = fnv1a64(os.str());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fnd
