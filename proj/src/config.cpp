#include "fnd/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fnd {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view raw) {
  const std::string s = trim(raw);
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ConfigError("config: bad value '" + s + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: bad boolean '" + s + "' for " + std::string(key));
}

std::vector<std::string> split_list(std::string_view raw) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is{std::string(raw)};
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string_view to_string(LossVariant v) {
  switch (v) {
    case LossVariant::rank: return "rank";
    case LossVariant::none: return "none";
    case LossVariant::bc: return "bc";
  }
  return "?";
}

LossVariant parse_loss_variant(std::string_view name) {
  if (name == "rank") return LossVariant::rank;
  if (name == "none") return LossVariant::none;
  if (name == "bc") return LossVariant::bc;
  throw ConfigError("unknown loss variant '" + std::string(name) + "'");
}

void TrainConfig::check() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (k < 1) throw ConfigError("train.k must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("train.alpha must be >= 0");
  if (!(margin >= 0.0)) throw ConfigError("train.margin must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (estimator_hidden < 1 || classifier_hidden < 1) throw ConfigError("hidden sizes must be >= 1");
  try {
    earliness.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

TrainConfig politifact_defaults() {
  TrainConfig c;
  c.earliness.deadline_seconds = 48 * 3600;
  c.earliness.user_threshold = 0.3;
  c.earliness.min_engagements = 3;
  c.alpha = 0.1;
  c.k = 1000;
  c.margin = 0.1;
  c.epochs = 1000;
  c.lr = 1e-3;
  return c;
}

TrainConfig gossipcop_defaults() {
  TrainConfig c = politifact_defaults();
  c.earliness.deadline_seconds = 12 * 3600;
  c.earliness.user_threshold = 0.7;
  c.alpha = 0.3;
  c.k = 10000;
  c.margin = 0.0;
  return c;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  TrainConfig& t = cfg.train;
  if (key == "run.preset") {
    const auto seed = t.seed;
    if (value == "politifact") {
      t = politifact_defaults();
    } else if (value == "gossipcop") {
      t = gossipcop_defaults();
    } else {
      throw ConfigError("unknown preset '" + value + "'");
    }
    t.seed = seed;
  } else if (key == "split.fractions") {
    auto parts = split_list(value);
    if (parts.size() != 3) throw ConfigError("split.fractions needs three comma-separated values");
    cfg.fractions = {parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1]),
                     parse_number<double>(key, parts[2])};
  } else if (key == "split.cuts") {
    if (value.empty()) {
      cfg.cuts.reset();
      return;
    }
    auto parts = split_list(value);
    if (parts.size() != 3) throw ConfigError("split.cuts needs three comma-separated timestamps");
    cfg.cuts = std::array<Timestamp, 3>{parse_number<Timestamp>(key, parts[0]), parse_number<Timestamp>(key, parts[1]),
                                        parse_number<Timestamp>(key, parts[2])};
  } else if (key == "earliness.deadline_seconds") {
    t.earliness.deadline_seconds = parse_number<Timestamp>(key, value);
  } else if (key == "earliness.deadline_hours") {
    t.earliness.deadline_seconds = static_cast<Timestamp>(parse_number<double>(key, value) * 3600.0);
  } else if (key == "earliness.user_threshold") {
    t.earliness.user_threshold = parse_number<double>(key, value);
  } else if (key == "earliness.min_engagements") {
    t.earliness.min_engagements = parse_number<int>(key, value);
  } else if (key == "train.epochs") {
    t.epochs = parse_number<int>(key, value);
  } else if (key == "train.lr") {
    t.lr = parse_number<double>(key, value);
  } else if (key == "train.alpha") {
    t.alpha = parse_number<double>(key, value);
  } else if (key == "train.k") {
    t.k = parse_number<int>(key, value);
  } else if (key == "train.margin") {
    t.margin = parse_number<double>(key, value);
  } else if (key == "train.seed") {
    t.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "train.feature_variant") {
    try {
      t.feature_variant = parse_feature_variant(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "train.loss_variant") {
    t.loss_variant = parse_loss_variant(value);
  } else if (key == "train.normalization_reuse") {
    t.normalization_reuse = parse_bool(key, value);
  } else if (key == "train.reweight") {
    t.reweight = parse_bool(key, value);
  } else if (key == "train.ce_reduction") {
    if (value == "sum") {
      t.ce_reduction = nn::Reduction::sum;
    } else if (value == "mean") {
      t.ce_reduction = nn::Reduction::mean;
    } else {
      throw ConfigError("train.ce_reduction must be sum or mean");
    }
  } else if (key == "train.estimator_hidden") {
    t.estimator_hidden = parse_number<int>(key, value);
  } else if (key == "train.classifier_hidden") {
    t.classifier_hidden = parse_number<int>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, node] : tree) {
    if (section == "manifest") continue;
    if (node.empty()) {
      entries.emplace_back("run." + section, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) entries.emplace_back(section + "." + key, leaf.data());
  }
  RunConfig cfg;
  for (const auto& [key, value] : entries) {
    if (key == "run.preset") set_config_value(cfg, key, value);
  }
  for (const auto& [key, value] : entries) {
    if (key != "run.preset") set_config_value(cfg, key, value);
  }
  cfg.train.check();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  std::ostringstream os;
  os << "[split]\n";
  os << "fractions = " << fmt(cfg.fractions.train) << ',' << fmt(cfg.fractions.val) << ',' << fmt(cfg.fractions.test) << '\n';
  if (cfg.cuts) os << "cuts = " << (*cfg.cuts)[0] << ',' << (*cfg.cuts)[1] << ',' << (*cfg.cuts)[2] << '\n';
  os << "\n[earliness]\n";
  os << "deadline_seconds = " << t.earliness.deadline_seconds << '\n';
  os << "user_threshold = " << fmt(t.earliness.user_threshold) << '\n';
  os << "min_engagements = " << t.earliness.min_engagements << '\n';
  os << "\n[train]\n";
  os << "epochs = " << t.epochs << '\n';
  os << "lr = " << fmt(t.lr) << '\n';
  os << "alpha = " << fmt(t.alpha) << '\n';
  os << "k = " << t.k << '\n';
  os << "margin = " << fmt(t.margin) << '\n';
  os << "seed = " << t.seed << '\n';
  os << "feature_variant = " << to_string(t.feature_variant) << '\n';
  os << "loss_variant = " << to_string(t.loss_variant) << '\n';
  os << "normalization_reuse = " << (t.normalization_reuse ? "true" : "false") << '\n';
  os << "reweight = " << (t.reweight ? "true" : "false") << '\n';
  os << "ce_reduction = " << (t.ce_reduction == nn::Reduction::sum ? "sum" : "mean") << '\n';
  os << "estimator_hidden = " << t.estimator_hidden << '\n';
  os << "classifier_hidden = " << t.classifier_hidden << '\n';
  return os.str();
}

}  // namespace fnd
