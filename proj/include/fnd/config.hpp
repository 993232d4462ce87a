#ifndef FND_CONFIG_HPP
#define FND_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fnd/data_model.hpp"
#include "fnd/edge_features.hpp"
#include "fnd/neural.hpp"
#include "fnd/temporal_split.hpp"

namespace fnd {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class LossVariant { rank, none, bc };

std::string_view to_string(LossVariant v);
LossVariant parse_loss_variant(std::string_view name);

struct TrainConfig {
  int epochs = 1000;
  double lr = 1e-3;
  /// Weight of the edge loss next to the classification loss.
  double alpha = 0.1;
  /// Clean and noisy edges sampled per epoch, each.
  int k = 1000;
  double margin = 0.1;
  std::uint64_t seed = 0;
  FeatureVariant feature_variant = FeatureVariant::joint;
  LossVariant loss_variant = LossVariant::rank;
  EarlinessConfig earliness;
  /// Normalize val/test edge features with the training column maxima.
  bool normalization_reuse = false;
  /// false trains a plain GCN on the raw co-engagement counts.
  bool reweight = true;
  nn::Reduction ce_reduction = nn::Reduction::sum;
  int estimator_hidden = 16;
  int classifier_hidden = 64;

  /// Throws ConfigError.
  void check() const;
};

/// Settings tuned for PolitiFact: deadline 48h, user threshold 0.3,
/// alpha 0.1, K 1000, margin 0.1.
TrainConfig politifact_defaults();
/// Settings tuned for GossipCop: deadline 12h, user threshold 0.7,
/// alpha 0.3, K 10000, margin 0.0.
TrainConfig gossipcop_defaults();

struct RunConfig {
  SplitFractions fractions;
  /// Explicit cuts replace the fractions when set.
  std::optional<std::array<Timestamp, 3>> cuts;
  TrainConfig train;
};

/// Applies one `section.key = value` setting. `run.preset` resets the
/// training block to a named preset. Throws ConfigError on unknown keys or
/// unparsable values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` file with [split], [earliness], [train] and [run]
/// sections. A `preset` in [run] is applied before the other keys. A
/// [manifest] section is ignored.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view text);

/// Serializes every field in the format read by parse_config.
std::string to_config_text(const RunConfig& cfg);

}  // namespace fnd

#endif  // FND_CONFIG_HPP
