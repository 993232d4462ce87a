#ifndef FND_TEMPORAL_SPLIT_HPP
#define FND_TEMPORAL_SPLIT_HPP

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "fnd/data_model.hpp"

namespace fnd {

enum class Band : int { train = 0, val = 1, test = 2 };

inline constexpr std::array<Band, 3> kBands{Band::train, Band::val, Band::test};

std::string_view to_string(Band band);

/// One band of a split. All index lists refer to the Corpus and are sorted
/// ascending.
struct BandSet {
  Timestamp cut = 0;
  /// Articles published inside this band.
  std::vector<int> articles;
  /// Engagements with time <= cut, on any article.
  std::vector<int> engagements;
  /// Users with at least `min_engagements` engagements in `engagements`.
  std::vector<int> users;
};

struct TemporalSplit {
  std::array<BandSet, 3> bands;
  int min_engagements = 3;

  const BandSet& operator[](Band b) const { return bands[static_cast<std::size_t>(b)]; }
  BandSet& operator[](Band b) { return bands[static_cast<std::size_t>(b)]; }
};

struct SplitFractions {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

/// ceil(train * |P|) earliest articles (ties by id) go to train, the next
/// ceil(val * |P|) to val, the rest to test. Cut times are the publish times
/// of each band's last article, except the test cut which also covers the
/// latest engagement. Throws std::invalid_argument if a band would be empty.
TemporalSplit split_by_fraction(const Corpus& corpus, SplitFractions fractions, int min_engagements);

/// Band membership by explicit cuts: train = (-inf, t_train], val =
/// (t_train, t_val], test = (t_val, t_test]. Throws std::invalid_argument on
/// unordered cuts, an empty training band or a training band without labels.
TemporalSplit split_by_timestamps(const Corpus& corpus, Timestamp t_train, Timestamp t_val, Timestamp t_test,
                                  int min_engagements);

/// Temporality-ignorant compatibility mode: articles are shuffled into bands
/// with the given fractions and every band sees the full engagement log.
/// Only meant for comparison runs.
TemporalSplit split_random(const Corpus& corpus, SplitFractions fractions, int min_engagements,
                           std::uint64_t seed);

/// Users with at least `min_engagements` of the listed engagements.
std::vector<int> active_users(const Corpus& corpus, const std::vector<int>& engagements, int min_engagements);

}  // namespace fnd

#endif  // FND_TEMPORAL_SPLIT_HPP
