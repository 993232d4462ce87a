#ifndef FND_CHECKPOINT_HPP
#define FND_CHECKPOINT_HPP

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "fnd/neural.hpp"

namespace fnd {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters, Adam state and free-form metadata (keys and values without
/// whitespace or newlines).
struct Checkpoint {
  std::map<std::string, std::string> meta;
  nn::ModelParams<double> params;
};

/// Text format, version 1. Reals are written as hex floats so a load/save
/// cycle reproduces every bit.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fnd

#endif  // FND_CHECKPOINT_HPP
