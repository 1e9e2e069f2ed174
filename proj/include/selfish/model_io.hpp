#pragma once

#include <cstdint>
#include <string>

#include "selfish/mlp.hpp"

namespace selfish {

// Binary model file, all integers and double bit patterns little-endian:
//
//   bytes 0-3   magic "SFSH"
//   u32         format version (1)
//   u32         algo tag length, then that many bytes ("dqn", "ddpg_actor")
//   u32         observation neighbor count n
//   u64         training seed
//   u64         config hash (FNV-1a of the canonical config text)
//   u32         layer-size count, then u32 sizes (input, hidden..., output)
//   u64         parameter count, then raw f64 bits: per layer the row-major
//               out-by-in weight matrix, then the bias vector
//   u32         config snapshot length, then that many bytes of canonical
//               config text
//
// Round trips are bit-exact. Loading fails loudly on bad magic, unknown
// version, or any count that disagrees with the declared layer sizes.
struct ModelFile {
  std::uint32_t version = 1;
  std::string algo;  // "dqn" or "ddpg_actor"
  int observation_neighbors = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  MlpParams params;
  std::string config_snapshot;
};

void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

}  // namespace selfish
