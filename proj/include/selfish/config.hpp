#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selfish/ddpg.hpp"
#include "selfish/dqn.hpp"
#include "selfish/policies.hpp"
#include "selfish/world.hpp"

namespace selfish {

// Flat key=value configuration text. One `key = value` pair per line, '#'
// starts a comment, blank lines are ignored. Keys are [a-z0-9_]. Environment
// variables with the SELFISH_ prefix override file values (SELFISH_NUM_AGENTS
// overrides num_agents). Typed getters record which keys were consumed so a
// loader can reject unknown keys (typo protection for sweeps).
class FlatConfig {
 public:
  FlatConfig() = default;

  static FlatConfig parse_text(const std::string& text);
  static FlatConfig load(const std::string& path);

  // Merge SELFISH_* environment variables over the current entries.
  void apply_env_overrides();

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Getters throw std::invalid_argument on malformed values. Each call marks
  // the key consumed.
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long get_long(const std::string& key, long def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                          std::vector<std::uint64_t> def) const;

  // Throws listing every entry no getter ever touched.
  void require_all_consumed() const;

  // Sorted `key=value` lines; the canonical form hashed below.
  std::string canonical_text() const;

  // FNV-1a 64-bit over canonical_text().
  std::uint64_t hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
};

std::uint64_t fnv1a64(const std::string& text);

// Everything a run needs, decoded from one FlatConfig.
struct RunConfig {
  WorldConfig world;
  std::string policy = "turnaway";  // turnaway|boids|random|dqn|ddpg
  std::string model_path;           // required when policy is dqn/ddpg at eval
  BoidsWeights boids;
  std::string algo = "dqn";  // training algorithm: dqn|ddpg
  DqnConfig dqn;
  DdpgConfig ddpg;
  long episodes = 20;
  std::vector<std::uint64_t> seeds = {1};
  double dbscan_eps = 4.0;  // 0.1 * default edge length
  int dbscan_min_pts = 3;
  double kde_bandwidth = 2.0;
  int analyze_frame_stride = 1;
};

// Decodes and validates; rejects unknown keys. The FlatConfig is consumed
// (its keys marked) so callers can hash it afterwards.
RunConfig load_run_config(const FlatConfig& cfg);

// The full key set written back out (best-config files, provenance).
FlatConfig to_flat_config(const RunConfig& rc);

}  // namespace selfish
