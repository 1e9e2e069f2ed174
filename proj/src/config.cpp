#include "selfish/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace selfish {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

}  // namespace

FlatConfig FlatConfig::parse_text(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": bad key '" + key + "'");
    if (cfg.entries_.count(key))
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    cfg.entries_[key] = value;
  }
  return cfg;
}

FlatConfig FlatConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

void FlatConfig::apply_env_overrides() {
  static constexpr char kPrefix[] = "SELFISH_";
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind(kPrefix, 0) != 0) continue;
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(sizeof(kPrefix) - 1, eq - (sizeof(kPrefix) - 1));
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!valid_key(key)) continue;
    entries_[key] = entry.substr(eq + 1);
  }
}

void FlatConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw std::invalid_argument("bad config key: " + key);
  entries_[key] = value;
}

bool FlatConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  return it == entries_.end() ? def : it->second;
}

double FlatConfig::get_double(const std::string& key, double def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  size_t pos = 0;
  double v;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: " +
                                it->second);
  }
  if (pos != it->second.size())
    throw std::invalid_argument("config key '" + key + "': trailing junk: " +
                                it->second);
  return v;
}

long FlatConfig::get_long(const std::string& key, long def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  size_t pos = 0;
  long v;
  try {
    v = std::stol(it->second, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not an integer: " +
                                it->second);
  }
  if (pos != it->second.size())
    throw std::invalid_argument("config key '" + key + "': trailing junk: " +
                                it->second);
  return v;
}

std::uint64_t FlatConfig::get_u64(const std::string& key, std::uint64_t def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  size_t pos = 0;
  unsigned long long v;
  try {
    v = std::stoull(it->second, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not an unsigned integer: " + it->second);
  }
  if (pos != it->second.size())
    throw std::invalid_argument("config key '" + key + "': trailing junk: " +
                                it->second);
  return v;
}

bool FlatConfig::get_bool(const std::string& key, bool def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: " + v);
}

std::vector<std::uint64_t> FlatConfig::get_u64_list(
    const std::string& key, std::vector<std::uint64_t> def) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  std::vector<std::uint64_t> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config key '" + key + "': empty list item");
    size_t pos = 0;
    out.push_back(std::stoull(item, &pos));
    if (pos != item.size())
      throw std::invalid_argument("config key '" + key + "': bad list item: " + item);
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

void FlatConfig::require_all_consumed() const {
  std::string unknown;
  for (const auto& [k, v] : entries_) {
    if (consumed_.count(k)) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += k;
  }
  if (!unknown.empty())
    throw std::invalid_argument("unknown config keys: " + unknown);
}

std::string FlatConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {  // std::map: already sorted
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t FlatConfig::hash() const { return fnv1a64(canonical_text()); }

RunConfig load_run_config(const FlatConfig& cfg) {
  RunConfig rc;
  WorldConfig& w = rc.world;
  w.edge_length = cfg.get_double("edge_length", w.edge_length);
  w.agent_radius = cfg.get_double("agent_radius", w.agent_radius);
  w.catch_distance = cfg.get_double("catch_distance", 2.0 * w.agent_radius);
  w.num_agents = static_cast<int>(cfg.get_long("num_agents", w.num_agents));
  w.agent_speed = cfg.get_double("agent_speed", w.agent_speed);
  w.predator_speed = cfg.get_double("predator_speed", w.predator_speed);
  w.predator_max_turn_deg =
      cfg.get_double("predator_max_turn_deg", w.predator_max_turn_deg);
  w.distraction_radius = cfg.get_double("distraction_radius", w.distraction_radius);
  w.lock_duration = static_cast<int>(cfg.get_long("lock_duration", w.lock_duration));
  w.leap_speed_factor = cfg.get_double("leap_speed_factor", w.leap_speed_factor);
  w.leap_duration = static_cast<int>(cfg.get_long("leap_duration", w.leap_duration));
  w.leap_cooldown = static_cast<int>(cfg.get_long("leap_cooldown", w.leap_cooldown));
  w.max_episode_steps = cfg.get_long("max_episode_steps", w.max_episode_steps);
  w.rng_seed = cfg.get_u64("rng_seed", w.rng_seed);
  w.pinned_predator = cfg.get_bool("pinned_predator", w.pinned_predator);
  w.prey_max_turn_deg = cfg.get_double("prey_max_turn_deg", w.prey_max_turn_deg);

  rc.policy = cfg.get_string("policy", rc.policy);
  if (rc.policy != "turnaway" && rc.policy != "boids" && rc.policy != "random" &&
      rc.policy != "dqn" && rc.policy != "ddpg")
    throw std::invalid_argument("policy must be one of turnaway|boids|random|dqn|ddpg");
  rc.model_path = cfg.get_string("model", rc.model_path);

  BoidsWeights& b = rc.boids;
  b.w_align = cfg.get_double("boids_w_align", b.w_align);
  b.w_cohere = cfg.get_double("boids_w_cohere", b.w_cohere);
  b.w_separate = cfg.get_double("boids_w_separate", b.w_separate);
  b.w_avoid = cfg.get_double("boids_w_avoid", b.w_avoid);
  b.neighbor_radius = cfg.get_double("boids_neighbor_radius", b.neighbor_radius);
  b.separation_radius = cfg.get_double("boids_separation_radius", b.separation_radius);

  rc.algo = cfg.get_string("algo", rc.algo);
  if (rc.algo != "dqn" && rc.algo != "ddpg")
    throw std::invalid_argument("algo must be dqn or ddpg");

  DqnConfig& q = rc.dqn;
  q.training_steps = cfg.get_long("dqn_training_steps", q.training_steps);
  q.gamma = cfg.get_double("dqn_gamma", q.gamma);
  q.learning_rate = cfg.get_double("dqn_learning_rate", q.learning_rate);
  q.buffer_size = static_cast<std::size_t>(
      cfg.get_u64("dqn_buffer_size", q.buffer_size));
  q.batch_size = static_cast<int>(cfg.get_long("dqn_batch_size", q.batch_size));
  q.epsilon = cfg.get_double("dqn_epsilon", q.epsilon);
  q.observable_neighbors =
      static_cast<int>(cfg.get_long("dqn_observable_neighbors", q.observable_neighbors));
  q.hidden_layers = static_cast<int>(cfg.get_long("dqn_hidden_layers", q.hidden_layers));
  q.hidden_width = static_cast<int>(cfg.get_long("dqn_hidden_width", q.hidden_width));
  q.warmup_steps = cfg.get_long("dqn_warmup_steps", q.warmup_steps);
  q.target_update_interval =
      cfg.get_long("dqn_target_update_interval", q.target_update_interval);
  q.checkpoint_interval_episodes = cfg.get_long("dqn_checkpoint_interval_episodes",
                                                q.checkpoint_interval_episodes);

  DdpgConfig& d = rc.ddpg;
  d.training_steps = cfg.get_long("ddpg_training_steps", d.training_steps);
  d.gamma = cfg.get_double("ddpg_gamma", d.gamma);
  d.learning_rate = cfg.get_double("ddpg_learning_rate", d.learning_rate);
  d.buffer_size = static_cast<std::size_t>(
      cfg.get_u64("ddpg_buffer_size", d.buffer_size));
  d.batch_size = static_cast<int>(cfg.get_long("ddpg_batch_size", d.batch_size));
  d.ou_theta = cfg.get_double("ddpg_ou_theta", d.ou_theta);
  d.ou_mu = cfg.get_double("ddpg_ou_mu", d.ou_mu);
  d.ou_sigma = cfg.get_double("ddpg_ou_sigma", d.ou_sigma);
  d.observable_neighbors = static_cast<int>(
      cfg.get_long("ddpg_observable_neighbors", d.observable_neighbors));
  d.actor_hidden_layers =
      static_cast<int>(cfg.get_long("ddpg_actor_hidden_layers", d.actor_hidden_layers));
  d.actor_hidden_width =
      static_cast<int>(cfg.get_long("ddpg_actor_hidden_width", d.actor_hidden_width));
  d.critic_hidden_layers = static_cast<int>(
      cfg.get_long("ddpg_critic_hidden_layers", d.critic_hidden_layers));
  d.critic_hidden_width = static_cast<int>(
      cfg.get_long("ddpg_critic_hidden_width", d.critic_hidden_width));
  d.tau = cfg.get_double("ddpg_tau", d.tau);
  d.warmup_steps = cfg.get_long("ddpg_warmup_steps", d.warmup_steps);
  d.noise_scale_deg = cfg.get_double("ddpg_noise_scale_deg", d.noise_scale_deg);
  d.checkpoint_interval_episodes = cfg.get_long("ddpg_checkpoint_interval_episodes",
                                                d.checkpoint_interval_episodes);

  rc.episodes = cfg.get_long("episodes", rc.episodes);
  if (rc.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  rc.seeds = cfg.get_u64_list("seeds", rc.seeds);
  rc.dbscan_eps = cfg.get_double("dbscan_eps", rc.dbscan_eps);
  rc.dbscan_min_pts = static_cast<int>(cfg.get_long("dbscan_min_pts", rc.dbscan_min_pts));
  rc.kde_bandwidth = cfg.get_double("kde_bandwidth", rc.kde_bandwidth);
  rc.analyze_frame_stride =
      static_cast<int>(cfg.get_long("analyze_frame_stride", rc.analyze_frame_stride));
  if (rc.dbscan_eps <= 0.0) throw std::invalid_argument("dbscan_eps must be > 0");
  if (rc.dbscan_min_pts < 1) throw std::invalid_argument("dbscan_min_pts must be >= 1");
  if (rc.kde_bandwidth <= 0.0) throw std::invalid_argument("kde_bandwidth must be > 0");
  if (rc.analyze_frame_stride < 1)
    throw std::invalid_argument("analyze_frame_stride must be >= 1");

  cfg.require_all_consumed();
  w.validate();
  rc.dqn.validate();
  rc.ddpg.validate();
  return rc;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

FlatConfig to_flat_config(const RunConfig& rc) {
  FlatConfig cfg;
  const WorldConfig& w = rc.world;
  cfg.set("edge_length", fmt_double(w.edge_length));
  cfg.set("agent_radius", fmt_double(w.agent_radius));
  cfg.set("catch_distance", fmt_double(w.catch_distance));
  cfg.set("num_agents", std::to_string(w.num_agents));
  cfg.set("agent_speed", fmt_double(w.agent_speed));
  cfg.set("predator_speed", fmt_double(w.predator_speed));
  cfg.set("predator_max_turn_deg", fmt_double(w.predator_max_turn_deg));
  cfg.set("distraction_radius", fmt_double(w.distraction_radius));
  cfg.set("lock_duration", std::to_string(w.lock_duration));
  cfg.set("leap_speed_factor", fmt_double(w.leap_speed_factor));
  cfg.set("leap_duration", std::to_string(w.leap_duration));
  cfg.set("leap_cooldown", std::to_string(w.leap_cooldown));
  cfg.set("max_episode_steps", std::to_string(w.max_episode_steps));
  cfg.set("rng_seed", std::to_string(w.rng_seed));
  cfg.set("pinned_predator", w.pinned_predator ? "true" : "false");
  cfg.set("prey_max_turn_deg", fmt_double(w.prey_max_turn_deg));

  cfg.set("policy", rc.policy);
  if (!rc.model_path.empty()) cfg.set("model", rc.model_path);
  cfg.set("boids_w_align", fmt_double(rc.boids.w_align));
  cfg.set("boids_w_cohere", fmt_double(rc.boids.w_cohere));
  cfg.set("boids_w_separate", fmt_double(rc.boids.w_separate));
  cfg.set("boids_w_avoid", fmt_double(rc.boids.w_avoid));
  cfg.set("boids_neighbor_radius", fmt_double(rc.boids.neighbor_radius));
  cfg.set("boids_separation_radius", fmt_double(rc.boids.separation_radius));

  cfg.set("algo", rc.algo);
  const DqnConfig& q = rc.dqn;
  cfg.set("dqn_training_steps", std::to_string(q.training_steps));
  cfg.set("dqn_gamma", fmt_double(q.gamma));
  cfg.set("dqn_learning_rate", fmt_double(q.learning_rate));
  cfg.set("dqn_buffer_size", std::to_string(q.buffer_size));
  cfg.set("dqn_batch_size", std::to_string(q.batch_size));
  cfg.set("dqn_epsilon", fmt_double(q.epsilon));
  cfg.set("dqn_observable_neighbors", std::to_string(q.observable_neighbors));
  cfg.set("dqn_hidden_layers", std::to_string(q.hidden_layers));
  cfg.set("dqn_hidden_width", std::to_string(q.hidden_width));
  cfg.set("dqn_warmup_steps", std::to_string(q.warmup_steps));
  cfg.set("dqn_target_update_interval", std::to_string(q.target_update_interval));
  cfg.set("dqn_checkpoint_interval_episodes",
          std::to_string(q.checkpoint_interval_episodes));

  const DdpgConfig& d = rc.ddpg;
  cfg.set("ddpg_training_steps", std::to_string(d.training_steps));
  cfg.set("ddpg_gamma", fmt_double(d.gamma));
  cfg.set("ddpg_learning_rate", fmt_double(d.learning_rate));
  cfg.set("ddpg_buffer_size", std::to_string(d.buffer_size));
  cfg.set("ddpg_batch_size", std::to_string(d.batch_size));
  cfg.set("ddpg_ou_theta", fmt_double(d.ou_theta));
  cfg.set("ddpg_ou_mu", fmt_double(d.ou_mu));
  cfg.set("ddpg_ou_sigma", fmt_double(d.ou_sigma));
  cfg.set("ddpg_observable_neighbors", std::to_string(d.observable_neighbors));
  cfg.set("ddpg_actor_hidden_layers", std::to_string(d.actor_hidden_layers));
  cfg.set("ddpg_actor_hidden_width", std::to_string(d.actor_hidden_width));
  cfg.set("ddpg_critic_hidden_layers", std::to_string(d.critic_hidden_layers));
  cfg.set("ddpg_critic_hidden_width", std::to_string(d.critic_hidden_width));
  cfg.set("ddpg_tau", fmt_double(d.tau));
  cfg.set("ddpg_warmup_steps", std::to_string(d.warmup_steps));
  cfg.set("ddpg_noise_scale_deg", fmt_double(d.noise_scale_deg));
  cfg.set("ddpg_checkpoint_interval_episodes",
          std::to_string(d.checkpoint_interval_episodes));

  cfg.set("episodes", std::to_string(rc.episodes));
  std::string seeds;
  for (std::uint64_t s : rc.seeds) {
    if (!seeds.empty()) seeds += ',';
    seeds += std::to_string(s);
  }
  cfg.set("seeds", seeds);
  cfg.set("dbscan_eps", fmt_double(rc.dbscan_eps));
  cfg.set("dbscan_min_pts", std::to_string(rc.dbscan_min_pts));
  cfg.set("kde_bandwidth", fmt_double(rc.kde_bandwidth));
  cfg.set("analyze_frame_stride", std::to_string(rc.analyze_frame_stride));
  return cfg;
}

}  // namespace selfish
