#include "hapsim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

extern char** environ;

namespace hapsim {
namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(std::stod(item.substr(b, e - b + 1)));
  }
  return out;
}

struct Reader {
  const pt::ptree& tree;

  template <typename T>
  void get(const char* key, T& field) const {
    if (auto v = tree.get_optional<T>(key)) field = *v;
  }
  void get_list(const char* key, std::vector<double>& field, double scale = 1.0) const {
    if (auto v = tree.get_optional<std::string>(key)) {
      field = parse_list(*v);
      for (auto& x : field) x *= scale;
    }
  }
  void get_scaled(const char* key, double& field, double scale) const {
    if (auto v = tree.get_optional<double>(key)) field = *v * scale;
  }
};

void apply_tree(const pt::ptree& tree, ScenarioConfig& cfg) {
  Reader r{tree};
  r.get("road.length_m", cfg.road_length_m);
  r.get_list("rsu.positions_m", cfg.rsu_positions_m);
  r.get("rsu.range_m", cfg.rsu_range_m);
  r.get("haps.altitude_m", cfg.haps_altitude_m);
  r.get("haps.horizontal_m", cfg.haps_horizontal_m);
  r.get("cav.count", cfg.num_cavs);
  r.get("cav.speed_mps", cfg.cav_speed_mps);
  r.get("slot.duration_s", cfg.slot_duration_s);
  r.get("slot.episode_slots", cfg.episode_slots);
  r.get("library.num_contents", cfg.num_contents);
  r.get_list("library.content_sizes_mbits", cfg.content_size_choices_bits, 1e6);
  r.get("library.zipf_exponent", cfg.zipf_exponent);
  r.get_list("tasks.input_kbits", cfg.task_input_bits_choices, 1e3);
  r.get_list("tasks.density_cycles_per_bit", cfg.task_density_choices);
  r.get_list("tasks.output_kbits", cfg.task_output_bits_choices, 1e3);
  r.get_scaled("compute.f_cav_gcps", cfg.f_cav_cps, 1e9);
  r.get_scaled("compute.f_rsu_gcps", cfg.f_rsu_cps, 1e9);
  r.get_scaled("compute.f_haps_gcps", cfg.f_haps_cps, 1e9);
  r.get_scaled("compute.cache_capacity_mbits", cfg.cache_capacity_bits, 1e6);
  r.get("radio.tx_power_dbm_cav", cfg.tx_power_dbm_cav);
  r.get("radio.tx_power_dbm_rsu", cfg.tx_power_dbm_rsu);
  r.get("radio.tx_power_dbm_haps", cfg.tx_power_dbm_haps);
  r.get_scaled("radio.bandwidth_mhz_dl_h", cfg.bandwidth_hz[0], 1e6);
  r.get_scaled("radio.bandwidth_mhz_ul_h", cfg.bandwidth_hz[1], 1e6);
  r.get_scaled("radio.bandwidth_mhz_dl_r", cfg.bandwidth_hz[2], 1e6);
  r.get_scaled("radio.bandwidth_mhz_ul_r", cfg.bandwidth_hz[3], 1e6);
  r.get("radio.noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
  r.get_scaled("radio.carrier_ghz", cfg.carrier_hz, 1e9);
  r.get("radio.antenna_gain_dbi", cfg.antenna_gain_dbi);
  r.get("radio.rician_k_db", cfg.rician_k_db);
  r.get("radio.pathloss_exponent", cfg.pathloss_exponent);
  r.get("rl.algo", cfg.rl.algo);
  r.get("rl.learning_rate", cfg.rl.learning_rate);
  r.get("rl.discount", cfg.rl.discount);
  r.get("rl.batch_episodes", cfg.rl.batch_episodes);
  r.get("rl.buffer_episodes", cfg.rl.buffer_episodes);
  r.get("rl.hidden_units", cfg.rl.hidden_units);
  r.get("rl.recurrent", cfg.rl.recurrent);
  r.get("rl.include_prev_action", cfg.rl.include_prev_action);
  r.get("rl.content_onehot", cfg.rl.content_onehot);
  r.get("rl.epsilon_start", cfg.rl.epsilon_start);
  r.get("rl.epsilon_final", cfg.rl.epsilon_final);
  r.get("rl.epsilon_decay_steps", cfg.rl.epsilon_decay_steps);
  r.get("rl.target_update_steps", cfg.rl.target_update_steps);
  r.get("rl.epochs", cfg.rl.epochs);
  r.get("rl.episodes_per_epoch", cfg.rl.episodes_per_epoch);
  r.get("rl.train_steps_per_episode", cfg.rl.train_steps_per_episode);
  r.get("rl.reward_scale_s", cfg.rl.reward_scale_s);
  r.get("solver.eta_max", cfg.solver.eta_max);
  r.get("solver.outer_tol", cfg.solver.outer_tol);
  r.get("solver.inner_tol", cfg.solver.inner_tol);
  r.get("solver.b_floor", cfg.solver.b_floor);
  r.get("solver.max_eta_doublings", cfg.solver.max_eta_doublings);
}

// HAPSIM_RADIO__CARRIER_GHZ=2.4 -> radio.carrier_ghz = 2.4
void apply_env_overrides(ScenarioConfig& cfg) {
  pt::ptree tree;
  const std::string prefix = "HAPSIM_";
  for (char** e = environ; *e != nullptr; ++e) {
    std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(prefix.size(), eq - prefix.size());
    const std::string value = entry.substr(eq + 1);
    const auto sep = key.find("__");
    if (sep == std::string::npos) continue;
    std::string path = key.substr(0, sep) + "." + key.substr(sep + 2);
    std::transform(path.begin(), path.end(), path.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    tree.put(path, value);
  }
  apply_tree(tree, cfg);
}

void fmt(std::string& out, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
  out += buf;
}

void fmt(std::string& out, const char* key, int v) {
  out += key;
  out += "=" + std::to_string(v) + "\n";
}

void fmt(std::string& out, const char* key, bool v) {
  out += key;
  out += v ? "=true\n" : "=false\n";
}

void fmt(std::string& out, const char* key, const std::string& v) {
  out += key;
  out += "=" + v + "\n";
}

void fmt(std::string& out, const char* key, const std::vector<double>& v) {
  out += key;
  out += "=";
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%.17g", i ? "," : "", v[i]);
    out += buf;
  }
  out += "\n";
}

}  // namespace

double ScenarioConfig::tx_power_w(CommGroup k) const {
  switch (k) {
    case CommGroup::DlHaps: return dbm_to_watts(tx_power_dbm_haps);
    case CommGroup::UlHaps: return dbm_to_watts(tx_power_dbm_cav);
    case CommGroup::DlRsu: return dbm_to_watts(tx_power_dbm_rsu);
    case CommGroup::UlRsu: return dbm_to_watts(tx_power_dbm_cav);
  }
  return 0.0;
}

double ScenarioConfig::max_task_input_bits() const {
  return *std::max_element(task_input_bits_choices.begin(), task_input_bits_choices.end());
}
double ScenarioConfig::max_task_density() const {
  return *std::max_element(task_density_choices.begin(), task_density_choices.end());
}
double ScenarioConfig::max_task_output_bits() const {
  return *std::max_element(task_output_bits_choices.begin(), task_output_bits_choices.end());
}

int ScenarioConfig::segment_rsu(double position_m) const {
  const int m = num_rsus();
  // boundary between RSU i and i+1 is the midpoint of their positions
  for (int i = 0; i + 1 < m; ++i) {
    const double boundary = 0.5 * (rsu_positions_m[i] + rsu_positions_m[i + 1]);
    if (position_m < boundary) return i;
  }
  return m - 1;
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(road_length_m > 0, "road.length_m must be positive");
  require(!rsu_positions_m.empty(), "rsu.positions_m must be nonempty");
  require(std::is_sorted(rsu_positions_m.begin(), rsu_positions_m.end()),
          "rsu.positions_m must be sorted ascending");
  for (double p : rsu_positions_m)
    require(p >= 0 && p <= road_length_m, "rsu position outside [0, road length]");
  require(rsu_range_m > 0, "rsu.range_m must be positive");
  require(haps_altitude_m > 0, "haps.altitude_m must be positive");
  require(num_cavs > 0, "cav.count must be positive");
  require(cav_speed_mps >= 0, "cav.speed_mps must be nonnegative");
  require(slot_duration_s > 0, "slot.duration_s must be positive");
  require(episode_slots > 0, "slot.episode_slots must be positive");
  require(num_contents > 0, "library.num_contents must be positive");
  require(!content_size_choices_bits.empty(), "library.content_sizes_mbits must be nonempty");
  for (double s : content_size_choices_bits) require(s > 0, "content sizes must be positive");
  require(zipf_exponent >= 0, "library.zipf_exponent must be >= 0");
  require(!task_input_bits_choices.empty() && !task_density_choices.empty() &&
              !task_output_bits_choices.empty(),
          "task choice sets must be nonempty");
  for (double v : task_input_bits_choices) require(v > 0, "task input sizes must be positive");
  for (double v : task_density_choices) require(v > 0, "task densities must be positive");
  for (double v : task_output_bits_choices) require(v > 0, "task output sizes must be positive");
  require(f_cav_cps > 0 && f_rsu_cps > 0 && f_haps_cps >= 0, "compute capacities must be positive");
  require(cache_capacity_bits >= 0, "compute.cache_capacity_mbits must be >= 0");
  for (double b : bandwidth_hz) require(b > 0, "bandwidths must be positive");
  require(carrier_hz > 0, "radio.carrier_ghz must be positive");
  require(pathloss_exponent > 2, "radio.pathloss_exponent must exceed 2");
  require(rl.discount > 0 && rl.discount < 1, "rl.discount must lie in (0, 1)");
  require(rl.algo == "vdn" || rl.algo == "iql", "rl.algo must be vdn or iql");
  require(rl.hidden_units > 0 && rl.batch_episodes > 0 && rl.buffer_episodes > 0,
          "rl sizes must be positive");
  require(rl.epochs > 0 && rl.episodes_per_epoch > 0, "rl schedule must be positive");
  require(solver.eta_max > 0 && solver.outer_tol > 0 && solver.inner_tol > 0 &&
              solver.b_floor > 0,
          "solver parameters must be positive");
}

ScenarioConfig parse_config_text(const std::string& text, bool apply_env) {
  pt::ptree tree;
  std::stringstream ss(text);
  try {
    pt::read_ini(ss, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ScenarioConfig cfg;
  apply_tree(tree, cfg);
  if (apply_env) apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path, bool apply_env) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config '") + path + "': " + e.what());
  }
  ScenarioConfig cfg;
  apply_tree(tree, cfg);
  if (apply_env) apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

std::string dump_config(const ScenarioConfig& c) {
  std::string o;
  fmt(o, "road.length_m", c.road_length_m);
  fmt(o, "rsu.positions_m", c.rsu_positions_m);
  fmt(o, "rsu.range_m", c.rsu_range_m);
  fmt(o, "haps.altitude_m", c.haps_altitude_m);
  fmt(o, "haps.horizontal_m", c.haps_horizontal_m);
  fmt(o, "cav.count", c.num_cavs);
  fmt(o, "cav.speed_mps", c.cav_speed_mps);
  fmt(o, "slot.duration_s", c.slot_duration_s);
  fmt(o, "slot.episode_slots", c.episode_slots);
  fmt(o, "library.num_contents", c.num_contents);
  fmt(o, "library.content_sizes_bits", c.content_size_choices_bits);
  fmt(o, "library.zipf_exponent", c.zipf_exponent);
  fmt(o, "tasks.input_bits", c.task_input_bits_choices);
  fmt(o, "tasks.density_cycles_per_bit", c.task_density_choices);
  fmt(o, "tasks.output_bits", c.task_output_bits_choices);
  fmt(o, "compute.f_cav_cps", c.f_cav_cps);
  fmt(o, "compute.f_rsu_cps", c.f_rsu_cps);
  fmt(o, "compute.f_haps_cps", c.f_haps_cps);
  fmt(o, "compute.cache_capacity_bits", c.cache_capacity_bits);
  fmt(o, "radio.tx_power_dbm_cav", c.tx_power_dbm_cav);
  fmt(o, "radio.tx_power_dbm_rsu", c.tx_power_dbm_rsu);
  fmt(o, "radio.tx_power_dbm_haps", c.tx_power_dbm_haps);
  fmt(o, "radio.bandwidth_hz", std::vector<double>(c.bandwidth_hz.begin(), c.bandwidth_hz.end()));
  fmt(o, "radio.noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  fmt(o, "radio.carrier_hz", c.carrier_hz);
  fmt(o, "radio.antenna_gain_dbi", c.antenna_gain_dbi);
  fmt(o, "radio.rician_k_db", c.rician_k_db);
  fmt(o, "radio.pathloss_exponent", c.pathloss_exponent);
  fmt(o, "rl.algo", c.rl.algo);
  fmt(o, "rl.learning_rate", c.rl.learning_rate);
  fmt(o, "rl.discount", c.rl.discount);
  fmt(o, "rl.batch_episodes", c.rl.batch_episodes);
  fmt(o, "rl.buffer_episodes", c.rl.buffer_episodes);
  fmt(o, "rl.hidden_units", c.rl.hidden_units);
  fmt(o, "rl.recurrent", c.rl.recurrent);
  fmt(o, "rl.include_prev_action", c.rl.include_prev_action);
  fmt(o, "rl.content_onehot", c.rl.content_onehot);
  fmt(o, "rl.epsilon_start", c.rl.epsilon_start);
  fmt(o, "rl.epsilon_final", c.rl.epsilon_final);
  fmt(o, "rl.epsilon_decay_steps", c.rl.epsilon_decay_steps);
  fmt(o, "rl.target_update_steps", c.rl.target_update_steps);
  fmt(o, "rl.epochs", c.rl.epochs);
  fmt(o, "rl.episodes_per_epoch", c.rl.episodes_per_epoch);
  fmt(o, "rl.train_steps_per_episode", c.rl.train_steps_per_episode);
  fmt(o, "rl.reward_scale_s", c.rl.reward_scale_s);
  fmt(o, "solver.eta_max", c.solver.eta_max);
  fmt(o, "solver.outer_tol", c.solver.outer_tol);
  fmt(o, "solver.inner_tol", c.solver.inner_tol);
  fmt(o, "solver.b_floor", c.solver.b_floor);
  fmt(o, "solver.max_eta_doublings", c.solver.max_eta_doublings);
  return o;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string dump = dump_config(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace hapsim
