#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hapsim/common.hpp"

namespace hapsim {

struct RlParams {
  std::string algo = "vdn";  // vdn | iql
  double learning_rate = 5e-4;
  double discount = 0.95;
  int batch_episodes = 64;
  int buffer_episodes = 10000;
  int hidden_units = 128;
  bool recurrent = true;
  bool include_prev_action = false;
  bool content_onehot = false;
  double epsilon_start = 1.0;
  double epsilon_final = 0.05;
  int epsilon_decay_steps = 50000;
  int target_update_steps = 200;
  int epochs = 200;
  int episodes_per_epoch = 8;
  int train_steps_per_episode = 1;
  // Sigmoid reward scale kappa (s); <= 0 selects the default of
  // 0.1 s per CAV.
  double reward_scale_s = -1.0;
};

struct SolverParams {
  double eta_max = 50.0;
  double outer_tol = 1e-8;   // delta of the outer bisection
  double inner_tol = 1e-10;  // residual bound for per-member roots
  double b_floor = 1e-12;
  int max_eta_doublings = 10;
};

// Static description of one scenario: road layout, nodes, content library,
// task distribution, radio and compute parameters, training and solver knobs.
struct ScenarioConfig {
  // road / mobility
  double road_length_m = 400.0;
  std::vector<double> rsu_positions_m = {100.0, 300.0};
  double rsu_range_m = 200.0;
  double haps_altitude_m = 20e3;
  double haps_horizontal_m = 200.0;
  int num_cavs = 10;
  double cav_speed_mps = 10.0;
  double slot_duration_s = 1.0;
  int episode_slots = 150;

  // content library
  int num_contents = 200;
  std::vector<double> content_size_choices_bits = {2e6, 5e6, 8e6};
  double zipf_exponent = 0.8;

  // tasks
  std::vector<double> task_input_bits_choices = {200e3, 500e3, 800e3};
  std::vector<double> task_density_choices = {500.0, 1000.0, 1500.0};
  std::vector<double> task_output_bits_choices = {60e3, 90e3};

  // compute / caching
  double f_cav_cps = 2e9;
  double f_rsu_cps = 16e9;
  double f_haps_cps = 50e9;
  double cache_capacity_bits = 600e6;

  // radio
  double tx_power_dbm_cav = 23.0;
  double tx_power_dbm_rsu = 27.0;
  double tx_power_dbm_haps = 33.0;
  std::array<double, kNumCommGroups> bandwidth_hz = {20e6, 5e6, 20e6, 5e6};  // dl_H, ul_H, dl_R, ul_R
  double noise_psd_dbm_hz = -174.0;
  double carrier_hz = 2e9;
  double antenna_gain_dbi = 17.0;
  double rician_k_db = 10.0;
  double pathloss_exponent = 3.7;

  RlParams rl;
  SolverParams solver;

  int num_rsus() const { return static_cast<int>(rsu_positions_m.size()); }
  double bandwidth(CommGroup k) const { return bandwidth_hz[static_cast<int>(k)]; }
  double tx_power_w(CommGroup k) const;
  double noise_psd_w_hz() const { return dbm_to_watts(noise_psd_dbm_hz); }
  double antenna_gain_linear() const { return dbi_to_linear(antenna_gain_dbi); }
  double rician_k_linear() const { return std::pow(10.0, rician_k_db / 10.0); }
  double reward_scale() const {
    return rl.reward_scale_s > 0.0 ? rl.reward_scale_s : 0.1 * num_cavs;
  }
  double max_task_input_bits() const;
  double max_task_density() const;
  double max_task_output_bits() const;

  // Index of the RSU whose road segment contains the position. Segments
  // split the road evenly between consecutive RSUs.
  int segment_rsu(double position_m) const;

  void validate() const;  // throws ConfigError
};

// INI-style file with [section] headers; every key has a default. Keys in
// the file override defaults; environment variables with prefix
// HAPSIM_<SECTION>__<KEY> override the file.
ScenarioConfig load_config(const std::string& path, bool apply_env = true);
ScenarioConfig parse_config_text(const std::string& text, bool apply_env = false);

// Canonical text rendering of every field (used for hashing and dumps).
std::string dump_config(const ScenarioConfig& cfg);

// FNV-1a over the canonical dump.
std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace hapsim
