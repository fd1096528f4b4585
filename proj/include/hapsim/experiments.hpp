#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hapsim/csvio.hpp"
#include "hapsim/marl.hpp"

namespace hapsim {

enum class PolicyKind { Trained, Exhaustive, JointExhaustive, Random };
enum class LayerMask { Full, WoRsu, WoHaps };

LayerMask parse_layer_mask(const std::string& s);
PolicyKind parse_policy(const std::string& s);

struct SchemeSpec {
  PolicyKind policy = PolicyKind::Trained;
  AllocMode alloc = AllocMode::Optimal;
  LayerMask mask = LayerMask::Full;
  bool handoff = false;
  int joint_cap = 6;
  std::optional<double> cache_capacity_bits;
  std::optional<double> f_haps_cps;
  std::optional<double> f_rsu_cps;

  std::string label() const;
};

// Applies the scheme's scenario overrides.
ScenarioConfig apply_overrides(ScenarioConfig cfg, const SchemeSpec& scheme);

// Feasible action set of one CAV under layer masking, the optional handoff
// rule (RSU actions drop once the CAV leaves its RSU's communication range)
// and zero-capacity servers.
std::array<bool, kNumActions> feasible_actions(const CavState& cav, const ScenarioConfig& cfg,
                                               const SchemeSpec& scheme);

struct ExhaustiveResult {
  JointDecision decisions;
  DelayReport report;
  long candidates = 0;
};

// Enumerates offload vectors {local, HAPS, RSU}^I with the caching decision
// held fixed. joint=true scores every candidate under the optimal
// allocation; joint=false scores under equal allocation and re-solves the
// winner optimally.
ExhaustiveResult exhaustive_offload(const Env& env, const std::vector<std::uint8_t>& fixed_cache,
                                    bool joint, int cap, const SchemeSpec& scheme);

struct EvalMetrics {
  long slots = 0;
  long cav_slots = 0;
  double delay_sum_s = 0.0;
  double delay_sq_sum = 0.0;
  double comm_sum_s = 0.0;
  double comp_sum_s = 0.0;
  std::array<double, 3> mode_counts = {0.0, 0.0, 0.0};
  double decide_seconds = 0.0;
  double alloc_seconds = 0.0;
  std::vector<double> per_cav_totals_s;  // for CDFs and paired comparisons
  std::vector<double> per_slot_total_s;

  double mean_delay_s() const { return cav_slots ? delay_sum_s / cav_slots : 0.0; }
  double std_delay_s() const;
  std::array<double, 3> mode_ratios() const;
  double mean_comm_s() const { return cav_slots ? comm_sum_s / cav_slots : 0.0; }
  double mean_comp_s() const { return cav_slots ? comp_sum_s / cav_slots : 0.0; }
  double solve_seconds_per_slot() const {
    return slots ? (decide_seconds + alloc_seconds) / slots : 0.0;
  }
};

struct EvalOptions {
  int episodes_per_seed = 1;
  std::string run_id = "run";
  CsvWriter* rows = nullptr;  // optional per-CAV row sink
  std::vector<SolveTraceRow>* first_slot_trace = nullptr;
};

// Two-stage evaluation: decisions from the scheme's policy, then the chosen
// allocation, slot by slot. All schemes on the same (config, seed) see the
// same task/channel stream.
EvalMetrics evaluate_policy(const Checkpoint* ckpt, const ScenarioConfig& cfg,
                            std::span<const std::uint64_t> seeds, const SchemeSpec& scheme,
                            const EvalOptions& opts);

}  // namespace hapsim
