#pragma once

#include <array>
#include <vector>

#include "hapsim/cache.hpp"
#include "hapsim/channel.hpp"
#include "hapsim/scenario.hpp"

namespace hapsim {

// Per-CAV decision pair: offload destination x and end-of-slot caching flag y.
struct JointDecision {
  std::vector<ComputeMode> offload;
  std::vector<std::uint8_t> cache;

  static JointDecision from_actions(const std::vector<int>& actions);
  int size() const { return static_cast<int>(offload.size()); }
};

// Channel realizations for one slot: power gains with the slot's fading
// baked in, for every potential link (decision-independent).
struct SlotChannels {
  std::vector<double> gain_dl_haps;   // HAPS -> CAV
  std::vector<double> gain_ul_haps;   // CAV -> HAPS
  std::vector<double> gain_dl_rsu;    // associated RSU -> CAV
  std::vector<double> gain_ul_rsu;    // CAV -> associated RSU
  std::vector<double> gain_haps_rsu;  // HAPS -> RSU, per RSU
};

SlotChannels sample_slot_channels(Rng& rng, const std::vector<CavState>& cavs,
                                  const ScenarioConfig& cfg);

// One bandwidth-group entry: the data volume it must carry and the channel
// constants O = D/B and H = P*G/(B*N0) of the member's link.
struct CommMember {
  int cav_id;
  LinkType link;
  double payload_bits;
  double gain;
  double coef_o;
  double coef_h;
};

struct Groups {
  std::array<std::vector<CommMember>, kNumCommGroups> comm;
  std::vector<int> comp_haps;              // cav ids computing at the HAPS
  std::vector<std::vector<int>> comp_rsu;  // cav ids per RSU server
  std::vector<int> comp_local;

  const std::vector<CommMember>& comm_members(CommGroup k) const {
    return comm[static_cast<std::size_t>(k)];
  }
};

// Caching state flags s: content of CAV i present in its associated RSU.
std::vector<std::uint8_t> cache_flags(const std::vector<CavState>& cavs,
                                      const std::vector<Task>& tasks,
                                      const std::vector<RsuCache>& caches);

// Partitions the fleet into computing groups and populates the four
// bandwidth groups according to the offload decisions and caching states:
//   x=0,s=1 -> dl_R carries the fundamental data
//   x=0,s=0 -> dl_H carries the fundamental data
//   x=1     -> ul_H carries the input, dl_H the result
//   x=2,s=0 -> dl_H carries the fundamental data over the HAPS->RSU link,
//              ul_R the input, dl_R the result
//   x=2,s=1 -> ul_R the input, dl_R the result
// Rejects y=1 paired with x!=2.
Groups build_groups(const JointDecision& decisions, const std::vector<std::uint8_t>& s_flags,
                    const std::vector<Task>& tasks, const std::vector<CavState>& cavs,
                    const SlotChannels& channels, const ContentLibrary& library,
                    const ScenarioConfig& cfg);

}  // namespace hapsim
