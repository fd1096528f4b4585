#pragma once

#include <vector>

#include "hapsim/config.hpp"
#include "hapsim/rng.hpp"

namespace hapsim {

struct CavState {
  int id = 0;
  double position_m = 0.0;
  int associated_rsu = 0;
};

struct Task {
  int cav_id = 0;
  int content_id = 1;        // 1..N, rank order = popularity order
  double input_bits = 0.0;   // epsilon
  double output_bits = 0.0;  // phi
  double density_cpb = 0.0;  // e, cycles per bit
  double workload_cycles() const { return input_bits * density_cpb; }
};

// Per-content volumes, drawn i.i.d. from the configured choice set once per
// realization. Contents are indexed 1..N in popularity order.
struct ContentLibrary {
  std::vector<double> size_bits;
  double size(int content_id) const { return size_bits[static_cast<std::size_t>(content_id - 1)]; }
  int num_contents() const { return static_cast<int>(size_bits.size()); }
};

ContentLibrary make_library(const ScenarioConfig& cfg, Rng& rng);

std::vector<CavState> initial_cavs(const ScenarioConfig& cfg, Rng& rng);

// One slot of forward motion; the road wraps around so the fleet size stays
// constant across an episode.
std::vector<CavState> advance_mobility(const std::vector<CavState>& cavs,
                                       const ScenarioConfig& cfg);

// One task per CAV: content rank from the Zipf law, volumes and density
// uniform over their choice sets.
std::vector<Task> sample_tasks(Rng& rng, const ScenarioConfig& cfg, const ZipfSampler& zipf);

}  // namespace hapsim
