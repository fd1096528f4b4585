#include "hapsim/scenario.hpp"

namespace hapsim {

ContentLibrary make_library(const ScenarioConfig& cfg, Rng& rng) {
  ContentLibrary lib;
  lib.size_bits.resize(static_cast<std::size_t>(cfg.num_contents));
  const std::span<const double> choices(cfg.content_size_choices_bits);
  for (auto& s : lib.size_bits) s = rng.pick(choices);
  return lib;
}

std::vector<CavState> initial_cavs(const ScenarioConfig& cfg, Rng& rng) {
  std::vector<CavState> cavs(static_cast<std::size_t>(cfg.num_cavs));
  for (int i = 0; i < cfg.num_cavs; ++i) {
    auto& c = cavs[static_cast<std::size_t>(i)];
    c.id = i;
    c.position_m = rng.uniform(0.0, cfg.road_length_m);
    c.associated_rsu = cfg.segment_rsu(c.position_m);
  }
  return cavs;
}

std::vector<CavState> advance_mobility(const std::vector<CavState>& cavs,
                                       const ScenarioConfig& cfg) {
  std::vector<CavState> next = cavs;
  const double step = cfg.cav_speed_mps * cfg.slot_duration_s;
  for (auto& c : next) {
    c.position_m += step;
    while (c.position_m >= cfg.road_length_m) c.position_m -= cfg.road_length_m;
    c.associated_rsu = cfg.segment_rsu(c.position_m);
  }
  return next;
}

std::vector<Task> sample_tasks(Rng& rng, const ScenarioConfig& cfg, const ZipfSampler& zipf) {
  std::vector<Task> tasks(static_cast<std::size_t>(cfg.num_cavs));
  const std::span<const double> eps(cfg.task_input_bits_choices);
  const std::span<const double> dens(cfg.task_density_choices);
  const std::span<const double> outs(cfg.task_output_bits_choices);
  for (int i = 0; i < cfg.num_cavs; ++i) {
    auto& t = tasks[static_cast<std::size_t>(i)];
    t.cav_id = i;
    t.content_id = zipf.sample(rng);
    t.input_bits = rng.pick(eps);
    t.density_cpb = rng.pick(dens);
    t.output_bits = rng.pick(outs);
  }
  return tasks;
}

}  // namespace hapsim
