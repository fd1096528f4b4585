#include "hapsim/delaymodel.hpp"

#include <cmath>

namespace hapsim {

double DelayReport::stddev_s() const {
  if (per_cav.size() < 2) return 0.0;
  const double mean = mean_s();
  double acc = 0.0;
  for (const auto& c : per_cav) {
    const double d = c.total_s() - mean;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(per_cav.size()));
}

std::array<double, 3> DelayReport::mode_ratios() const {
  std::array<double, 3> counts = {0, 0, 0};
  for (const auto& c : per_cav) counts[static_cast<std::size_t>(c.mode)] += 1.0;
  if (!per_cav.empty())
    for (auto& v : counts) v /= static_cast<double>(per_cav.size());
  return counts;
}

Allocation equal_allocation(const Groups& groups, int num_cavs) {
  Allocation alloc = Allocation::absent(num_cavs);
  for (CommGroup k : kAllCommGroups) {
    const auto& members = groups.comm_members(k);
    if (members.empty()) continue;
    const double share = 1.0 / static_cast<double>(members.size());
    for (const auto& m : members) alloc.set_b(m.cav_id, k, share);
  }
  auto split_server = [&](const std::vector<int>& members) {
    if (members.empty()) return;
    const double share = 1.0 / static_cast<double>(members.size());
    for (int cav : members) alloc.set_f(cav, share);
  };
  split_server(groups.comp_haps);
  for (const auto& rsu_members : groups.comp_rsu) split_server(rsu_members);
  return alloc;
}

namespace {

void add_comm_terms(const Groups& groups, const Allocation& alloc, const ScenarioConfig& cfg,
                    std::vector<CavDelay>& delays) {
  const double n0 = cfg.noise_psd_w_hz();
  for (CommGroup k : kAllCommGroups) {
    const double bw = cfg.bandwidth(k);
    const double p = cfg.tx_power_w(k);
    for (const auto& m : groups.comm_members(k)) {
      const double b = alloc.bandwidth_share(m.cav_id, k);
      const double r = rate_bps(b, bw, p, m.gain, n0);
      delays[static_cast<std::size_t>(m.cav_id)].comm_s += m.payload_bits / r;
    }
  }
}

void add_comp_terms(const Groups& groups, const Allocation& alloc,
                    const std::vector<Task>& tasks, const ScenarioConfig& cfg,
                    std::vector<CavDelay>& delays) {
  for (int cav : groups.comp_local) {
    auto& d = delays[static_cast<std::size_t>(cav)];
    d.mode = ComputeMode::Local;
    d.comp_s += tasks[static_cast<std::size_t>(cav)].workload_cycles() / cfg.f_cav_cps;
  }
  for (int cav : groups.comp_haps) {
    auto& d = delays[static_cast<std::size_t>(cav)];
    d.mode = ComputeMode::Haps;
    d.comp_s += tasks[static_cast<std::size_t>(cav)].workload_cycles() /
                (alloc.compute_share(cav) * cfg.f_haps_cps);
  }
  for (const auto& members : groups.comp_rsu) {
    for (int cav : members) {
      auto& d = delays[static_cast<std::size_t>(cav)];
      d.mode = ComputeMode::Rsu;
      d.comp_s += tasks[static_cast<std::size_t>(cav)].workload_cycles() /
                  (alloc.compute_share(cav) * cfg.f_rsu_cps);
    }
  }
}

}  // namespace

CavDelay cav_delay(int cav, const Groups& groups, const Allocation& alloc,
                   const std::vector<Task>& tasks, const ScenarioConfig& cfg) {
  std::vector<CavDelay> delays(tasks.size());
  for (std::size_t i = 0; i < delays.size(); ++i) delays[i].cav_id = static_cast<int>(i);

  const double n0 = cfg.noise_psd_w_hz();
  for (CommGroup k : kAllCommGroups) {
    for (const auto& m : groups.comm_members(k)) {
      if (m.cav_id != cav) continue;
      const double b = alloc.bandwidth_share(m.cav_id, k);
      const double r = rate_bps(b, cfg.bandwidth(k), cfg.tx_power_w(k), m.gain, n0);
      delays[static_cast<std::size_t>(cav)].comm_s += m.payload_bits / r;
    }
  }
  add_comp_terms(groups, alloc, tasks, cfg, delays);
  return delays[static_cast<std::size_t>(cav)];
}

DelayReport evaluate_delays(const Groups& groups, const Allocation& alloc,
                            const std::vector<Task>& tasks, const ScenarioConfig& cfg) {
  DelayReport report;
  report.per_cav.resize(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) report.per_cav[i].cav_id = static_cast<int>(i);
  add_comm_terms(groups, alloc, cfg, report.per_cav);
  add_comp_terms(groups, alloc, tasks, cfg, report.per_cav);
  for (const auto& c : report.per_cav) {
    report.comm_total_s += c.comm_s;
    report.comp_total_s += c.comp_s;
  }
  report.total_s = report.comm_total_s + report.comp_total_s;
  return report;
}

double total_delay(const DelayReport& report) { return report.total_s; }

double delay_reward(double total_delay_s, double kappa_s) {
  return 1.0 / (1.0 + std::exp(total_delay_s / kappa_s));
}

}  // namespace hapsim
