#pragma once

#include <limits>
#include <vector>

#include "hapsim/grouping.hpp"

namespace hapsim {

// Bandwidth ratios per (cav, group) membership and compute ratios per CAV at
// its server group. Absent entries are NaN; reading one is a hard error.
struct Allocation {
  std::vector<std::array<double, kNumCommGroups>> b;
  std::vector<double> f;

  static Allocation absent(int num_cavs) {
    Allocation a;
    a.b.assign(static_cast<std::size_t>(num_cavs),
               {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
    a.f.assign(static_cast<std::size_t>(num_cavs), std::numeric_limits<double>::quiet_NaN());
    return a;
  }

  void set_b(int cav, CommGroup k, double v) {
    b[static_cast<std::size_t>(cav)][static_cast<std::size_t>(k)] = v;
  }
  void set_f(int cav, double v) { f[static_cast<std::size_t>(cav)] = v; }

  double bandwidth_share(int cav, CommGroup k) const {
    const double v = b[static_cast<std::size_t>(cav)][static_cast<std::size_t>(k)];
    if (std::isnan(v))
      throw NumericalError("missing bandwidth allocation for cav " + std::to_string(cav) +
                           " in group " + to_string(k));
    return v;
  }
  double compute_share(int cav) const {
    const double v = f[static_cast<std::size_t>(cav)];
    if (std::isnan(v))
      throw NumericalError("missing compute allocation for cav " + std::to_string(cav));
    return v;
  }
};

struct CavDelay {
  int cav_id = 0;
  ComputeMode mode = ComputeMode::Local;
  double comm_s = 0.0;
  double comp_s = 0.0;
  double total_s() const { return comm_s + comp_s; }
};

struct DelayReport {
  std::vector<CavDelay> per_cav;
  double total_s = 0.0;
  double comm_total_s = 0.0;
  double comp_total_s = 0.0;

  double mean_s() const { return per_cav.empty() ? 0.0 : total_s / static_cast<double>(per_cav.size()); }
  double stddev_s() const;
  std::array<double, 3> mode_ratios() const;  // local, haps, rsu
};

// Uniform split within every nonempty group: b = 1/|group|, f = 1/|server group|.
Allocation equal_allocation(const Groups& groups, int num_cavs);

// Delay of one CAV under its decision, split into communication and
// computation terms; rates come from the allocation at call time.
CavDelay cav_delay(int cav, const Groups& groups, const Allocation& alloc,
                   const std::vector<Task>& tasks, const ScenarioConfig& cfg);

// Whole-fleet evaluation in one pass over the groups.
DelayReport evaluate_delays(const Groups& groups, const Allocation& alloc,
                            const std::vector<Task>& tasks, const ScenarioConfig& cfg);

double total_delay(const DelayReport& report);

// Team reward: sigmoid of the negative total delay over the scale kappa.
double delay_reward(double total_delay_s, double kappa_s);

}  // namespace hapsim
