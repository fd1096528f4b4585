#pragma once

#include <span>
#include <vector>

#include "hapsim/config.hpp"
#include "hapsim/delaymodel.hpp"

namespace hapsim {

// One bandwidth-group problem: minimize sum_i O_i / (b_i log2(1 + H_i/b_i))
// subject to sum b_i <= 1, b_i > 0.
struct BandwidthProblem {
  std::vector<double> coef_o;
  std::vector<double> coef_h;
  std::size_t size() const { return coef_o.size(); }
};

// Member communication delay and its b-derivatives.
double comm_delay_g(double b, double O, double H);
double g_prime(double b, double O, double H);
double g_second(double b, double O, double H);
double w_second(double b, double H);

// Server-side delay curvature: z(f) = U/f.
inline double z_second(double f, double U) { return 2.0 * U / (f * f * f); }

// Unique positive root of g'(b) = -eta, by bisection on an expanding
// bracket starting at [b_floor, 1]. Throws NumericalError when the bracket
// would exceed b_max.
double solve_b_root(double eta, double O, double H, double tol, double b_floor = 1e-12,
                    double b_max = 1e9);

struct SolveTraceRow {
  int iteration;
  double eta;
  double sum_b;
  double objective;
};

struct BandwidthSolution {
  std::vector<double> b;
  double eta = 0.0;
  int outer_iterations = 0;
  int eta_doublings = 0;
};

// Outer bisection on the group multiplier (the dual of the sum constraint),
// inner per-member root solves, then a short Newton refinement of the
// multiplier so the sum constraint binds to machine precision. Singleton
// groups short-circuit to b = 1.
BandwidthSolution allocate_bandwidth(const BandwidthProblem& problem, const SolverParams& params,
                                     std::vector<SolveTraceRow>* trace = nullptr);

// Closed-form computing split at one server: f_i = sqrt(U_i) / sum sqrt(U_m).
std::vector<double> allocate_computing(std::span<const double> workloads_over_capacity);

struct KktReport {
  double max_stationarity_b = 0.0;  // |g'(b) + eta|
  double max_stationarity_f = 0.0;  // |-U/f^2 + mu|
  double comp_slack_b = 0.0;        // |eta * (sum b - 1)|
  double comp_slack_f = 0.0;        // |mu * (sum f - 1)|
  double primal_gap_b = 0.0;        // max(0, sum b - 1)
  double primal_gap_f = 0.0;        // max(0, sum f - 1)

  double worst() const;
};

KktReport kkt_residuals(const BandwidthProblem& problem, std::span<const double> b,
                        std::span<const double> u, std::span<const double> f, double eta,
                        double mu);

// Solve every nonempty communication group and server group of a slot.
// Parallel mode distributes groups over OpenMP threads; per-group results are
// identical to the serial path.
Allocation optimal_allocation(const Groups& groups, int num_cavs,
                              const std::vector<Task>& tasks, const ScenarioConfig& cfg,
                              bool parallel = false);

// Batch front door used by the benchmark: independent group problems.
std::vector<BandwidthSolution> solve_bandwidth_batch(std::span<const BandwidthProblem> problems,
                                                     const SolverParams& params, bool parallel);

}  // namespace hapsim
