#include "hapsim/allocsolver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hapsim {
namespace {

constexpr double kLn2 = 0.6931471805599453;

// (1 + x) * log1p(x) - x, series-stabilized for small x where the direct
// form cancels.
double z_of(double x) {
  if (x < 1e-3) {
    // sum_{k>=2} (-1)^k x^k / ((k-1) k)
    const double x2 = x * x;
    return x2 * (1.0 / 2.0 + x * (-1.0 / 6.0 + x * (1.0 / 12.0 + x * (-1.0 / 20.0 + x / 30.0))));
  }
  return (1.0 + x) * std::log1p(x) - x;
}

double check_positive(double b) {
  if (b <= 0.0) throw NumericalError("bandwidth ratio must be positive");
  return b;
}

}  // namespace

double comm_delay_g(double b, double O, double H) {
  check_positive(b);
  return O * kLn2 / (b * std::log1p(H / b));
}

double g_prime(double b, double O, double H) {
  check_positive(b);
  const double x = H / b;
  const double l = std::log1p(x);
  return -kLn2 * O * z_of(x) / (b * b * (1.0 + x) * l * l);
}

double w_second(double b, double H) {
  const double s = b + H;
  return -H * H / (kLn2 * b * s * s);
}

double g_second(double b, double O, double H) {
  check_positive(b);
  const double x = H / b;
  const double l = std::log1p(x);
  const double w = b * l / kLn2;
  const double wp = (l - x / (1.0 + x)) / kLn2;
  const double wpp = w_second(b, H);
  return O * (2.0 * wp * wp - wpp * w) / (w * w * w);
}

double solve_b_root(double eta, double O, double H, double tol, double b_floor, double b_max) {
  if (eta <= 0.0) throw NumericalError("root solve requires a positive multiplier");
  auto phi = [&](double b) { return g_prime(b, O, H) + eta; };

  double lo = b_floor;
  double hi = 1.0;
  while (phi(hi) < 0.0) {
    hi *= 2.0;
    if (hi > b_max)
      throw NumericalError("bandwidth root bracket exceeded " + std::to_string(b_max));
  }
  if (phi(lo) > 0.0) return lo;  // root below the floor clamp

  // Bisection with a safeguarded Newton candidate; phi is increasing.
  double b = 0.5 * (lo + hi);
  for (int it = 0; it < 120; ++it) {
    const double v = phi(b);
    if (std::abs(v) <= tol) return b;
    if (v < 0.0)
      lo = b;
    else
      hi = b;
    const double newton = b - v / g_second(b, O, H);
    b = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (hi - lo < 1e-17 * std::max(1.0, b)) break;
  }
  return b;
}

namespace {

// Root of g'(b) = -eta restricted to (0, 1]: when even b = 1 has slope
// steeper than -eta the member saturates at the cap.
double capped_root(double eta, double O, double H, const SolverParams& p) {
  if (g_prime(1.0, O, H) + eta <= 0.0) return 1.0;
  return solve_b_root(eta, O, H, p.inner_tol, p.b_floor, 1.0 + 1e-9);
}

double sum_roots(const BandwidthProblem& pr, double eta, const SolverParams& p,
                 std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    b[i] = capped_root(eta, pr.coef_o[i], pr.coef_h[i], p);
    sum += b[i];
  }
  return sum;
}

double objective(const BandwidthProblem& pr, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pr.size(); ++i) acc += comm_delay_g(b[i], pr.coef_o[i], pr.coef_h[i]);
  return acc;
}

}  // namespace

BandwidthSolution allocate_bandwidth(const BandwidthProblem& problem, const SolverParams& params,
                                     std::vector<SolveTraceRow>* trace) {
  BandwidthSolution sol;
  const std::size_t m = problem.size();
  if (m == 0) return sol;
  sol.b.resize(m);
  if (m == 1) {
    sol.b[0] = 1.0;
    sol.eta = -g_prime(1.0, problem.coef_o[0], problem.coef_h[0]);
    return sol;
  }

  double eta_hi = params.eta_max;
  while (sum_roots(problem, eta_hi, params, sol.b) > 1.0) {
    if (sol.eta_doublings >= params.max_eta_doublings)
      throw NumericalError("eta_max insufficient after " +
                           std::to_string(params.max_eta_doublings) + " doublings");
    eta_hi *= 2.0;
    ++sol.eta_doublings;
  }
  if (sol.eta_doublings > 0)
    std::cerr << "hapsim: eta_max raised to " << eta_hi << " (" << sol.eta_doublings
              << " doublings)\n";

  double eta_lo = 0.0;
  double eta = eta_hi;
  while (eta_hi - eta_lo >= params.outer_tol) {
    eta = 0.5 * (eta_hi + eta_lo);
    ++sol.outer_iterations;
    const double sum = sum_roots(problem, eta, params, sol.b);
    if (trace) trace->push_back({sol.outer_iterations, eta, sum, objective(problem, sol.b)});
    if (sum > 1.0)
      eta_lo = eta;
    else
      eta_hi = eta;
  }

  // Feasible endpoint, then Newton steps on the multiplier to make the sum
  // constraint bind to machine precision (the optimum has sum b = 1).
  eta = eta_hi;
  double sum = sum_roots(problem, eta, params, sol.b);
  for (int step = 0; step < 6 && std::abs(sum - 1.0) > 1e-13; ++step) {
    double dsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (sol.b[i] < 1.0)
        dsum -= 1.0 / g_second(sol.b[i], problem.coef_o[i], problem.coef_h[i]);
    }
    if (dsum >= 0.0) break;
    const double next = eta - (sum - 1.0) / dsum;
    if (!(next > 0.0)) break;
    eta = next;
    sum = sum_roots(problem, eta, params, sol.b);
  }
  sol.eta = eta;
  return sol;
}

std::vector<double> allocate_computing(std::span<const double> workloads_over_capacity) {
  std::vector<double> f(workloads_over_capacity.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::sqrt(workloads_over_capacity[i]);
    denom += f[i];
  }
  for (auto& v : f) v /= denom;
  return f;
}

double KktReport::worst() const {
  return std::max({max_stationarity_b, max_stationarity_f, comp_slack_b, comp_slack_f,
                   primal_gap_b, primal_gap_f});
}

KktReport kkt_residuals(const BandwidthProblem& problem, std::span<const double> b,
                        std::span<const double> u, std::span<const double> f, double eta,
                        double mu) {
  KktReport r;
  double sum_b = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    r.max_stationarity_b = std::max(
        r.max_stationarity_b, std::abs(g_prime(b[i], problem.coef_o[i], problem.coef_h[i]) + eta));
    sum_b += b[i];
  }
  if (!b.empty()) {
    r.comp_slack_b = std::abs(eta * (sum_b - 1.0));
    r.primal_gap_b = std::max(0.0, sum_b - 1.0);
  }
  double sum_f = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    r.max_stationarity_f = std::max(r.max_stationarity_f, std::abs(-u[i] / (f[i] * f[i]) + mu));
    sum_f += f[i];
  }
  if (!u.empty()) {
    r.comp_slack_f = std::abs(mu * (sum_f - 1.0));
    r.primal_gap_f = std::max(0.0, sum_f - 1.0);
  }
  return r;
}

namespace {

BandwidthProblem problem_from_members(const std::vector<CommMember>& members) {
  BandwidthProblem p;
  p.coef_o.reserve(members.size());
  p.coef_h.reserve(members.size());
  for (const auto& m : members) {
    p.coef_o.push_back(m.coef_o);
    p.coef_h.push_back(m.coef_h);
  }
  return p;
}

}  // namespace

Allocation optimal_allocation(const Groups& groups, int num_cavs,
                              const std::vector<Task>& tasks, const ScenarioConfig& cfg,
                              bool parallel) {
  Allocation alloc = Allocation::absent(num_cavs);

  std::array<BandwidthSolution, kNumCommGroups> solutions;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int ki = 0; ki < kNumCommGroups; ++ki) {
    const auto& members = groups.comm[static_cast<std::size_t>(ki)];
    if (members.empty()) continue;
    solutions[static_cast<std::size_t>(ki)] =
        allocate_bandwidth(problem_from_members(members), cfg.solver);
  }
  for (int ki = 0; ki < kNumCommGroups; ++ki) {
    const auto& members = groups.comm[static_cast<std::size_t>(ki)];
    const auto& sol = solutions[static_cast<std::size_t>(ki)];
    for (std::size_t i = 0; i < members.size(); ++i)
      alloc.set_b(members[i].cav_id, static_cast<CommGroup>(ki), sol.b[i]);
  }

  auto split_server = [&](const std::vector<int>& members, double capacity) {
    if (members.empty()) return;
    std::vector<double> u(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      u[i] = tasks[static_cast<std::size_t>(members[i])].workload_cycles() / capacity;
    const auto f = allocate_computing(u);
    for (std::size_t i = 0; i < members.size(); ++i) alloc.set_f(members[i], f[i]);
  };
  split_server(groups.comp_haps, cfg.f_haps_cps);
  for (const auto& members : groups.comp_rsu) split_server(members, cfg.f_rsu_cps);
  return alloc;
}

std::vector<BandwidthSolution> solve_bandwidth_batch(std::span<const BandwidthProblem> problems,
                                                     const SolverParams& params, bool parallel) {
  std::vector<BandwidthSolution> out(problems.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(problems.size()); ++i)
    out[static_cast<std::size_t>(i)] = allocate_bandwidth(problems[static_cast<std::size_t>(i)], params);
  return out;
}

}  // namespace hapsim
