#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "hapsim/allocsolver.hpp"
#include "hapsim/net.hpp"

namespace hapsim {

inline constexpr int kNumActions = 4;  // local, HAPS, RSU, RSU-and-cache

// Decision-slot environment. Env randomness (positions, tasks, fading,
// library) is decision-independent, so paired scheme comparisons on the same
// (config, seed) see identical streams.
class Env {
 public:
  Env(const ScenarioConfig& cfg, std::uint64_t seed);

  void reset();

  int obs_dim() const { return obs_dim_; }
  // One row per agent: position, content index (scalar or one-hot), cache
  // flag, input volume, output volume, density -- all normalized.
  MatrixXd observations() const;

  struct StepOutcome {
    double reward = 0.0;
    bool done = false;
    DelayReport report;
  };

  // Training-time step: equal allocation, sigmoid team reward, then caching,
  // mobility and resampling. All actions are feasible; a caching decision
  // whose content cannot fit the store at all degrades to no caching.
  StepOutcome step(const std::vector<int>& actions);

  // Pure evaluation of candidate decisions against the current slot.
  DelayReport evaluate(const JointDecision& decisions, AllocMode mode) const;

  // Applies caching decisions and advances to the next slot.
  void commit(const JointDecision& decisions);

  bool done() const { return slot_ >= cfg_.episode_slots; }
  int slot() const { return slot_; }
  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<CavState>& cavs() const { return cavs_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<RsuCache>& caches() const { return caches_; }
  const ContentLibrary& library() const { return library_; }
  std::vector<std::uint8_t> current_cache_flags() const {
    return cache_flags(cavs_, tasks_, caches_);
  }

 private:
  void resample_slot();

  ScenarioConfig cfg_;
  ContentLibrary library_;
  ZipfSampler zipf_;
  Rng rng_;
  int slot_ = 0;
  int obs_dim_ = 0;
  std::vector<CavState> cavs_;
  std::vector<Task> tasks_;
  std::vector<RsuCache> caches_;
  SlotChannels channels_;
};

// One stored episode: observations for slots 0..T (row t concatenates all
// agents), actions and team rewards for slots 0..T-1.
struct Episode {
  MatrixXd obs;                 // (T+1) x (I * obs_dim)
  std::vector<int> actions;     // T * I, agent-major within a step
  std::vector<double> rewards;  // T
  int steps = 0;
  int agents = 0;
  int obs_dim = 0;

  double return_sum() const;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}
  void push(Episode ep);
  std::size_t size() const { return episodes_.size(); }
  const Episode& at(std::size_t i) const { return episodes_[i]; }
  // Uniform sample of k distinct episode indices.
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t k) const;

 private:
  std::size_t capacity_;
  std::deque<Episode> episodes_;
};

using ActionMask = std::vector<std::array<bool, kNumActions>>;  // per agent

ActionMask full_mask(int agents);

// Greedy / epsilon-greedy execution over one episode; each agent sees only
// its own observation row and history.
class Actor {
 public:
  Actor(const NetShape& shape, const std::vector<VectorXd>& params, bool include_prev_action);
  void begin_episode();
  std::vector<int> act(const MatrixXd& obs, double epsilon, Rng& rng, const ActionMask& mask);

 private:
  const NetShape& shape_;
  const std::vector<VectorXd>& params_;
  bool include_prev_action_;
  std::vector<RecurrentState> states_;
  std::vector<int> prev_actions_;
};

struct Checkpoint {
  std::string algo;  // vdn | iql
  int agents = 0;
  int obs_dim = 0;
  int input_dim = 0;
  int hidden = 0;
  bool recurrent = true;
  bool include_prev_action = false;
  bool content_onehot = false;
  std::uint64_t cfg_hash = 0;
  std::vector<VectorXd> params;

  NetShape shape() const { return NetShape::make(input_dim, hidden, kNumActions, recurrent); }
  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

struct TrainLogRow {
  int epoch = 0;
  double mean_episode_reward = 0.0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
};

// Deep Q-learning over the joint decision problem with either summed team
// values (vdn) or fully independent learners (iql). Training is
// deterministic for a fixed (config, seed); the OpenMP path splits work per
// agent and reduces nothing across threads.
class Trainer {
 public:
  Trainer(const ScenarioConfig& cfg, std::uint64_t seed, bool parallel = true);

  std::vector<TrainLogRow> run();

  double train_step();  // one batch update; returns the loss
  Episode rollout(double epsilon);

  // Loss and gradients for an explicit batch against the current target
  // nets; used directly by the finite-difference check.
  double loss_and_grads(const std::vector<const Episode*>& batch, std::vector<VectorXd>* grads);

  const std::vector<VectorXd>& params() const { return params_; }
  std::vector<VectorXd>& mutable_params() { return params_; }
  void sync_targets();
  Checkpoint checkpoint() const;
  Env& env() { return env_; }
  long env_steps() const { return env_steps_; }
  double epsilon() const;

 private:
  ScenarioConfig cfg_;
  bool vdn_;
  bool parallel_;
  NetShape shape_;
  Env env_;
  Rng rng_;
  std::vector<VectorXd> params_;
  std::vector<VectorXd> target_params_;
  std::vector<Adam> optimizers_;
  ReplayBuffer buffer_;
  long env_steps_ = 0;
  long train_steps_ = 0;
};

}  // namespace hapsim
