#include "hapsim/marl.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hapsim {

// ---------------------------------------------------------------------------
// Env

Env::Env(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      zipf_(cfg.num_contents, cfg.zipf_exponent),
      rng_(make_rng(seed, 1)) {
  Rng lib_rng = make_rng(seed, 0);
  library_ = make_library(cfg_, lib_rng);
  obs_dim_ = cfg_.rl.content_onehot ? 5 + cfg_.num_contents : 6;
  reset();
}

void Env::reset() {
  cavs_ = initial_cavs(cfg_, rng_);
  caches_.assign(static_cast<std::size_t>(cfg_.num_rsus()), RsuCache(cfg_.cache_capacity_bits));
  slot_ = 0;
  resample_slot();
}

void Env::resample_slot() {
  tasks_ = sample_tasks(rng_, cfg_, zipf_);
  channels_ = sample_slot_channels(rng_, cavs_, cfg_);
}

MatrixXd Env::observations() const {
  MatrixXd obs(cfg_.num_cavs, obs_dim_);
  obs.setZero();
  const auto s_flags = current_cache_flags();
  const double eps_max = cfg_.max_task_input_bits();
  const double phi_max = cfg_.max_task_output_bits();
  const double dens_max = cfg_.max_task_density();
  for (int i = 0; i < cfg_.num_cavs; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& t = tasks_[idx];
    int col = 0;
    obs(i, col++) = cavs_[idx].position_m / cfg_.road_length_m;
    if (!cfg_.rl.content_onehot)
      obs(i, col++) = static_cast<double>(t.content_id) / cfg_.num_contents;
    obs(i, col++) = s_flags[idx] ? 1.0 : 0.0;
    obs(i, col++) = t.input_bits / eps_max;
    obs(i, col++) = t.output_bits / phi_max;
    obs(i, col++) = t.density_cpb / dens_max;
    if (cfg_.rl.content_onehot) obs(i, col + t.content_id - 1) = 1.0;
  }
  return obs;
}

DelayReport Env::evaluate(const JointDecision& decisions, AllocMode mode) const {
  const auto s = current_cache_flags();
  const Groups groups = build_groups(decisions, s, tasks_, cavs_, channels_, library_, cfg_);
  const Allocation alloc = mode == AllocMode::Equal
                               ? equal_allocation(groups, cfg_.num_cavs)
                               : optimal_allocation(groups, cfg_.num_cavs, tasks_, cfg_);
  return evaluate_delays(groups, alloc, tasks_, cfg_);
}

Env::StepOutcome Env::step(const std::vector<int>& actions) {
  const JointDecision decisions = JointDecision::from_actions(actions);
  StepOutcome out;
  out.report = evaluate(decisions, AllocMode::Equal);
  out.reward = delay_reward(out.report.total_s, cfg_.reward_scale());
  commit(decisions);
  out.done = done();
  return out;
}

void Env::commit(const JointDecision& decisions) {
  // end-of-slot caching at each CAV's current RSU
  std::vector<std::vector<std::pair<int, double>>> per_rsu(
      static_cast<std::size_t>(cfg_.num_rsus()));
  for (int i = 0; i < decisions.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!decisions.cache[idx]) continue;
    const auto& task = tasks_[idx];
    const double size = library_.size(task.content_id);
    if (size > cfg_.cache_capacity_bits) continue;  // can never fit; no-op
    per_rsu[static_cast<std::size_t>(cavs_[idx].associated_rsu)].push_back(
        {task.content_id, size});
  }
  for (std::size_t m = 0; m < per_rsu.size(); ++m)
    if (!per_rsu[m].empty()) caches_[m].apply_caching_decisions(per_rsu[m]);

  cavs_ = advance_mobility(cavs_, cfg_);
  ++slot_;
  resample_slot();
}

// ---------------------------------------------------------------------------
// Replay

double Episode::return_sum() const {
  double acc = 0.0;
  for (double r : rewards) acc += r;
  return acc;
}

void ReplayBuffer::push(Episode ep) {
  if (episodes_.size() == capacity_) episodes_.pop_front();
  episodes_.push_back(std::move(ep));
}

std::vector<std::size_t> ReplayBuffer::sample_indices(Rng& rng, std::size_t k) const {
  std::vector<std::size_t> idx(episodes_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(idx.size() - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

// ---------------------------------------------------------------------------
// Actor

ActionMask full_mask(int agents) {
  return ActionMask(static_cast<std::size_t>(agents), {true, true, true, true});
}

Actor::Actor(const NetShape& shape, const std::vector<VectorXd>& params, bool include_prev_action)
    : shape_(shape), params_(params), include_prev_action_(include_prev_action) {
  states_.resize(params.size());
  prev_actions_.assign(params.size(), -1);
  begin_episode();
}

void Actor::begin_episode() {
  for (auto& s : states_) s.reset(shape_.hidden);
  std::fill(prev_actions_.begin(), prev_actions_.end(), -1);
}

std::vector<int> Actor::act(const MatrixXd& obs, double epsilon, Rng& rng,
                            const ActionMask& mask) {
  const int agents = static_cast<int>(params_.size());
  std::vector<int> actions(static_cast<std::size_t>(agents));
  RowVectorXd input(shape_.input);
  for (int i = 0; i < agents; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    input.head(obs.cols()) = obs.row(i);
    if (include_prev_action_) {
      input.tail(kNumActions).setZero();
      if (prev_actions_[idx] >= 0) input(obs.cols() + prev_actions_[idx]) = 1.0;
    }
    const RowVectorXd q = forward_single(shape_, params_[idx], input, states_[idx]);

    const auto& feasible = mask[idx];
    int chosen = -1;
    if (rng.uniform() < epsilon) {
      int count = 0;
      for (bool ok : feasible) count += ok;
      int pick = rng.uniform_int(count);
      for (int a = 0; a < kNumActions; ++a) {
        if (!feasible[static_cast<std::size_t>(a)]) continue;
        if (pick-- == 0) {
          chosen = a;
          break;
        }
      }
    } else {
      double best = -1e300;
      for (int a = 0; a < kNumActions; ++a) {
        if (!feasible[static_cast<std::size_t>(a)]) continue;
        if (q(a) > best) {
          best = q(a);
          chosen = a;
        }
      }
    }
    actions[idx] = chosen;
    prev_actions_[idx] = chosen;
  }
  return actions;
}

// ---------------------------------------------------------------------------
// Checkpoint

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("checkpoint truncated");
  return v;
}

constexpr char kMagic[8] = {'H', 'A', 'P', 'S', 'N', 'E', 'T', '1'};

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  put<std::int32_t>(out, algo == "vdn" ? 0 : 1);
  put<std::int32_t>(out, agents);
  put<std::int32_t>(out, obs_dim);
  put<std::int32_t>(out, input_dim);
  put<std::int32_t>(out, hidden);
  put<std::uint8_t>(out, recurrent ? 1 : 0);
  put<std::uint8_t>(out, include_prev_action ? 1 : 0);
  put<std::uint8_t>(out, content_onehot ? 1 : 0);
  put<std::uint64_t>(out, cfg_hash);
  for (const auto& theta : params) {
    put<std::int32_t>(out, 1);  // rank
    put<std::int64_t>(out, static_cast<std::int64_t>(theta.size()));
    out.write(reinterpret_cast<const char*>(theta.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(theta.size())));
  }
  if (!out) throw ConfigError("failed writing checkpoint '" + path + "'");
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("'" + path + "' is not a checkpoint file");
  Checkpoint c;
  c.algo = take<std::int32_t>(in) == 0 ? "vdn" : "iql";
  c.agents = take<std::int32_t>(in);
  c.obs_dim = take<std::int32_t>(in);
  c.input_dim = take<std::int32_t>(in);
  c.hidden = take<std::int32_t>(in);
  c.recurrent = take<std::uint8_t>(in) != 0;
  c.include_prev_action = take<std::uint8_t>(in) != 0;
  c.content_onehot = take<std::uint8_t>(in) != 0;
  c.cfg_hash = take<std::uint64_t>(in);
  c.params.resize(static_cast<std::size_t>(c.agents));
  for (auto& theta : c.params) {
    const auto rank = take<std::int32_t>(in);
    if (rank != 1) throw ConfigError("unexpected tensor rank in checkpoint");
    const auto count = take<std::int64_t>(in);
    theta.resize(count);
    in.read(reinterpret_cast<char*>(theta.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(count)));
    if (!in) throw ConfigError("checkpoint truncated");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const ScenarioConfig& cfg, std::uint64_t seed, bool parallel)
    : cfg_(cfg),
      vdn_(cfg.rl.algo == "vdn"),
      parallel_(parallel),
      shape_(NetShape::make((cfg.rl.content_onehot ? 5 + cfg.num_contents : 6) +
                                (cfg.rl.include_prev_action ? kNumActions : 0),
                            cfg.rl.hidden_units, kNumActions, cfg.rl.recurrent)),
      env_(cfg, seed),
      rng_(make_rng(seed, 2)),
      buffer_(static_cast<std::size_t>(cfg.rl.buffer_episodes)) {
  params_.reserve(static_cast<std::size_t>(cfg.num_cavs));
  for (int i = 0; i < cfg.num_cavs; ++i) {
    Rng init = make_rng(seed, 100 + static_cast<std::uint64_t>(i));
    params_.push_back(init_params(shape_, init));
    optimizers_.emplace_back(cfg.rl.learning_rate, shape_.count);
  }
  target_params_ = params_;
}

double Trainer::epsilon() const {
  const auto& rl = cfg_.rl;
  const double frac =
      std::min(1.0, static_cast<double>(env_steps_) / std::max(1, rl.epsilon_decay_steps));
  return rl.epsilon_start + frac * (rl.epsilon_final - rl.epsilon_start);
}

Episode Trainer::rollout(double epsilon_override) {
  env_.reset();
  Actor actor(shape_, params_, cfg_.rl.include_prev_action);

  ActionMask mask = full_mask(cfg_.num_cavs);
  if (cfg_.f_haps_cps == 0.0)
    for (auto& m : mask) m[1] = false;

  Episode ep;
  ep.steps = cfg_.episode_slots;
  ep.agents = cfg_.num_cavs;
  ep.obs_dim = env_.obs_dim();
  ep.obs.resize(ep.steps + 1, ep.agents * ep.obs_dim);
  ep.actions.resize(static_cast<std::size_t>(ep.steps * ep.agents));
  ep.rewards.resize(static_cast<std::size_t>(ep.steps));

  for (int t = 0; t < ep.steps; ++t) {
    const MatrixXd obs = env_.observations();
    for (int i = 0; i < ep.agents; ++i)
      ep.obs.block(t, i * ep.obs_dim, 1, ep.obs_dim) = obs.row(i);
    const double eps = epsilon_override >= 0.0 ? epsilon_override : epsilon();
    const auto actions = actor.act(obs, eps, rng_, mask);
    for (int i = 0; i < ep.agents; ++i)
      ep.actions[static_cast<std::size_t>(t * ep.agents + i)] = actions[static_cast<std::size_t>(i)];
    const auto outcome = env_.step(actions);
    ep.rewards[static_cast<std::size_t>(t)] = outcome.reward;
    ++env_steps_;
  }
  const MatrixXd last = env_.observations();
  for (int i = 0; i < ep.agents; ++i)
    ep.obs.block(ep.steps, i * ep.obs_dim, 1, ep.obs_dim) = last.row(i);
  return ep;
}

namespace {

// Streaming forward over a sequence, returning per-step row maxima of the
// head output. Keeps only the running hidden state.
std::vector<VectorXd> stream_max_q(const NetShape& shape, const VectorXd& params,
                                   const std::vector<MatrixXd>& inputs) {
  NetView v(const_cast<double*>(params.data()), shape);
  const auto rows = inputs.empty() ? 0 : inputs[0].rows();
  std::vector<VectorXd> maxima(inputs.size());
  MatrixXd h_prev = MatrixXd::Zero(rows, shape.hidden);
  MatrixXd hs;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const MatrixXd h1 = ((inputs[t] * v.fc_w).rowwise() + v.fc_b).cwiseMax(0.0);
    if (shape.recurrent) {
      const MatrixXd z =
          (1.0 / (1.0 + (-((h1 * v.wz + h_prev * v.uz).rowwise() + v.bz).array()).exp())).matrix();
      const MatrixXd r =
          (1.0 / (1.0 + (-((h1 * v.wr + h_prev * v.ur).rowwise() + v.br).array()).exp())).matrix();
      const MatrixXd c =
          ((h1 * v.wh + r.cwiseProduct(h_prev) * v.uh).rowwise() + v.bh).array().tanh();
      hs = z.cwiseProduct(h_prev) + (1.0 - z.array()).matrix().cwiseProduct(c);
      h_prev = hs;
    } else {
      hs = ((h1 * v.ff_w).rowwise() + v.ff_b).cwiseMax(0.0);
    }
    const MatrixXd q = (hs * v.head_w).rowwise() + v.head_b;
    maxima[t] = q.rowwise().maxCoeff();
  }
  return maxima;
}

}  // namespace

double Trainer::loss_and_grads(const std::vector<const Episode*>& batch,
                               std::vector<VectorXd>* grads) {
  const int bsz = static_cast<int>(batch.size());
  if (bsz == 0) throw NumericalError("empty training batch");
  const int steps = batch[0]->steps;
  const int agents = cfg_.num_cavs;
  const int obs_dim = batch[0]->obs_dim;
  for (const auto* ep : batch)
    if (ep->steps != steps || ep->agents != agents || ep->obs_dim != obs_dim)
      throw NumericalError("batch mixes episode shapes");

  // chosen-action values of the online nets and next-step maxima of the
  // target nets, per agent
  std::vector<MatrixXd> chosen(static_cast<std::size_t>(agents));
  std::vector<MatrixXd> next_max(static_cast<std::size_t>(agents));

  auto assemble = [&](int agent, int t_begin, int t_count) {
    std::vector<MatrixXd> xs(static_cast<std::size_t>(t_count));
    for (int t = 0; t < t_count; ++t) {
      MatrixXd x(bsz, shape_.input);
      x.setZero();
      const int tt = t_begin + t;
      for (int b = 0; b < bsz; ++b) {
        const Episode& ep = *batch[static_cast<std::size_t>(b)];
        x.block(b, 0, 1, obs_dim) = ep.obs.block(tt, agent * obs_dim, 1, obs_dim);
        if (cfg_.rl.include_prev_action && tt > 0) {
          const int prev = ep.actions[static_cast<std::size_t>((tt - 1) * agents + agent)];
          x(b, obs_dim + prev) = 1.0;
        }
      }
      xs[static_cast<std::size_t>(t)] = std::move(x);
    }
    return xs;
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_)
#endif
  for (int i = 0; i < agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto xs = assemble(i, 0, steps);
    SeqActs acts;
    forward_sequence(shape_, params_[ii], xs, acts);
    MatrixXd ch(bsz, steps);
    for (int t = 0; t < steps; ++t) {
      const MatrixXd q = head_values(shape_, params_[ii], acts.hs[static_cast<std::size_t>(t)]);
      for (int b = 0; b < bsz; ++b) {
        const int a =
            batch[static_cast<std::size_t>(b)]->actions[static_cast<std::size_t>(t * agents + i)];
        ch(b, t) = q(b, a);
      }
    }
    chosen[ii] = std::move(ch);

    const auto xs_full = assemble(i, 0, steps + 1);
    const auto maxima = stream_max_q(shape_, target_params_[ii], xs_full);
    MatrixXd nm(bsz, steps);
    for (int t = 0; t < steps; ++t) nm.col(t) = maxima[static_cast<std::size_t>(t + 1)];
    next_max[ii] = std::move(nm);
  }

  // TD errors; the last step of an episode is terminal
  const double gamma = cfg_.rl.discount;
  const double scale = 1.0 / (static_cast<double>(bsz) * static_cast<double>(steps));
  double loss = 0.0;
  std::vector<MatrixXd> err(static_cast<std::size_t>(agents));
  if (vdn_) {
    MatrixXd q_tot = MatrixXd::Zero(bsz, steps);
    MatrixXd max_tot = MatrixXd::Zero(bsz, steps);
    for (int i = 0; i < agents; ++i) {
      q_tot += chosen[static_cast<std::size_t>(i)];
      max_tot += next_max[static_cast<std::size_t>(i)];
    }
    MatrixXd e(bsz, steps);
    for (int t = 0; t < steps; ++t) {
      const bool terminal = t == steps - 1;
      for (int b = 0; b < bsz; ++b) {
        const double r = batch[static_cast<std::size_t>(b)]->rewards[static_cast<std::size_t>(t)];
        const double y = terminal ? r : r + gamma * max_tot(b, t);
        e(b, t) = q_tot(b, t) - y;
      }
    }
    loss = e.array().square().sum() * scale;
    for (int i = 0; i < agents; ++i) err[static_cast<std::size_t>(i)] = e;
  } else {
    for (int i = 0; i < agents; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      MatrixXd e(bsz, steps);
      for (int t = 0; t < steps; ++t) {
        const bool terminal = t == steps - 1;
        for (int b = 0; b < bsz; ++b) {
          const double r = batch[static_cast<std::size_t>(b)]->rewards[static_cast<std::size_t>(t)];
          const double y = terminal ? r : r + gamma * next_max[ii](b, t);
          e(b, t) = chosen[ii](b, t) - y;
        }
      }
      loss += e.array().square().sum() * scale;
      err[ii] = std::move(e);
    }
    loss /= static_cast<double>(agents);
  }
  if (!std::isfinite(loss)) {
    std::string dump = "non-finite training loss; per-agent chosen-Q head values:";
    for (int i = 0; i < agents; ++i)
      dump += " agent" + std::to_string(i) + "=" +
              std::to_string(chosen[static_cast<std::size_t>(i)](0, 0));
    throw NumericalError(dump);
  }
  if (grads == nullptr) return loss;

  grads->assign(static_cast<std::size_t>(agents), VectorXd::Zero(shape_.count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_)
#endif
  for (int i = 0; i < agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto xs = assemble(i, 0, steps);
    SeqActs acts;
    forward_sequence(shape_, params_[ii], xs, acts);
    std::vector<MatrixXd> dq(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
      MatrixXd d = MatrixXd::Zero(bsz, kNumActions);
      for (int b = 0; b < bsz; ++b) {
        const int a =
            batch[static_cast<std::size_t>(b)]->actions[static_cast<std::size_t>(t * agents + i)];
        d(b, a) = 2.0 * err[ii](b, t) * scale;
      }
      dq[static_cast<std::size_t>(t)] = std::move(d);
    }
    backward_sequence(shape_, params_[ii], acts, dq, (*grads)[ii]);
  }
  return loss;
}

double Trainer::train_step() {
  const auto idx = buffer_.sample_indices(rng_, static_cast<std::size_t>(cfg_.rl.batch_episodes));
  std::vector<const Episode*> batch;
  batch.reserve(idx.size());
  for (auto i : idx) batch.push_back(&buffer_.at(i));

  std::vector<VectorXd> grads;
  const double loss = loss_and_grads(batch, &grads);
  for (std::size_t i = 0; i < params_.size(); ++i) optimizers_[i].step(params_[i], grads[i]);
  ++train_steps_;
  if (train_steps_ % cfg_.rl.target_update_steps == 0) sync_targets();
  return loss;
}

void Trainer::sync_targets() { target_params_ = params_; }

std::vector<TrainLogRow> Trainer::run() {
  std::vector<TrainLogRow> log;
  log.reserve(static_cast<std::size_t>(cfg_.rl.epochs));
  for (int epoch = 1; epoch <= cfg_.rl.epochs; ++epoch) {
    double reward_acc = 0.0;
    double loss_acc = 0.0;
    int loss_count = 0;
    for (int e = 0; e < cfg_.rl.episodes_per_epoch; ++e) {
      Episode ep = rollout(-1.0);
      reward_acc += ep.return_sum();
      buffer_.push(std::move(ep));
      if (buffer_.size() >= static_cast<std::size_t>(cfg_.rl.batch_episodes)) {
        for (int k = 0; k < cfg_.rl.train_steps_per_episode; ++k) {
          loss_acc += train_step();
          ++loss_count;
        }
      }
    }
    log.push_back({epoch, reward_acc / cfg_.rl.episodes_per_epoch,
                   loss_count > 0 ? loss_acc / loss_count : 0.0, epsilon()});
  }
  return log;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.algo = vdn_ ? "vdn" : "iql";
  c.agents = cfg_.num_cavs;
  c.obs_dim = env_.obs_dim();
  c.input_dim = shape_.input;
  c.hidden = shape_.hidden;
  c.recurrent = shape_.recurrent;
  c.include_prev_action = cfg_.rl.include_prev_action;
  c.content_onehot = cfg_.rl.content_onehot;
  c.cfg_hash = config_hash(cfg_);
  c.params = params_;
  return c;
}

}  // namespace hapsim
