#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hapsim/rng.hpp"

namespace hapsim {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// Per-agent action-value network: linear layer + ReLU feeding either a GRU
// cell (history-dependent values) or a second ReLU layer (the feedforward
// ablation), then a linear head of one value per action. Parameters live in
// one flat vector so the optimizer, checkpoints and finite-difference checks
// all see the same storage.
struct NetShape {
  int input = 0;
  int hidden = 0;
  int actions = 4;
  bool recurrent = true;

  int fc_w = 0, fc_b = 0;
  int wz = 0, uz = 0, bz = 0, wr = 0, ur = 0, br = 0, wh = 0, uh = 0, bh = 0;
  int ff_w = 0, ff_b = 0;
  int head_w = 0, head_b = 0;
  int count = 0;

  static NetShape make(int input, int hidden, int actions, bool recurrent);
};

struct NetView {
  Eigen::Map<MatrixXd> fc_w;
  Eigen::Map<RowVectorXd> fc_b;
  Eigen::Map<MatrixXd> wz, uz;
  Eigen::Map<RowVectorXd> bz;
  Eigen::Map<MatrixXd> wr, ur;
  Eigen::Map<RowVectorXd> br;
  Eigen::Map<MatrixXd> wh, uh;
  Eigen::Map<RowVectorXd> bh;
  Eigen::Map<MatrixXd> ff_w;
  Eigen::Map<RowVectorXd> ff_b;
  Eigen::Map<MatrixXd> head_w;
  Eigen::Map<RowVectorXd> head_b;

  NetView(double* p, const NetShape& s);
};

VectorXd init_params(const NetShape& shape, Rng& rng);

// Stored activations of one forward pass over a whole sequence (batch rows).
struct SeqActs {
  std::vector<MatrixXd> x;   // inputs
  std::vector<MatrixXd> h1;  // ReLU(fc)
  std::vector<MatrixXd> z, r, c;  // GRU gates and candidate
  std::vector<MatrixXd> hs;  // per-step state fed to the head
  int steps() const { return static_cast<int>(x.size()); }
};

// Forward over a sequence, keeping what backward needs.
void forward_sequence(const NetShape& shape, const VectorXd& params,
                      const std::vector<MatrixXd>& inputs, SeqActs& acts);

// Q-values for one step given the head input.
MatrixXd head_values(const NetShape& shape, const VectorXd& params, const MatrixXd& hs);

// Single-row stateful forward for execution time.
struct RecurrentState {
  RowVectorXd h;
  void reset(int hidden) { h = RowVectorXd::Zero(hidden); }
};
RowVectorXd forward_single(const NetShape& shape, const VectorXd& params, const RowVectorXd& input,
                           RecurrentState& state);

// Backpropagation through the stored sequence. dq[t] holds dLoss/dQ at each
// step. Gradient is accumulated into grad (caller zeroes it).
void backward_sequence(const NetShape& shape, const VectorXd& params, const SeqActs& acts,
                       const std::vector<MatrixXd>& dq, VectorXd& grad);

struct Adam {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  VectorXd m, v;
  long t = 0;

  explicit Adam(double lr_, int count) : lr(lr_), m(VectorXd::Zero(count)), v(VectorXd::Zero(count)) {}
  void step(VectorXd& theta, const VectorXd& grad);
};

}  // namespace hapsim
