#include "hapsim/net.hpp"

#include <cmath>

namespace hapsim {
namespace {

MatrixXd sigmoid(const MatrixXd& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix(); }

}  // namespace

NetShape NetShape::make(int input, int hidden, int actions, bool recurrent) {
  NetShape s;
  s.input = input;
  s.hidden = hidden;
  s.actions = actions;
  s.recurrent = recurrent;
  int o = 0;
  auto next = [&o](int n) {
    const int at = o;
    o += n;
    return at;
  };
  s.fc_w = next(input * hidden);
  s.fc_b = next(hidden);
  if (recurrent) {
    s.wz = next(hidden * hidden);
    s.uz = next(hidden * hidden);
    s.bz = next(hidden);
    s.wr = next(hidden * hidden);
    s.ur = next(hidden * hidden);
    s.br = next(hidden);
    s.wh = next(hidden * hidden);
    s.uh = next(hidden * hidden);
    s.bh = next(hidden);
  } else {
    s.ff_w = next(hidden * hidden);
    s.ff_b = next(hidden);
  }
  s.head_w = next(hidden * actions);
  s.head_b = next(actions);
  s.count = o;
  return s;
}

NetView::NetView(double* p, const NetShape& s)
    : fc_w(p + s.fc_w, s.input, s.hidden),
      fc_b(p + s.fc_b, s.hidden),
      wz(p + s.wz, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      uz(p + s.uz, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      bz(p + s.bz, s.recurrent ? s.hidden : 0),
      wr(p + s.wr, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      ur(p + s.ur, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      br(p + s.br, s.recurrent ? s.hidden : 0),
      wh(p + s.wh, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      uh(p + s.uh, s.recurrent ? s.hidden : 0, s.recurrent ? s.hidden : 0),
      bh(p + s.bh, s.recurrent ? s.hidden : 0),
      ff_w(p + s.ff_w, s.recurrent ? 0 : s.hidden, s.recurrent ? 0 : s.hidden),
      ff_b(p + s.ff_b, s.recurrent ? 0 : s.hidden),
      head_w(p + s.head_w, s.hidden, s.actions),
      head_b(p + s.head_b, s.actions) {}

VectorXd init_params(const NetShape& shape, Rng& rng) {
  VectorXd theta(shape.count);
  NetView v(theta.data(), shape);
  auto fill = [&rng](auto&& m, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  };
  fill(v.fc_w, shape.input);
  fill(v.fc_b, shape.input);
  if (shape.recurrent) {
    for (auto* m : {&v.wz, &v.uz, &v.wr, &v.ur, &v.wh, &v.uh}) fill(*m, shape.hidden);
    for (auto* b : {&v.bz, &v.br, &v.bh}) fill(*b, shape.hidden);
  } else {
    fill(v.ff_w, shape.hidden);
    fill(v.ff_b, shape.hidden);
  }
  fill(v.head_w, shape.hidden);
  fill(v.head_b, shape.hidden);
  return theta;
}

void forward_sequence(const NetShape& shape, const VectorXd& params,
                      const std::vector<MatrixXd>& inputs, SeqActs& acts) {
  NetView v(const_cast<double*>(params.data()), shape);
  const int steps = static_cast<int>(inputs.size());
  const auto rows = inputs.empty() ? 0 : inputs[0].rows();
  acts.x = inputs;
  acts.h1.resize(static_cast<std::size_t>(steps));
  acts.hs.resize(static_cast<std::size_t>(steps));
  if (shape.recurrent) {
    acts.z.resize(static_cast<std::size_t>(steps));
    acts.r.resize(static_cast<std::size_t>(steps));
    acts.c.resize(static_cast<std::size_t>(steps));
  } else {
    acts.z.clear();
    acts.r.clear();
    acts.c.clear();
  }

  MatrixXd h_prev = MatrixXd::Zero(rows, shape.hidden);
  for (int t = 0; t < steps; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    acts.h1[ti] = ((acts.x[ti] * v.fc_w).rowwise() + v.fc_b).cwiseMax(0.0);
    if (shape.recurrent) {
      const MatrixXd& h1 = acts.h1[ti];
      acts.z[ti] = sigmoid((h1 * v.wz + h_prev * v.uz).rowwise() + v.bz);
      acts.r[ti] = sigmoid((h1 * v.wr + h_prev * v.ur).rowwise() + v.br);
      const MatrixXd rh = acts.r[ti].cwiseProduct(h_prev);
      acts.c[ti] = ((h1 * v.wh + rh * v.uh).rowwise() + v.bh).array().tanh();
      acts.hs[ti] = acts.z[ti].cwiseProduct(h_prev) +
                    (1.0 - acts.z[ti].array()).matrix().cwiseProduct(acts.c[ti]);
      h_prev = acts.hs[ti];
    } else {
      acts.hs[ti] = ((acts.h1[ti] * v.ff_w).rowwise() + v.ff_b).cwiseMax(0.0);
    }
  }
}

MatrixXd head_values(const NetShape& shape, const VectorXd& params, const MatrixXd& hs) {
  NetView v(const_cast<double*>(params.data()), shape);
  return (hs * v.head_w).rowwise() + v.head_b;
}

RowVectorXd forward_single(const NetShape& shape, const VectorXd& params, const RowVectorXd& input,
                           RecurrentState& state) {
  NetView v(const_cast<double*>(params.data()), shape);
  RowVectorXd h1 = ((input * v.fc_w) + v.fc_b).cwiseMax(0.0);
  RowVectorXd hs;
  if (shape.recurrent) {
    const RowVectorXd z = sigmoid((h1 * v.wz + state.h * v.uz) + v.bz);
    const RowVectorXd r = sigmoid((h1 * v.wr + state.h * v.ur) + v.br);
    const RowVectorXd c =
        ((h1 * v.wh + r.cwiseProduct(state.h) * v.uh) + v.bh).array().tanh();
    hs = z.cwiseProduct(state.h) + (1.0 - z.array()).matrix().cwiseProduct(c);
    state.h = hs;
  } else {
    hs = ((h1 * v.ff_w) + v.ff_b).cwiseMax(0.0);
  }
  return (hs * v.head_w) + v.head_b;
}

void backward_sequence(const NetShape& shape, const VectorXd& params, const SeqActs& acts,
                       const std::vector<MatrixXd>& dq, VectorXd& grad) {
  NetView v(const_cast<double*>(params.data()), shape);
  NetView g(grad.data(), shape);
  const int steps = acts.steps();
  const auto rows = steps > 0 ? acts.x[0].rows() : 0;

  const MatrixXd h_zero = MatrixXd::Zero(rows, shape.hidden);
  MatrixXd dh_next = h_zero;
  for (int t = steps - 1; t >= 0; --t) {
    const auto ti = static_cast<std::size_t>(t);
    // head
    MatrixXd dhs = dq[ti] * v.head_w.transpose();
    g.head_w.noalias() += acts.hs[ti].transpose() * dq[ti];
    g.head_b += dq[ti].colwise().sum();
    dhs += dh_next;

    MatrixXd dh1;
    if (shape.recurrent) {
      const MatrixXd& h_prev = t > 0 ? acts.hs[ti - 1] : h_zero;
      const MatrixXd& z = acts.z[ti];
      const MatrixXd& r = acts.r[ti];
      const MatrixXd& c = acts.c[ti];

      const MatrixXd dz = dhs.cwiseProduct(h_prev - c);
      const MatrixXd dc = dhs.cwiseProduct((1.0 - z.array()).matrix());
      MatrixXd dh_prev = dhs.cwiseProduct(z);

      const MatrixXd da_h = dc.cwiseProduct((1.0 - c.array().square()).matrix());
      g.wh.noalias() += acts.h1[ti].transpose() * da_h;
      g.uh.noalias() += r.cwiseProduct(h_prev).transpose() * da_h;
      g.bh += da_h.colwise().sum();
      const MatrixXd drh = da_h * v.uh.transpose();
      const MatrixXd dr = drh.cwiseProduct(h_prev);
      dh_prev += drh.cwiseProduct(r);

      const MatrixXd da_z = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
      const MatrixXd da_r = dr.cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
      g.wz.noalias() += acts.h1[ti].transpose() * da_z;
      g.uz.noalias() += h_prev.transpose() * da_z;
      g.bz += da_z.colwise().sum();
      g.wr.noalias() += acts.h1[ti].transpose() * da_r;
      g.ur.noalias() += h_prev.transpose() * da_r;
      g.br += da_r.colwise().sum();

      dh1 = da_z * v.wz.transpose() + da_r * v.wr.transpose() + da_h * v.wh.transpose();
      dh_prev += da_z * v.uz.transpose() + da_r * v.ur.transpose();
      dh_next = std::move(dh_prev);
    } else {
      const MatrixXd da2 =
          dhs.cwiseProduct((acts.hs[ti].array() > 0.0).cast<double>().matrix());
      g.ff_w.noalias() += acts.h1[ti].transpose() * da2;
      g.ff_b += da2.colwise().sum();
      dh1 = da2 * v.ff_w.transpose();
      dh_next.setZero();
    }

    const MatrixXd da1 = dh1.cwiseProduct((acts.h1[ti].array() > 0.0).cast<double>().matrix());
    g.fc_w.noalias() += acts.x[ti].transpose() * da1;
    g.fc_b += da1.colwise().sum();
  }
}

void Adam::step(VectorXd& theta, const VectorXd& grad) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  theta.array() -=
      lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace hapsim
