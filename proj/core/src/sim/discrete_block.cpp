#include "modeshift/sim/discrete_block.hpp"

#include <cmath>

#include "modeshift/error.hpp"
#include "modeshift/tfcore/state_space.hpp"

namespace modeshift::sim {

DiscreteBlock::DiscreteBlock(const tf::RationalTF& tf, double Ts, std::optional<double> prewarp)
    : Ts_(Ts), prewarp_(prewarp) {
  if (!(Ts > 0.0)) throw Error(ErrorCode::InvalidParams, "sample time must be positive");
  Teff_ = Ts;
  if (prewarp && *prewarp > 0.0) Teff_ = 2.0 * std::tan(*prewarp * Ts / 2.0) / *prewarp;
  const tf::StateSpace ss = tf::to_state_space(tf);
  n_ = ss.states();
  x_.assign(static_cast<size_t>(n_), 0.0);
  scratch_.assign(static_cast<size_t>(n_), 0.0);
  build(tf);
}

void DiscreteBlock::build(const tf::RationalTF& tf) {
  const tf::StateSpace ss = tf::to_state_space(tf);
  if (ss.states() != n_) throw Error(ErrorCode::InvalidParams, "retune may not change block order");
  const auto n = static_cast<Eigen::Index>(n_);
  D_ = ss.D(0, 0);
  C_.assign(static_cast<size_t>(n_), 0.0);
  Ad_.assign(static_cast<size_t>(n_ * n_), 0.0);
  Bd_.assign(static_cast<size_t>(n_), 0.0);
  Ac_.assign(static_cast<size_t>(n_ * n_), 0.0);
  Bc_.assign(static_cast<size_t>(n_), 0.0);
  if (n_ == 0) return;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd lhs = I - ss.A * (Teff_ / 2.0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) throw Error(ErrorCode::BilinearSingularity, "continuous pole at 2/Ts");
  const Eigen::MatrixXd Ad = lu.solve(I + ss.A * (Teff_ / 2.0));
  const Eigen::MatrixXd Bd = lu.solve(ss.B * (Teff_ / 2.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    C_[i] = ss.C(0, i);
    Bd_[i] = Bd(i, 0);
    Bc_[i] = ss.B(i, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      Ad_[i * n + j] = Ad(i, j);
      Ac_[i * n + j] = ss.A(i, j);
    }
  }
}

void DiscreteBlock::retune(const tf::RationalTF& tf) { build(tf); }

void DiscreteBlock::advance(double u, std::vector<double>& out) const {
  const double uu = u_prev_ + u;
  for (int i = 0; i < n_; ++i) {
    double acc = Bd_[i] * uu;
    for (int j = 0; j < n_; ++j) acc += Ad_[i * n_ + j] * x_[j];
    out[i] = acc;
  }
}

double DiscreteBlock::step(double u) {
  advance(u, scratch_);
  x_.swap(scratch_);
  u_prev_ = u;
  double y = D_ * u;
  for (int i = 0; i < n_; ++i) y += C_[i] * x_[i];
  return y;
}

double DiscreteBlock::peek(double u) const {
  advance(u, scratch_);
  double y = D_ * u;
  for (int i = 0; i < n_; ++i) y += C_[i] * scratch_[i];
  return y;
}

void DiscreteBlock::commit_hold(double u) { u_prev_ = u; }

void DiscreteBlock::reset(double u_hold) {
  std::fill(x_.begin(), x_.end(), 0.0);
  u_prev_ = u_hold;
}

void DiscreteBlock::set_steady(double u) {
  u_prev_ = u;
  if (n_ == 0) return;
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd B(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    B(i) = Bc_[i];
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = Ac_[i * n + j];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {  // integrating block: no finite equilibrium unless u == 0
    std::fill(x_.begin(), x_.end(), 0.0);
    return;
  }
  const Eigen::VectorXd x = lu.solve(-B * u);
  for (Eigen::Index i = 0; i < n; ++i) x_[i] = x(i);
}

void DiscreteBlock::shift_output(double dy) {
  if (n_ != 1 || C_[0] == 0.0) throw Error(ErrorCode::InvalidParams, "shift_output needs a first-order block");
  x_[0] += dy / C_[0];
}

bool DiscreteBlock::finite() const {
  for (double v : x_)
    if (!std::isfinite(v)) return false;
  return std::isfinite(u_prev_);
}

BlockChain::BlockChain(const std::vector<tf::RationalTF>& parts, double Ts,
                       const std::vector<std::optional<double>>& prewarp) {
  blocks_.reserve(parts.size());
  for (size_t i = 0; i < parts.size(); ++i)
    blocks_.emplace_back(parts[i], Ts, i < prewarp.size() ? prewarp[i] : std::nullopt);
}

double BlockChain::step(double u) {
  for (auto& b : blocks_) u = b.step(u);
  return u;
}

bool BlockChain::finite() const {
  for (const auto& b : blocks_)
    if (!b.finite()) return false;
  return true;
}

}  // namespace modeshift::sim
