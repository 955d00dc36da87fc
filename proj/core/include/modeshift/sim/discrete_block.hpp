#pragma once

#include <optional>
#include <vector>

#include "modeshift/tfcore/rational_tf.hpp"

namespace modeshift::sim {

// SISO controller section run at a fixed sample time. The bilinear update
// is written as trapezoidal integration of the continuous controllable-
// canonical state, so x keeps its continuous meaning and survives a
// coefficient change (gain scheduling) unchanged.
class DiscreteBlock {
 public:
  DiscreteBlock() = default;
  DiscreteBlock(const tf::RationalTF& tf, double Ts, std::optional<double> prewarp = std::nullopt);

  // Replaces coefficients; state and held input are kept. The order must
  // not change.
  void retune(const tf::RationalTF& tf);

  double step(double u);
  // Output the block would produce for u without committing the update.
  double peek(double u) const;
  void commit_hold(double u);  // keep x, only remember u (integrator freeze)

  void reset(double u_hold = 0.0);
  // Sets x so the block sits at the equilibrium for a constant input u.
  void set_steady(double u);
  // First-order blocks only: moves x so the output changes by dy.
  void shift_output(double dy);

  int order() const { return n_; }
  const std::vector<double>& state() const { return x_; }
  bool finite() const;

 private:
  void build(const tf::RationalTF& tf);
  void advance(double u, std::vector<double>& x) const;

  int n_ = 0;
  double Ts_ = 0.0;
  std::optional<double> prewarp_;
  double Teff_ = 0.0;
  std::vector<double> Ad_, Bd_;  // x+ = Ad x + Bd (u_prev + u)
  std::vector<double> C_;
  double D_ = 0.0;
  std::vector<double> x_;
  mutable std::vector<double> scratch_;
  double u_prev_ = 0.0;
  // Continuous A, B kept for steady-state initialization.
  std::vector<double> Ac_, Bc_;
};

// Blocks applied in series.
class BlockChain {
 public:
  BlockChain() = default;
  BlockChain(const std::vector<tf::RationalTF>& parts, double Ts,
             const std::vector<std::optional<double>>& prewarp = {});
  double step(double u);
  DiscreteBlock& operator[](size_t i) { return blocks_[i]; }
  const DiscreteBlock& operator[](size_t i) const { return blocks_[i]; }
  size_t size() const { return blocks_.size(); }
  bool finite() const;

 private:
  std::vector<DiscreteBlock> blocks_;
};

}  // namespace modeshift::sim
