#pragma once

#include <Eigen/Dense>
#include <optional>

#include "modeshift/tfcore/transfer_matrix.hpp"

namespace modeshift::tf {

struct StateSpace {
  Eigen::MatrixXd A, B, C, D;
  std::optional<double> sample_time;  // empty = continuous

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  bool is_discrete() const { return sample_time.has_value(); }

  // C (xI - A)^-1 B + D with x = s (continuous) or z (discrete).
  Eigen::MatrixXcd eval(cplx x) const;
  // Frequency response at omega rad/s: x = j omega or e^{j omega Ts}.
  Eigen::MatrixXcd at(double omega) const;
};

// Controllable canonical form; throws ImproperTF.
StateSpace to_state_space(const RationalTF& tf);
// Canonical realization per column followed by minimal_realization().
StateSpace to_state_space(const TransferMatrix2& tm);

// Restricts to the controllable, then the observable subspace. Subspaces are
// built by orthogonalized Krylov iteration; a direction is kept when its
// residual norm exceeds tol * max(1, ||A||) scale of the iterate.
StateSpace minimal_realization(const StateSpace& ss, double tol = 1e-10);

// Bilinear transform. With prewarp_omega the substitution is scaled so the
// discrete response matches the continuous one exactly at that frequency.
StateSpace discretize(const StateSpace& ss, double Ts,
                      std::optional<double> prewarp_omega = std::nullopt);

}  // namespace modeshift::tf
