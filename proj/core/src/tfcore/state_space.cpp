#include "modeshift/tfcore/state_space.hpp"

#include <cmath>
#include <vector>

#include "modeshift/error.hpp"

namespace modeshift::tf {

Eigen::MatrixXcd StateSpace::eval(cplx x) const {
  const int n = states();
  Eigen::MatrixXcd out = D.cast<cplx>();
  if (n == 0) return out;
  Eigen::MatrixXcd M = x * Eigen::MatrixXcd::Identity(n, n) - A.cast<cplx>();
  out += C.cast<cplx>() * M.partialPivLu().solve(B.cast<cplx>());
  return out;
}

Eigen::MatrixXcd StateSpace::at(double omega) const {
  if (sample_time) return eval(std::exp(cplx(0.0, omega * *sample_time)));
  return eval(cplx(0.0, omega));
}

namespace {

struct SisoPieces {
  Polynomial den_monic;
  double d = 0.0;
  std::vector<double> c;  // length deg(den)
};

// Splits num/den into d + r/den_monic with deg r < deg den.
SisoPieces split_proper(const Polynomial& num, const Polynomial& den) {
  if (num.degree() > den.degree()) throw Error(ErrorCode::ImproperTF, "improper transfer function");
  SisoPieces out;
  const double lead = den.leading();
  out.den_monic = (1.0 / lead) * den;
  const Polynomial nn = (1.0 / lead) * num;
  const int n = den.degree();
  out.d = nn.coeff(n);
  const Polynomial r = nn - out.d * out.den_monic;
  out.c.assign(static_cast<size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) out.c[static_cast<size_t>(k)] = r.coeff(k);
  return out;
}

void fill_companion(const Polynomial& den_monic, Eigen::Ref<Eigen::MatrixXd> A, Eigen::Ref<Eigen::VectorXd> B) {
  const int n = den_monic.degree();
  A.setZero();
  B.setZero();
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int k = 0; k < n; ++k) A(n - 1, k) = -den_monic.coeff(k);
  if (n > 0) B(n - 1) = 1.0;
}

// Orthonormal basis of the Krylov space spanned by (A, B).
Eigen::MatrixXd krylov_basis(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd V(n, 0);
  const double a_norm = std::max(A.norm(), 1e-300);
  const double b_norm = std::max(B.norm(), 1e-300);
  std::vector<Eigen::VectorXd> pending;
  std::vector<double> refs;
  for (int j = 0; j < B.cols(); ++j) { pending.push_back(B.col(j)); refs.push_back(b_norm); }
  while (!pending.empty() && V.cols() < n) {
    std::vector<Eigen::VectorXd> added;
    for (size_t i = 0; i < pending.size(); ++i) {
      Eigen::VectorXd w = pending[i];
      for (int pass = 0; pass < 2; ++pass)
        if (V.cols() > 0) w -= V * (V.transpose() * w);
      const double nw = w.norm();
      if (nw > tol * refs[i] && V.cols() < n) {
        V.conservativeResize(Eigen::NoChange, V.cols() + 1);
        V.col(V.cols() - 1) = w / nw;
        added.push_back(V.col(V.cols() - 1));
      }
    }
    pending.clear();
    refs.clear();
    for (const auto& v : added) { pending.push_back(A * v); refs.push_back(a_norm); }
  }
  return V;
}

}  // namespace

StateSpace to_state_space(const RationalTF& tf) {
  const SisoPieces p = split_proper(tf.num(), tf.den());
  const int n = p.den_monic.degree();
  StateSpace ss;
  ss.A.resize(n, n);
  Eigen::VectorXd b(n);
  fill_companion(p.den_monic, ss.A, b);
  ss.B = b;
  ss.C.resize(1, n);
  for (int k = 0; k < n; ++k) ss.C(0, k) = p.c[static_cast<size_t>(k)];
  ss.D = Eigen::MatrixXd::Constant(1, 1, p.d);
  return ss;
}

StateSpace to_state_space(const TransferMatrix2& tm) {
  if (!tm.is_proper()) throw Error(ErrorCode::ImproperTF, "improper transfer matrix entry");
  struct Column { Polynomial den; Polynomial num[2]; };
  std::vector<Column> cols;
  int total = 0;
  for (int j = 0; j < 2; ++j) {
    const RationalTF& e0 = tm(0, j);
    const RationalTF& e1 = tm(1, j);
    Column c;
    if (e0.is_zero() && e1.is_zero()) {
      c.den = Polynomial::constant(1.0);
    } else if (e0.is_zero()) {
      c.den = e1.den(); c.num[1] = e1.num();
    } else if (e1.is_zero() || e0.den() == e1.den()) {
      c.den = e0.den(); c.num[0] = e0.num(); c.num[1] = e1.num();
    } else {
      c.den = e0.den() * e1.den();
      c.num[0] = e0.num() * e1.den();
      c.num[1] = e1.num() * e0.den();
    }
    total += c.den.degree();
    cols.push_back(std::move(c));
  }
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(total, total);
  ss.B = Eigen::MatrixXd::Zero(total, 2);
  ss.C = Eigen::MatrixXd::Zero(2, total);
  ss.D = Eigen::MatrixXd::Zero(2, 2);
  int off = 0;
  for (int j = 0; j < 2; ++j) {
    const Column& c = cols[static_cast<size_t>(j)];
    const int n = c.den.degree();
    Eigen::VectorXd b(n);
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < 2; ++r) {
      const SisoPieces p = split_proper(c.num[r], c.den);
      if (r == 0) fill_companion(p.den_monic, a, b);
      ss.D(r, j) = p.d;
      for (int k = 0; k < n; ++k) ss.C(r, off + k) = p.c[static_cast<size_t>(k)];
    }
    ss.A.block(off, off, n, n) = a;
    ss.B.block(off, j, n, 1) = b;
    off += n;
  }
  return minimal_realization(ss);
}

StateSpace minimal_realization(const StateSpace& ss, double tol) {
  if (ss.states() == 0) return ss;
  const Eigen::MatrixXd Vc = krylov_basis(ss.A, ss.B, tol);
  StateSpace c{Vc.transpose() * ss.A * Vc, Vc.transpose() * ss.B, ss.C * Vc, ss.D, ss.sample_time};
  if (c.states() == 0) return c;
  const Eigen::MatrixXd Vo = krylov_basis(c.A.transpose(), c.C.transpose(), tol);
  return {Vo.transpose() * c.A * Vo, Vo.transpose() * c.B, c.C * Vo, c.D, c.sample_time};
}

StateSpace discretize(const StateSpace& ss, double Ts, std::optional<double> prewarp_omega) {
  if (ss.sample_time) throw Error(ErrorCode::InvalidParams, "discretize expects a continuous system");
  if (!(Ts > 0.0)) throw Error(ErrorCode::InvalidParams, "sample time must be positive");
  double T = Ts;
  if (prewarp_omega && *prewarp_omega > 0.0) {
    const double w = *prewarp_omega;
    if (w * Ts >= M_PI) throw Error(ErrorCode::InvalidParams, "prewarp frequency above Nyquist");
    T = 2.0 * std::tan(0.5 * w * Ts) / w;
  }
  const int n = ss.states();
  StateSpace out;
  out.sample_time = Ts;
  if (n == 0) {
    out = ss;
    out.sample_time = Ts;
    return out;
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Mi = I - 0.5 * T * ss.A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Mi);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12 * std::pow(Mi.norm(), n))
    throw Error(ErrorCode::BilinearSingularity, "continuous pole at 2/Ts");
  const Eigen::MatrixXd M = lu.inverse();
  out.A = M * (I + 0.5 * T * ss.A);
  out.B = T * M * ss.B;
  out.C = ss.C * M;
  out.D = ss.D + 0.5 * T * ss.C * M * ss.B;
  return out;
}

}  // namespace modeshift::tf
