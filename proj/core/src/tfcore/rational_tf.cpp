#include "modeshift/tfcore/rational_tf.hpp"

#include <cmath>
#include <limits>

#include "modeshift/error.hpp"

namespace modeshift::tf {

RationalTF::RationalTF(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorCode::DivideByZeroTF, "rational TF with zero denominator");
}

RationalTF RationalTF::constant(double k) { return {Polynomial::constant(k), Polynomial::constant(1.0)}; }
RationalTF RationalTF::s() { return {Polynomial{0.0, 1.0}, Polynomial::constant(1.0)}; }
RationalTF RationalTF::integrator(double k) { return {Polynomial::constant(k), Polynomial{0.0, 1.0}}; }

cplx RationalTF::operator()(cplx s) const {
  const cplx d = den_(s);
  const double scale = den_.abs_scale(std::abs(s));
  if (std::abs(d) <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
    throw Error(ErrorCode::EvaluationAtPole, "transfer function evaluated at a pole");
  return num_(s) / d;
}

int RationalTF::relative_degree() const noexcept { return den_.degree() - num_.degree(); }

RationalTF RationalTF::cancel(double tol) const {
  if (num_.is_zero()) return {Polynomial{}, Polynomial::constant(1.0)};
  auto zs = num_.roots();
  auto ps = den_.roots();
  std::vector<bool> pole_used(ps.size(), false);
  std::vector<cplx> keep_z;
  for (const cplx& z : zs) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ps.size(); ++i) {
      if (pole_used[i]) continue;
      const double d = std::abs(z - ps[i]);
      if (d < best_d) { best_d = d; best = static_cast<int>(i); }
    }
    if (best >= 0 && best_d <= tol * std::max(1.0, std::abs(ps[static_cast<size_t>(best)])))
      pole_used[static_cast<size_t>(best)] = true;
    else
      keep_z.push_back(z);
  }
  std::vector<cplx> keep_p;
  for (size_t i = 0; i < ps.size(); ++i)
    if (!pole_used[i]) keep_p.push_back(ps[i]);
  return {Polynomial::from_roots(keep_z, num_.leading()), Polynomial::from_roots(keep_p, den_.leading())};
}

RationalTF RationalTF::inverse() const {
  if (num_.is_zero()) throw Error(ErrorCode::DivideByZeroTF, "inverse of zero transfer function");
  return {den_, num_};
}

RationalTF operator+(const RationalTF& a, const RationalTF& b) {
  if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalTF operator-(const RationalTF& a, const RationalTF& b) { return a + (-b); }

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalTF operator/(const RationalTF& a, const RationalTF& b) {
  if (b.num_.is_zero()) throw Error(ErrorCode::DivideByZeroTF, "division by the zero transfer function");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

RationalTF tf_arith(const RationalTF& a, const RationalTF& b, TfOp op) {
  switch (op) {
    case TfOp::Add: return a + b;
    case TfOp::Sub: return a - b;
    case TfOp::Mul: return a * b;
    case TfOp::Div: return a / b;
  }
  return a;
}

RationalTF zpk_real(double k, std::initializer_list<double> zeros_at_minus,
                    std::initializer_list<double> poles_at_minus) {
  Polynomial n = Polynomial::constant(k), d = Polynomial::constant(1.0);
  for (double z : zeros_at_minus) n = n * Polynomial::s_plus(z);
  for (double p : poles_at_minus) d = d * Polynomial::s_plus(p);
  return {n, d};
}

}  // namespace modeshift::tf
