#pragma once

#include <vector>

#include "modeshift/tfcore/polynomial.hpp"

namespace modeshift::tf {

// num(s)/den(s). Arithmetic never cancels common roots; use cancel().
class RationalTF {
 public:
  RationalTF() : num_(), den_(Polynomial::constant(1.0)) {}
  RationalTF(Polynomial num, Polynomial den);

  static RationalTF constant(double k);
  static RationalTF s();
  // k / s
  static RationalTF integrator(double k = 1.0);

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }

  // Throws EvaluationAtPole when den(s) vanishes relative to its scale.
  cplx operator()(cplx s) const;
  cplx at(double omega) const { return (*this)(cplx(0.0, omega)); }

  int relative_degree() const noexcept;
  bool is_proper() const noexcept { return num_.is_zero() || relative_degree() >= 0; }
  bool is_strictly_proper() const noexcept { return num_.is_zero() || relative_degree() > 0; }
  bool is_zero() const noexcept { return num_.is_zero(); }

  std::vector<cplx> poles() const { return den_.roots(); }
  std::vector<cplx> zeros() const { return num_.roots(); }
  int origin_poles() const noexcept { return den_.origin_multiplicity(); }
  int origin_zeros() const noexcept { return num_.is_zero() ? 0 : num_.origin_multiplicity(); }

  // Remove pole/zero pairs closer than tol * max(1, |root|).
  RationalTF cancel(double tol = 1e-8) const;
  RationalTF inverse() const;

  RationalTF operator-() const { return {-num_, den_}; }
  friend RationalTF operator+(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator-(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator*(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator/(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator*(double k, const RationalTF& a) { return {k * a.num_, a.den_}; }
  friend RationalTF operator*(const RationalTF& a, double k) { return k * a; }

 private:
  Polynomial num_;
  Polynomial den_;
};

enum class TfOp { Add, Sub, Mul, Div };
RationalTF tf_arith(const RationalTF& a, const RationalTF& b, TfOp op);

// Product of (s + z_i) over (s + p_i) scaled by k; shorthand for the
// factored controller forms.
RationalTF zpk_real(double k, std::initializer_list<double> zeros_at_minus,
                    std::initializer_list<double> poles_at_minus);

}  // namespace modeshift::tf
