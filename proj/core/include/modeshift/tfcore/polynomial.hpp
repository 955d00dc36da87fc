#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace modeshift::tf {

using cplx = std::complex<double>;

// Dense real polynomial in s, coefficients in ascending powers.
// Exact trailing zeros are stripped on construction; the zero polynomial
// has no coefficients and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending);

  static Polynomial constant(double c);
  static Polynomial monomial(int degree, double coeff = 1.0);
  // s + a
  static Polynomial s_plus(double a);
  // Real polynomial with the given roots (conjugate pairs must be supplied
  // in pairs); imaginary round-off in the product is dropped.
  static Polynomial from_roots(std::span<const cplx> roots, double lead = 1.0);

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  std::span<const double> coeffs() const noexcept { return c_; }
  double coeff(int k) const noexcept;
  double leading() const noexcept { return c_.empty() ? 0.0 : c_.back(); }
  double inf_norm() const noexcept;

  cplx operator()(cplx s) const noexcept;
  double operator()(double s) const noexcept;
  // Sum of |c_k| |s|^k, the natural scale for round-off in Horner.
  double abs_scale(double s_mag) const noexcept;

  Polynomial derivative() const;
  Polynomial monic() const;
  // Drop high-order coefficients below rel_tol * inf_norm.
  Polynomial trimmed(double rel_tol) const;
  // Count of literal zero low-order coefficients.
  int origin_multiplicity() const noexcept;
  // p(s) / s^k for k = origin_multiplicity().
  Polynomial strip_origin() const;

  std::vector<cplx> roots() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& p);
  friend Polynomial operator*(const Polynomial& p, double k) { return k * p; }
  bool operator==(const Polynomial&) const = default;

 private:
  void normalize();
  std::vector<double> c_;
};

// Roots of p within tol * (largest root magnitude) of the origin, plus
// literal zero low-order coefficients.
int count_origin_roots(const Polynomial& p, double tol = 1e-9);

}  // namespace modeshift::tf
