#include "modeshift/tfcore/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "modeshift/error.hpp"

namespace modeshift {

const char* to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::DivideByZeroTF: return "divide-by-zero-TF";
    case ErrorCode::SingularMatrix: return "singular-matrix";
    case ErrorCode::EvaluationAtPole: return "evaluation-at-pole";
    case ErrorCode::ImproperTF: return "improper-transfer-function";
    case ErrorCode::BilinearSingularity: return "bilinear-singularity";
    case ErrorCode::InvalidParams: return "invalid-params";
    case ErrorCode::SplitNotApplicable: return "split-not-applicable";
    case ErrorCode::ZeroVoltage: return "zero-voltage";
    case ErrorCode::NonGfmDesign: return "non-GFM-design-present";
    case ErrorCode::NumericalDivergence: return "numerical-divergence";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::UnknownLoop: return "unknown-loop-name";
    case ErrorCode::UnresolvablePath: return "unresolvable-path";
  }
  return "unknown";
}

namespace tf {

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { normalize(); }
Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) { normalize(); }

void Polynomial::normalize() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::monomial(int degree, double coeff) {
  std::vector<double> c(static_cast<size_t>(degree) + 1, 0.0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::s_plus(double a) { return Polynomial{a, 1.0}; }

Polynomial Polynomial::from_roots(std::span<const cplx> roots, double lead) {
  std::vector<cplx> c{cplx(lead)};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0));
    for (size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  std::vector<double> re(c.size());
  std::transform(c.begin(), c.end(), re.begin(), [](cplx z) { return z.real(); });
  return Polynomial(std::move(re));
}

double Polynomial::coeff(int k) const noexcept {
  return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<size_t>(k)] : 0.0;
}

double Polynomial::inf_norm() const noexcept {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

cplx Polynomial::operator()(cplx s) const noexcept {
  cplx acc(0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double Polynomial::operator()(double s) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double Polynomial::abs_scale(double s_mag) const noexcept {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s_mag + std::abs(*it);
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) throw Error(ErrorCode::DivideByZeroTF, "monic() of zero polynomial");
  return (1.0 / leading()) * *this;
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const double thr = rel_tol * inf_norm();
  std::vector<double> c = c_;
  while (!c.empty() && std::abs(c.back()) <= thr) c.pop_back();
  for (double& v : c)
    if (std::abs(v) <= thr) v = 0.0;
  return Polynomial(std::move(c));
}

int Polynomial::origin_multiplicity() const noexcept {
  int k = 0;
  while (k < static_cast<int>(c_.size()) && c_[static_cast<size_t>(k)] == 0.0) ++k;
  return k;
}

Polynomial Polynomial::strip_origin() const {
  const int k = origin_multiplicity();
  return Polynomial(std::vector<double>(c_.begin() + k, c_.end()));
}

std::vector<cplx> Polynomial::roots() const {
  std::vector<cplx> out;
  if (degree() < 1) return out;
  const int k0 = origin_multiplicity();
  out.assign(static_cast<size_t>(k0), cplx(0.0));
  const Polynomial p = strip_origin();
  const int n = p.degree();
  if (n < 1) return out;

  // Frequency scaling s = sigma x puts the roots near the unit circle, which
  // keeps the companion matrix well conditioned for SI-scaled coefficients.
  const double sigma = std::pow(std::abs(p.c_.front() / p.c_.back()), 1.0 / n);
  std::vector<double> q(static_cast<size_t>(n) + 1);
  double sk = 1.0;
  for (int k = 0; k <= n; ++k) {
    q[static_cast<size_t>(k)] = p.c_[static_cast<size_t>(k)] * sk;
    sk *= sigma;
  }
  const double lead = q.back();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -q[static_cast<size_t>(i)] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const Polynomial dp = p.derivative();
  for (int i = 0; i < n; ++i) {
    cplx r = es.eigenvalues()[i] * sigma;
    // Two Newton steps; accepted only if they reduce the residual.
    for (int it = 0; it < 2; ++it) {
      const cplx f = p(r), df = dp(r);
      if (std::abs(df) == 0.0) break;
      const cplx rn = r - f / df;
      if (std::abs(p(rn)) < std::abs(f)) r = rn; else break;
    }
    out.push_back(r);
  }
  return out;
}

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& p) {
  std::vector<double> c = p.c_;
  for (double& v : c) v *= k;
  return Polynomial(std::move(c));
}

int count_origin_roots(const Polynomial& p, double tol) {
  const int literal = p.origin_multiplicity();
  const auto rs = p.strip_origin().roots();
  double scale = 0.0;
  for (const cplx& r : rs) scale = std::max(scale, std::abs(r));
  int numeric = 0;
  for (const cplx& r : rs)
    if (std::abs(r) < tol * scale) ++numeric;
  return literal + numeric;
}

}  // namespace tf
}  // namespace modeshift
