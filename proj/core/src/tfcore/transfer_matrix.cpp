#include "modeshift/tfcore/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "modeshift/error.hpp"

namespace modeshift::tf {

TransferMatrix2::TransferMatrix2() = default;

TransferMatrix2::TransferMatrix2(RationalTF a11, RationalTF a12, RationalTF a21, RationalTF a22)
    : e_{std::move(a11), std::move(a12), std::move(a21), std::move(a22)} {}

TransferMatrix2 TransferMatrix2::identity() {
  return diag(RationalTF::constant(1.0), RationalTF::constant(1.0));
}

TransferMatrix2 TransferMatrix2::diag(RationalTF a, RationalTF b) {
  return {std::move(a), RationalTF(), RationalTF(), std::move(b)};
}

Mat2c TransferMatrix2::operator()(cplx s) const {
  Mat2c m;
  m << e_[0](s), e_[1](s), e_[2](s), e_[3](s);
  return m;
}

RationalTF TransferMatrix2::det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

TransferMatrix2 TransferMatrix2::diagonal() const { return diag(e_[0], e_[3]); }

bool TransferMatrix2::is_proper() const {
  return std::all_of(e_.begin(), e_.end(), [](const RationalTF& t) { return t.is_proper(); });
}

TransferMatrix2 operator+(const TransferMatrix2& a, const TransferMatrix2& b) {
  return {a.e_[0] + b.e_[0], a.e_[1] + b.e_[1], a.e_[2] + b.e_[2], a.e_[3] + b.e_[3]};
}

TransferMatrix2 operator-(const TransferMatrix2& a, const TransferMatrix2& b) {
  return {a.e_[0] - b.e_[0], a.e_[1] - b.e_[1], a.e_[2] - b.e_[2], a.e_[3] - b.e_[3]};
}

namespace {
// Skips the product when one factor is the zero TF so structural zeros keep
// small denominators.
RationalTF dot2(const RationalTF& a, const RationalTF& b, const RationalTF& c, const RationalTF& d) {
  const bool ab = !(a.is_zero() || b.is_zero());
  const bool cd = !(c.is_zero() || d.is_zero());
  if (ab && cd) return a * b + c * d;
  if (ab) return a * b;
  if (cd) return c * d;
  return RationalTF();
}
}  // namespace

TransferMatrix2 operator*(const TransferMatrix2& a, const TransferMatrix2& b) {
  return {dot2(a.e_[0], b.e_[0], a.e_[1], b.e_[2]), dot2(a.e_[0], b.e_[1], a.e_[1], b.e_[3]),
          dot2(a.e_[2], b.e_[0], a.e_[3], b.e_[2]), dot2(a.e_[2], b.e_[1], a.e_[3], b.e_[3])};
}

TransferMatrix2 operator*(const RationalTF& k, const TransferMatrix2& m) {
  auto mul = [&](const RationalTF& x) { return x.is_zero() ? x : k * x; };
  return {mul(m.e_[0]), mul(m.e_[1]), mul(m.e_[2]), mul(m.e_[3])};
}

TransferMatrix2 tm2_inverse(const TransferMatrix2& m) {
  const RationalTF p1 = m(0, 0) * m(1, 1);
  const RationalTF p2 = m(0, 1) * m(1, 0);
  // Cross-multiplied numerator, tested against the scale of its own terms so
  // cancellation noise is not mistaken for a nonzero determinant.
  const Polynomial a = p1.num() * p2.den(), b = p2.num() * p1.den();
  const Polynomial n = a - b;
  const double scale = std::max(a.inf_norm(), b.inf_norm());
  if (n.is_zero() || n.inf_norm() <= 1e-12 * scale)
    throw Error(ErrorCode::SingularMatrix, "transfer matrix determinant is identically zero");
  const RationalTF d(n, p1.den() * p2.den());
  const RationalTF inv_det = d.inverse();
  auto scaled = [&](const RationalTF& x) { return x.is_zero() ? x : x * inv_det; };
  return {scaled(m(1, 1)), scaled(-m(0, 1)), scaled(-m(1, 0)), scaled(m(0, 0))};
}

std::pair<double, double> singular_values(const Mat2c& m) {
  const double fro2 = m.squaredNorm();
  const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  const double smax = std::sqrt(0.5 * (fro2 + disc));
  const double smin = smax > 0.0 ? det / smax : 0.0;
  return {smax, smin};
}

}  // namespace modeshift::tf
