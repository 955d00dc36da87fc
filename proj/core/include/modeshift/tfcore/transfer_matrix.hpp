#pragma once

#include <Eigen/Core>
#include <array>
#include <utility>

#include "modeshift/tfcore/rational_tf.hpp"

namespace modeshift::tf {

using Mat2c = Eigen::Matrix2cd;

class TransferMatrix2 {
 public:
  TransferMatrix2();
  TransferMatrix2(RationalTF a11, RationalTF a12, RationalTF a21, RationalTF a22);

  static TransferMatrix2 identity();
  static TransferMatrix2 diag(RationalTF a, RationalTF b);

  const RationalTF& operator()(int r, int c) const { return e_[2 * r + c]; }
  RationalTF& operator()(int r, int c) { return e_[2 * r + c]; }

  Mat2c operator()(cplx s) const;
  Mat2c at(double omega) const { return (*this)(cplx(0.0, omega)); }

  RationalTF det() const;
  TransferMatrix2 diagonal() const;
  bool is_proper() const;

  friend TransferMatrix2 operator+(const TransferMatrix2& a, const TransferMatrix2& b);
  friend TransferMatrix2 operator-(const TransferMatrix2& a, const TransferMatrix2& b);
  friend TransferMatrix2 operator*(const TransferMatrix2& a, const TransferMatrix2& b);
  friend TransferMatrix2 operator*(const RationalTF& k, const TransferMatrix2& m);

 private:
  std::array<RationalTF, 4> e_;
};

// Adjugate over determinant; throws SingularMatrix when det is identically 0.
TransferMatrix2 tm2_inverse(const TransferMatrix2& m);

inline Mat2c eval_freq(const TransferMatrix2& m, double omega) { return m.at(omega); }
inline cplx eval_freq(const RationalTF& t, double omega) { return t.at(omega); }

// (sigma_max, sigma_min) of a complex 2x2 matrix.
std::pair<double, double> singular_values(const Mat2c& m);

}  // namespace modeshift::tf
