#include <cmath>

#include "modeshift/analysis/analysis.hpp"
#include <Eigen/Dense>

#include "modeshift/error.hpp"

namespace modeshift::analysis {

using tf::Polynomial;

namespace {

RationalTF sensitivity(const RationalTF& K, const RationalTF& G) {
  const Polynomial d = K.den() * G.den();
  return {d, d + K.num() * G.num()};
}

}  // namespace

FactorizationResult factorize(const TransferMatrix2& KL, const TransferMatrix2& K_tilde,
                              const TransferMatrix2& GL, const std::vector<double>& grid) {
  FactorizationResult fr;
  const TransferMatrix2 GM = KL * GL;
  const TransferMatrix2 GMt = GM.diagonal();
  fr.S_tilde = TransferMatrix2::diag(sensitivity(K_tilde(0, 0), GMt(0, 0)),
                                     sensitivity(K_tilde(1, 1), GMt(1, 1)));
  fr.Gamma = tm2_inverse(GM) * GMt;

  const Mat2c I = Mat2c::Identity();
  const size_t n = grid.size();
  fr.omega = grid;
  fr.S.reserve(n);
  fr.S_tilde_w.reserve(n);
  fr.Gamma_w.reserve(n);
  fr.Xc.reserve(n);
  fr.epsilon.reserve(n);
  for (double w : grid) {
    const Mat2c gl = GL.at(w), kl = KL.at(w), kt = K_tilde.at(w);
    const Mat2c gm = kl * gl;
    const double det = std::abs(gm.determinant());
    if (!(det > 1e-14 * gm.squaredNorm()))
      throw Error(ErrorCode::SingularMatrix, "G_M singular at omega = " + std::to_string(w));
    Mat2c gmt = Mat2c::Zero();
    gmt(0, 0) = gm(0, 0);
    gmt(1, 1) = gm(1, 1);
    const Mat2c S = (I + kt * gm).inverse();
    Mat2c St = Mat2c::Zero();
    St(0, 0) = 1.0 / (1.0 + kt(0, 0) * gmt(0, 0));
    St(1, 1) = 1.0 / (1.0 + kt(1, 1) * gmt(1, 1));
    const Mat2c G = gm.inverse() * gmt;
    const Mat2c X = (I + St * (G - I)).inverse();
    const Mat2c K = kt * kl;
    const Mat2c T = K * gl * (I + K * gl).inverse();
    fr.max_residual = std::max(fr.max_residual, tf::singular_values(S - G * X * St).first / std::max(1.0, tf::singular_values(S).first));
    fr.max_st_residual = std::max(fr.max_st_residual, tf::singular_values(S + T - I).first);
    fr.epsilon.push_back(tf::singular_values(St).first * tf::singular_values(G - I).first);
    fr.S.push_back(S);
    fr.S_tilde_w.push_back(St);
    fr.Gamma_w.push_back(G);
    fr.Xc.push_back(X);
  }
  return fr;
}

std::vector<CouplingSample> coupling_bound(const FactorizationResult& fr) {
  std::vector<CouplingSample> out;
  out.reserve(fr.omega.size());
  const Mat2c I = Mat2c::Identity();
  for (size_t i = 0; i < fr.omega.size(); ++i) {
    const double e = fr.epsilon[i];
    const bool valid = e < 1.0;
    out.push_back({fr.omega[i], e, valid ? e / (1.0 - e) : std::numeric_limits<double>::infinity(),
                   tf::singular_values(fr.Xc[i] - I).first, valid});
  }
  return out;
}

ShaperConditioning shaper_conditioning(double phi1, double phi2, const plant::LineParams& line) {
  ShaperConditioning r;
  r.det_Xc_inf_formula = std::cos(phi1 - phi2) / (std::cos(phi1) * std::cos(phi2));
  const double ds = std::abs(std::sin(phi1 - phi2));
  r.kappa_formula = std::sqrt((1.0 + ds) / (1.0 - ds));

  const TransferMatrix2 KL = synth::make_KL_static(phi1, phi2);
  const TransferMatrix2 GL = plant::line_tf(line);
  // At high frequency S~ -> I and Xc -> Gamma^-1, whose determinant is
  // det(G_M) / (G_M11 G_M22).
  const double w_hi = 1e9 * line.omega0;
  const Mat2c gm_hi = KL.at(w_hi) * GL.at(w_hi);
  r.det_Xc_inf_numeric = (gm_hi.determinant() / (gm_hi(0, 0) * gm_hi(1, 1))).real();
  // The closed-form kappa refers to the rotation part of G_M(j0).
  const Mat2c gm0 = KL.at(0.0) * GL.at(0.0);
  const auto [smax, smin] = tf::singular_values(gm0);
  r.kappa_numeric = smax / smin;
  return r;
}

}  // namespace modeshift::analysis
