// Extraction of rational-arithmetic-free SOS certificates from a solved
// moment relaxation.  The dual matrices are floored to exact PSD and the
// polynomial identity
//   f - t = sum_b <Y_b, B_b(x)>   (modulo the binary ideal, if applicable)
// is re-derived symbolically; the certificate is accepted only when the
// coefficient norm of the defect survives a hard threshold.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "pmsos/relax.hpp"

namespace pmsos {

struct GramBlock {
  std::string name;
  std::string role;
  Eigen::MatrixXd gram;         // floored PSD factor weight (un-scaled)
  double min_eig_raw = 0.0;     // smallest eigenvalue before flooring
};

struct Certificate {
  bool ok = false;
  double bound = 0.0;           // certified lower bound, original scale
  double residual = 0.0;        // coefficient norm of the defect polynomial
  MultiPoly defect;             // f - bound - sum_b <Y_b, B_b>, reduced on
                                // binary domains
  std::vector<GramBlock> grams;
  std::string message;
};

namespace detail {

// Clamp the spectrum at zero; eigenvalues below the floor tolerance are
// dropped entirely so the reconstructed Gram is exactly PSD.
inline Eigen::MatrixXd floor_psd_matrix(const Eigen::MatrixXd& y,
                                        double floor_tol, double* min_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
  if (min_eig) *min_eig = es.eigenvalues().minCoeff();
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) < floor_tol) ev(i) = 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// reject_tol bounds the acceptable defect coefficient norm (original
// scale); floor_tol is the eigenvalue cutoff applied to the dual blocks.
inline Certificate extract_certificate(const Relaxation& rel,
                                       const SdpSolution& sol,
                                       double reject_tol = 1e-5,
                                       double floor_tol = 1e-9) {
  Certificate cert;
  if (!sol.usable()) {
    cert.message =
        "no certificate: solver status " + status_name(sol.status);
    cert.defect = MultiPoly(rel.meta.n);
    return cert;
  }
  const double obj_scale = rel.meta.obj_scale;
  const bool binary = rel.meta.domain == Domain::Binary;
  cert.bound = sol.dual_obj * obj_scale;

  // Defect accumulated at the solver's scale, then un-scaled once.
  MultiPoly defect = rel.objective_scaled;
  defect -= MultiPoly::constant(rel.meta.n, sol.dual_obj);
  for (size_t b = 0; b < rel.templates.size(); ++b) {
    const TemplateBlock& t = rel.templates[b];
    if (t.equality) continue;  // multiplier terms vanish modulo the ideal
    double min_eig = 0.0;
    Eigen::MatrixXd y =
        detail::floor_psd_matrix(sol.Y.at(b), floor_tol, &min_eig);
    for (int i = 0; i < t.size; ++i)
      for (int j = i; j < t.size; ++j) {
        const double w = (i == j ? 1.0 : 2.0) * y(i, j);
        if (w != 0.0) defect -= t.at(i, j) * w;
      }
    cert.grams.push_back({t.name, t.role, y * obj_scale, min_eig});
  }
  if (binary) defect = defect.reduce_binary();
  defect *= obj_scale;
  cert.defect = defect;
  cert.residual = defect.coef_norm();
  cert.ok = cert.residual <= reject_tol;
  if (!cert.ok)
    cert.message = "certificate rejected: defect coefficient norm " +
                   std::to_string(cert.residual) + " exceeds " +
                   std::to_string(reject_tol);
  return cert;
}

// Conservative pointwise guarantee carried by an accepted certificate:
// on the domain, f >= bound - margin with margin the defect norm (every
// monomial is bounded by 1 in absolute value on both supported domains).
inline double certified_margin(const Certificate& cert) {
  return cert.residual;
}

}  // namespace pmsos
