#include "waverec/detect.hpp"

#include <cmath>

#include "waverec/linop.hpp"

namespace waverec::detect {

using linop::eig_hermitian;
using linop::spectral_norm;

DetectionResult optimal_detect(const Matrix& c, const Matrix& e_in) {
  linop::require_hermitian(c, 1e-9);
  const int n = static_cast<int>(c.rows());
  Matrix e = e_in.size() ? e_in : Matrix::Identity(n, n);
  if (e.rows() != n) throw DimMismatch("support projector dims");
  double cnorm = std::max(spectral_norm(c), 1e-300);
  if (spectral_norm(c * e - c) > 1e-8 * cnorm)
    throw SupportViolation("CE != C");

  // |k_n| <= tol*||C|| counts as the null band E_0
  DetectionResult out;
  out.d_opt = linop::positive_projector(c);
  out.b_opt = linop::positive_part(c);
  out.kappa = linop::positive_trace(c);
  out.certificate = detect_certificate(c, out.d_opt, out.b_opt, e);
  return out;
}

Certificate detect_certificate(const Matrix& c, const Matrix& d, const Matrix& b,
                               const Matrix& e_in, double tol) {
  const int n = static_cast<int>(c.rows());
  Matrix e = e_in.size() ? e_in : Matrix::Identity(n, n);
  double scale = std::max(spectral_norm(c), 1e-300);
  auto min_eig = [](const Matrix& h) {
    auto es = eig_hermitian(((h + h.adjoint()) / 2.0).eval());
    return es.values.size() ? es.values.minCoeff() : 0.0;
  };
  if (min_eig(d) < -tol * scale) throw Inadmissible("D >= 0 violated");
  if (min_eig(e - d) < -tol * scale) throw Inadmissible("D <= E violated");
  if (min_eig(b) < -tol * scale) throw Inadmissible("B >= 0 violated");
  if (min_eig(b - c) < -tol * scale) throw Inadmissible("B >= C violated");

  Certificate cert;
  cert.add("B(E-D)", spectral_norm(b * (e - d)) / scale);
  cert.add("(B-C)D", spectral_norm((b - c) * d) / scale);
  cert.gap = (b * e).trace().real() - (c * d).trace().real();
  return cert;
}

CoherentPairResult coherent_pair_detect(const states::Amplitude& phi,
                                        const states::Amplitude& phi0) {
  if (!states::same_basis(phi.basis, phi0.basis))
    throw BasisMismatch("pair amplitudes in different bases");
  CoherentPairResult r;
  r.mu = phi.intensity();
  r.nu0 = phi0.intensity();
  if (r.mu <= 0.0 && r.nu0 <= 0.0) throw ZeroSignal("both amplitudes vanish");

  // psi_0 = phi0, psi_1 = phi0 + phi
  states::Amplitude psi1{phi.basis, phi0.coeffs + phi.coeffs};
  double nu1 = psi1.intensity();
  r.beta = phi0.inner(psi1);

  // kappa_+ = (nu1-nu0)/2 + sqrt(((nu1+nu0)/2)^2 - |beta|^2), the positive
  // root of the 2x2 secular equation on span{psi_0, psi_1}
  double half_diff = (nu1 - r.nu0) / 2.0;
  double half_sum = (nu1 + r.nu0) / 2.0;
  double disc = std::max(half_sum * half_sum - std::norm(r.beta), 0.0);
  r.kappa_plus = half_diff + std::sqrt(disc);

  // eigenvector of C = |psi1)(psi1| - |psi0)(psi0| for kappa_+ in the
  // non-orthogonal basis {psi0, psi1}: coefficients from (2x2 system)
  //   (nu0 + k) a0 + beta a1 = 0
  states::Amplitude chi{phi.basis, Vector::Zero(phi.coeffs.size())};
  if (r.kappa_plus > 1e-14 * std::max(nu1, r.nu0)) {
    Cplx a0, a1;
    if (std::abs(r.beta) > 1e-14 * std::max(nu1, r.nu0)) {
      a1 = 1.0;
      a0 = -r.beta / (r.nu0 + r.kappa_plus);
    } else {
      a0 = 0.0;
      a1 = 1.0;
    }
    chi.coeffs = a0 * phi0.coeffs + a1 * psi1.coeffs;
    double nn = chi.intensity();
    if (nn > 0) chi.coeffs /= std::sqrt(nn);
  }
  r.chi_plus = chi;

  auto rayleigh = [&](const states::Amplitude& x) {
    Cplx c1 = x.inner(psi1);
    Cplx c0 = x.inner(phi0);
    return std::norm(c1) - std::norm(c0);
  };
  if (r.mu > 0.0) {
    states::Amplitude chi0{phi.basis, phi.coeffs / std::sqrt(r.mu)};
    r.kappa_matched = rayleigh(chi0);
  }
  if (nu1 > 0.0) {
    states::Amplitude chi1{phi.basis, psi1.coeffs / std::sqrt(nu1)};
    r.kappa_resulting = rayleigh(chi1);
  }
  r.ratio = r.kappa_matched != 0.0
                ? r.kappa_plus / r.kappa_matched
                : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace waverec::detect
