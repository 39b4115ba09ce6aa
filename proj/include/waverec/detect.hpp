#ifndef WAVEREC_DETECT_HPP
#define WAVEREC_DETECT_HPP

#include "waverec/states.hpp"
#include "waverec/types.hpp"

namespace waverec::detect {

struct DetectionResult {
  Matrix d_opt;  // resolving quasifilter (minimal solution E_+)
  Matrix b_opt;  // dual operator C_+
  double kappa = 0.0;
  Certificate certificate;
};

/// Maximize <C, D> over 0 <= D <= E (defaults to E = I).
DetectionResult optimal_detect(const Matrix& c, const Matrix& e = Matrix());

/// Check a candidate primal/dual pair: admissibility, both optimality
/// residuals, and the duality gap Tr(BE) - Tr(CD).
Certificate detect_certificate(const Matrix& c, const Matrix& d, const Matrix& b,
                               const Matrix& e, double tol = 1e-8);

struct CoherentPairResult {
  double kappa_plus = 0.0;      // optimal degree of contrast
  states::Amplitude chi_plus;   // optimal filter mode in the input basis
  double kappa_matched = 0.0;   // matched filter chi_0 = phi/sqrt(mu)
  double kappa_resulting = 0.0; // resulting-mode filter chi_1 = psi_1/sqrt(nu_1)
  double ratio = 0.0;           // kappa_plus / kappa_matched
  double mu = 0.0;              // ||phi||^2
  double nu0 = 0.0;             // ||phi0||^2
  Cplx beta;                    // (psi_0|psi_1)
};

/// Detection of phi in the coherent superposition psi = phi + phi0:
/// everything computed from the 2x2 eigenproblem on span{psi_0, psi_1}.
CoherentPairResult coherent_pair_detect(const states::Amplitude& phi,
                                        const states::Amplitude& phi0);

}  // namespace waverec::detect

#endif
