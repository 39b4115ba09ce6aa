#ifndef WAVEREC_IDENTIFY_HPP
#define WAVEREC_IDENTIFY_HPP

#include "waverec/measure.hpp"
#include "waverec/states.hpp"
#include "waverec/types.hpp"

namespace waverec::identify {

struct Options {
  int max_iters = 500;
  double tol = 1e-9;  // certificate residual target
  // Newton polish / rank-2 geometric dispatch; disabled automatically when
  // max_iters < 50 so that a tiny cap forces a raw partial iterate
  bool allow_polish = true;
  // override of the default start mu_i = (sqrt(sigma)_ii)^2; the fixed point
  // is scale-attracting, so any positive multiple converges to the same limit
  RealVector initial_mu;

  bool polish_enabled() const { return allow_polish && max_iters >= 50; }
};

struct IdentifyResult {
  measure::Povm povm;        // decision operators D_i (signal space if no amplitudes)
  std::vector<double> mu;    // mu_i = Tr(S_i D_i); kappa = sum
  Matrix l_opt;              // dual operator L^o (same space as the POVM)
  double kappa = 0.0;
  Certificate certificate;
  int iterations = 0;
  bool converged = false;
  double lost_intensity = 0.0;  // Tr sigma - kappa
  RealVector sigma_eigenvalues; // filled by cyclic_solve
};

/// Solve the identification fixed point on a Gram matrix; the decision
/// operators are returned in the m-dimensional signal space.
IdentifyResult solve_identification(const Matrix& sigma, const Options& opts = {});
IdentifyResult solve_identification(const std::vector<states::Amplitude>& amps,
                                    const Options& opts = {});

/// Block variant for mixed patterns H_i (rank > 1): sigma is the block Gram
/// [H_i H_k^dag] with block sizes given per pattern.
IdentifyResult solve_identification_blocks(const Matrix& sigma,
                                           const std::vector<int>& block_sizes,
                                           const Options& opts = {});

/// Square-root measurement when h = sqrt(sigma) is equidiagonal.
IdentifyResult srm_equidiagonal(const Matrix& sigma, double tol = 1e-8);
IdentifyResult srm_equidiagonal(const std::vector<states::Amplitude>& amps,
                                double tol = 1e-8);

/// kappa = (nu/m) ((m-1) sqrt(1-gamma) + sqrt(1+(m-1) gamma))^2.
double equiangular_closed_form(int m, double nu, double gamma);
Matrix equiangular_gram(int m, double nu, double gamma);
/// Explicit amplitudes psi_i = phi_0 + phi_i realizing the equiangular Gram.
std::vector<states::Amplitude> equiangular_amplitudes(int m, double nu, double gamma);

/// Circulant Gram sigma_ik = sigma(i-k): Fourier diagonalization route.
IdentifyResult cyclic_solve(const Vector& sigma_row, double tol = 1e-9);

/// Canonical phase POVM: elements (1/N)|chi_x)(chi_x|, chi_x = sum_n e^{2pi j x n}|n).
measure::Povm phase_povm(int fock_dim, int n_points);
/// Outcome distribution of the phase POVM on a state.
RealVector phase_distribution(const measure::Povm& povm, const Matrix& s);

}  // namespace waverec::identify

#endif
