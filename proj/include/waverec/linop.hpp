#ifndef WAVEREC_LINOP_HPP
#define WAVEREC_LINOP_HPP

#include "waverec/types.hpp"

namespace waverec::linop {

/// Eigendecomposition of a Hermitian operator, values sorted descending.
struct EigenSystem {
  RealVector values;  // descending
  Matrix vectors;     // orthonormal columns, vectors.col(k) <-> values(k)
};

double spectral_norm(const Matrix& a);
double frob_norm(const Matrix& a);

bool is_finite(const Matrix& a);
/// Relative Hermiticity defect ||H - H^dag|| / ||H||.
double hermiticity_defect(const Matrix& h);
void require_hermitian(const Matrix& h, double tol = 1e-12);
void require_square(const Matrix& h);

EigenSystem eig_hermitian(const Matrix& h);

/// Projector onto the eigenspaces with eigenvalue > tol*||H||.
Matrix positive_projector(const Matrix& h, double tol = kEigTol);
/// C_+ = sum_{k_n > 0} k_n |chi_n)(chi_n|.
Matrix positive_part(const Matrix& h, double tol = kEigTol);
/// Sum of positive eigenvalues.
double positive_trace(const Matrix& h, double tol = kEigTol);

Matrix sqrt_psd(const Matrix& p, double tol = kEigTol);
/// Moore-Penrose inverse restricted to the support of a PSD operator.
Matrix pinv_on_support(const Matrix& p, double tol = kEigTol);
/// Orthoprojector onto the support of a PSD operator.
Matrix support_projector(const Matrix& p, double tol = kEigTol);

Matrix tensor(const Matrix& a, const Matrix& b);
/// Trace out subsystem `which` (0 = first factor, 1 = second) of an operator
/// on a bipartite space with factor dimensions (dim_a, dim_b).
Matrix partial_trace(const Matrix& ab, int which, int dim_a, int dim_b);
/// Tr_{H_b}[(I (x) W) X]; reduces X on H_a (x) H_b weighted by W on H_b.
Matrix weighted_partial_trace(const Matrix& x, const Matrix& w, int dim_a, int dim_b);

/// Solve G S + S G = 2 B for Hermitian G, working in S's eigenbasis.
/// Blocks with s_i + s_j <= tol and |B_ij| <= tol get G_ij = 0 (minimal norm);
/// a nonnegligible B_ij on a null block raises SingularPair.
Matrix solve_anticommutator(const Matrix& s, const Matrix& b, double tol = 1e-10);

}  // namespace waverec::linop

#endif
