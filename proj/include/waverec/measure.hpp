#ifndef WAVEREC_MEASURE_HPP
#define WAVEREC_MEASURE_HPP

#include <string>

#include "waverec/states.hpp"
#include "waverec/types.hpp"

namespace waverec::measure {

/// Positive operator-valued resolution of a support projector E.
struct Povm {
  std::vector<Matrix> elements;
  Matrix support;  // projector E; sum of elements ~= E
  std::vector<std::string> labels;

  int dim() const { return support.rows() > 0 ? int(support.rows()) : (elements.empty() ? 0 : int(elements[0].rows())); }
  int outcomes() const { return static_cast<int>(elements.size()); }
};

Povm make_complete_povm(std::vector<Matrix> elements);

struct PovmReport {
  double min_eig = 0.0;              // min eigenvalue over all elements
  double completeness_residual = 0.0;  // ||sum M_i - E||
  bool disjoint = false;             // M_i M_k = 0 for all i != k
  double max_cross_norm = 0.0;       // max ||M_i M_k||, i != k
};
PovmReport validate_povm(const Povm& m, double tol = 1e-9);

/// Halmos extension of a contraction 0 <= D <= I to an orthoprojector on H (+) H.
struct Dilation {
  Matrix embed;                 // isometry F, F^dag F = I
  std::vector<Matrix> projective;  // orthogonal projectors in the extended space
};

Dilation halmos_dilate(const Matrix& d, double tol = 1e-9);
/// Neumark dilation of an arbitrary complete POVM: H' = C^k (x) H,
/// F phi = sum_i e_i (x) sqrt(M_i) phi, E_i = |e_i)(e_i| (x) I.
Dilation povm_dilate(const Povm& m, double tol = 1e-9);
Povm neumark_reduce(const Dilation& dil, double tol = 1e-8);

/// Unitary on H (x) H' built from the Neumark isometry F:
/// U (phi (x) phi') = F*phi' (x) F phi + phi (x) (1 - F F*) phi'.
Matrix neumark_embedding_unitary(const Matrix& embed);

/// Reduce an indirect measurement: M_i = Tr_{H0}[(I (x) S0) U^dag (I (x) E0_i) U].
Povm indirect_povm(const Matrix& u, const Matrix& s0, const std::vector<Matrix>& e0,
                   int dim_sys, int dim_ref, double tol = 1e-9);

/// Discretized canonical (coherent) POVM: elements |alpha)(alpha| dlam.
Povm coherent_povm(int fock_dim, const states::AlphaGrid& grid);
/// Grid outcome values (alpha per element, in element order).
std::vector<Cplx> coherent_povm_outcomes(const states::AlphaGrid& grid);

}  // namespace waverec::measure

#endif
