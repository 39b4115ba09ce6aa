#ifndef WAVEREC_STATES_HPP
#define WAVEREC_STATES_HPP

#include <optional>
#include <variant>

#include "waverec/types.hpp"

namespace waverec::states {

/// Uniform coordinate grid q_i = origin + i*step, i = 0..points-1.
struct GridBasis {
  double origin = 0.0;
  double step = 1.0;
  int points = 0;
  bool operator==(const GridBasis&) const = default;
};

struct FockBasis {
  int dim = 0;
  bool operator==(const FockBasis&) const = default;
};

using Basis = std::variant<GridBasis, FockBasis>;

bool same_basis(const Basis& a, const Basis& b);
int basis_size(const Basis& b);

/// Complex signal vector with declared basis metadata.
struct Amplitude {
  Basis basis;
  Vector coeffs;

  double intensity() const;  // ||phi||^2, grid amplitudes quadrature-weighted
  Cplx inner(const Amplitude& other) const;  // (this|other), linear in other
};

struct DensityOperator {
  Basis basis;
  Matrix op;

  double total_intensity() const;  // Tr S, grid operators quadrature-weighted
};

/// Correlation matrix sigma_ik = (psi_i|psi_k).
using GramMatrix = Matrix;

Amplitude coherent_vector(Cplx alpha, int fock_dim);
/// Exact overlap exp{-|a'|^2/2 + a' a^dag - |a|^2/2} for canonical amplitudes.
Cplx coherent_overlap(const Vector& alpha, const Vector& alpha_prime);
Cplx coherent_overlap(Cplx alpha, Cplx alpha_prime);

GramMatrix gram_matrix(const std::vector<Amplitude>& amps);

DensityOperator mixture_density(const std::vector<Amplitude>& amps,
                                const std::vector<double>& weights);

/// Displaced thermal state with mean thermal occupation nbar, displacement
/// theta. max_tail is the accepted photon-number truncation loss; callers
/// integrating over a prior may budget the loss against the prior weight.
DensityOperator thermal_coherent_density(Cplx theta, double nbar, int fock_dim,
                                         double max_tail = 1e-9);

/// Truncated displacement operator exp(theta a^dag - conj(theta) a).
Matrix displacement_operator(Cplx theta, int fock_dim);
Matrix annihilation_operator(int fock_dim);
Matrix number_operator(int fock_dim);
/// Quadrature Q = (A + A^dag)/2, the "coordinate" with coherent-state variance 1/4.
Matrix quadrature_operator(int fock_dim);

Amplitude fourier_involution(const Amplitude& phi);

struct UncertaintyProduct {
  double sigma_q = 0.0;
  double sigma_p = 0.0;
  double product() const { return sigma_q * sigma_p; }
};
UncertaintyProduct uncertainty_product(const Amplitude& phi);

/// Gaussian amplitude matching the saturating wave packet, on its own grid.
Amplitude gaussian_amplitude(double mean_q, double mean_p, double sigma_q,
                             int points = 2048, double span_sigmas = 8.0);

struct AlphaGrid {
  double alpha_max = 5.0;
  int points_per_axis = 80;  // square grid on [-alpha_max, alpha_max]^2
};

/// k(alpha) = (alpha|S|alpha) on a square grid; row-major over (re, im).
struct HusimiField {
  AlphaGrid grid;
  Eigen::MatrixXd values;   // values(ix, iy), alpha = x + i y
  double integral = 0.0;    // sum k dlam, dlam = dx dy / pi
};
HusimiField husimi_density(const DensityOperator& s, const AlphaGrid& grid);

/// Tail mass P(N >= dim) of the photon distribution of a displaced thermal
/// state, via a Chernoff bound (exact generating function).
double displaced_thermal_tail(double abs_theta_sq, double nbar, int dim);

}  // namespace waverec::states

#endif
