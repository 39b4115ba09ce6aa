#ifndef WAVEREC_ESTIMATE_HPP
#define WAVEREC_ESTIMATE_HPP

#include <functional>

#include "waverec/measure.hpp"
#include "waverec/states.hpp"
#include "waverec/types.hpp"

namespace waverec::estimate {

enum class ParamKind { Real, Complex };

/// Differentiable family of density operators over real or complex parameters.
struct ParamFamily {
  std::function<Matrix(const RealVector&)> eval_real;
  std::function<Matrix(const Vector&)> eval_complex;
  int dim_params = 1;
  ParamKind kind = ParamKind::Real;
  Matrix generator;  // optional: x-hat for canonical/unitary families

  Matrix at_real(const RealVector& theta) const;
  Matrix at_complex(const Vector& alpha) const;
};

ParamFamily rotation_qubit_family(double bloch_radius, const Vec3& axis = Vec3(0, 0, 1));
ParamFamily coherent_displacement_family(int fock_dim);          // real theta, S = |theta)(theta|
ParamFamily coherent_complex_family(int fock_dim);               // complex alpha
ParamFamily thermal_coherent_family(double nbar, int fock_dim);  // complex theta
ParamFamily classical_binary_family();                            // diag(p(theta), 1-p(theta)), p = cos^2(theta/2)

struct BoundReport {
  Eigen::MatrixXd information;  // Fisher / G / H (real representation)
  Eigen::MatrixXd bound;        // D info^-1 D^dag
  std::vector<Matrix> log_derivatives;  // SLD g_i or RLD h_k operators

  /// min eig(R - bound) for a measured covariance R; >= -tol certifies the
  /// measurement respects the bound, ~0 means it is attained.
  double slack_min_eig(const Eigen::MatrixXd& covariance) const;
};

/// Classical Fisher bound of a fixed measurement (Jacobian defaults to I).
BoundReport classical_bound(const measure::Povm& m, const ParamFamily& family,
                            const RealVector& at, double fd_step = 1e-5);

/// Helstrom bound via symmetric logarithmic derivatives.
BoundReport sld_bound(const ParamFamily& family, const RealVector& at,
                      double fd_step = 1e-5);

/// Right bound via right logarithmic derivatives (complex parameters,
/// Wirtinger d/d(conj alpha) = (d/dx + j d/dy)/2).
BoundReport rld_bound(const ParamFamily& family, const Vector& at,
                      double fd_step = 1e-5);

struct CovarianceReport {
  Eigen::MatrixXd covariance;  // R^{ik} = sum (th_i - th_i0)(th_k - th_k0)^* mu
  RealVector bias;             // real part per parameter (complex flattened)
  double total_intensity = 0.0;
};

/// Covariance of an estimator over POVM outcomes on state S (real estimator).
CovarianceReport measurement_covariance(const measure::Povm& m,
                                        const std::vector<RealVector>& estimator,
                                        const Matrix& s, const RealVector& theta);
/// Complex-outcome variant, R = E (x - th)(x - th)^*.
CovarianceReport measurement_covariance_complex(const measure::Povm& m,
                                                const std::vector<Cplx>& estimator,
                                                const Matrix& s, Cplx theta);

struct EfficiencyReport {
  double attainment_slack = 0.0;    // min eig(R - bound), < tol means attained
  double right_eigen_residual = 0.0;  // max ||xhat M_o - x_o M_o||
  double gaussian_fit_residual = -1.0;  // log chi quadratic-fit residual, -1 if n/a
  bool attained = false;
};

EfficiencyReport efficiency_check(const ParamFamily& family, const measure::Povm& m,
                                  const std::vector<Cplx>& estimator, Cplx at,
                                  double tol = 1e-6);

struct UncertaintyReport {
  double product = 0.0;  // (2 pi)^2 R_theta * Var(x)
  double slack = 0.0;    // product - 1/4
  bool singular = false; // Var(x) ~ 0: relation vacuous
};

/// Check (2 pi)^2 R_theta >= (1/4) S^-1 for a unitary family e^{2pi j th x}.
UncertaintyReport uncertainty_check(const ParamFamily& family, const measure::Povm& m,
                                    const std::vector<RealVector>& estimator,
                                    double theta);

struct BayesResult {
  Matrix xhat;                  // operator solving xhat R0 + R0 xhat = 2 R1
  measure::Povm povm;           // spectral measurement of xhat
  RealVector estimator;         // outcome -> eigenvalue
  double sigma2 = 0.0;          // Tr(R2 - xhat R0 xhat)
  Certificate certificate;      // minorant residuals at sampled outcomes
};

/// Quadratic Bayesian estimation over a discrete prior on real theta.
BayesResult bayes_quadratic(const ParamFamily& family, const RealVector& thetas,
                            const RealVector& prior_weights);

struct HeterodyneClosedForm {
  double x_scale = 0.0;  // estimate x = x_scale * alpha
  double sigma2 = 0.0;   // s (n+1) / (s + n + 1)
};
HeterodyneClosedForm heterodyne_closed_form(double nbar, double sbar);

/// Operator derivatives of a family by central differences (+ Richardson).
struct DerivativeReport {
  std::vector<Matrix> derivative;  // per parameter
  double error_estimate = 0.0;
};
DerivativeReport finite_difference_derivative(const ParamFamily& family,
                                              const RealVector& at, double step,
                                              bool richardson = true);

}  // namespace waverec::estimate

#endif
