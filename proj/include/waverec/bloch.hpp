#ifndef WAVEREC_BLOCH_HPP
#define WAVEREC_BLOCH_HPP

#include "waverec/measure.hpp"
#include "waverec/types.hpp"

namespace waverec::bloch {

/// 2x2 Hermitian operator R = (nu + r.sigma)/2 encoded as (nu, r).
struct BlochPoint {
  double nu = 0.0;
  Vec3 r = Vec3::Zero();
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

BlochPoint bloch_from_operator(const Matrix& r);
Matrix operator_from_bloch(const BlochPoint& p);

struct BlochSolution {
  Vec3 l = Vec3::Zero();          // apex projection l^o
  double lambda = 0.0;            // lambda^o = kappa
  std::vector<double> mu;         // per input point (0 off active set)
  std::vector<Vec3> d;            // decision vectors d_i = mu_i (r_i - l)
  std::vector<double> delta;      // delta_i = |d_i|
  std::vector<int> active_set;    // indices {j_alpha}
  std::vector<int> pruned;        // dominated points dropped with a warning
  double kappa = 0.0;
  measure::Povm povm;             // D_i = delta_i + d_i . sigma
  Certificate certificate;
};

/// Geometric solver for the covering cone: enumerate candidate subsets of
/// size 2..4, solve the constant-sum system on each, accept covering +
/// feasible candidates, maximal lambda with lexicographic tie-break.
BlochSolution solve_polarizations(const std::vector<BlochPoint>& points,
                                  double tol = 1e-9);

/// kappa = (nu_p + nu_q)/2 + |r_p - r_q|/2 for a non-dominated pair.
double pair_closed_form(const BlochPoint& p, const BlochPoint& q);

enum class SpecialMode { PureEllipsoid, EqualIntensitySphere };

/// Dedicated geometry for the two special cases; agrees with the generic
/// solver (cross-checked by callers/tests).
BlochSolution special_case_solvers(const std::vector<BlochPoint>& points,
                                   SpecialMode mode, double tol = 1e-9);

}  // namespace waverec::bloch

#endif
