#ifndef WAVEREC_ORACLE_HPP
#define WAVEREC_ORACLE_HPP

#include <cstdint>
#include <functional>

#include "waverec/measure.hpp"
#include "waverec/types.hpp"

namespace waverec::oracle {

/// Deterministic stream: mt19937_64 + explicit Box-Muller so that identical
/// seeds give identical draws on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}
  double uniform();          // [0, 1)
  double normal();           // standard normal, Box-Muller
  Cplx complex_normal();     // re/im iid N(0, 1)
  std::uint64_t raw();
  /// Substream derived from (seed, index); parallel draws stay reproducible.
  static SeededRng substream(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Matrix random_complex_gaussian(int rows, int cols, SeededRng& rng);
Matrix random_hermitian(int dim, SeededRng& rng);
Matrix random_psd(int dim, SeededRng& rng);
Matrix random_unitary(int dim, SeededRng& rng);
Vector random_vector(int dim, SeededRng& rng);

/// M_i = T^{-1/2} G_i G_i^dag T^{-1/2}; complete by construction.
measure::Povm random_povm(int dim, int n_outcomes, SeededRng& rng);

struct SampledMax {
  double best_value = -std::numeric_limits<double>::infinity();
  measure::Povm best_povm;
};
SampledMax sampled_max_objective(const std::function<double(const measure::Povm&)>& objective,
                                 int dim, int n_outcomes, int draws, SeededRng& rng);

double duality_gap(double primal_value, double dual_value);

/// Independent objective evaluation (plain loops, no linop entry points).
double povm_objective_trace(const std::vector<Matrix>& weights, const measure::Povm& m);

/// Central-difference derivative of an operator-valued map, with Richardson
/// extrapolation and a cancellation detector (StepTooSmall when the error
/// estimate grows as the step shrinks).
struct OperatorDerivative {
  Matrix derivative;
  double error_estimate = 0.0;
};
OperatorDerivative finite_difference_derivative(
    const std::function<Matrix(double)>& family, double at, double step,
    bool richardson = true);

}  // namespace waverec::oracle

#endif
