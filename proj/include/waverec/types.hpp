#ifndef WAVEREC_TYPES_HPP
#define WAVEREC_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace waverec {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

constexpr double kEigTol = 1e-10;  // rank decisions scale with this single knob

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define WAVEREC_DEFINE_ERROR(Name)                                    \
  struct Name : Error {                                               \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

WAVEREC_DEFINE_ERROR(NonHermitian);
WAVEREC_DEFINE_ERROR(NonFinite);
WAVEREC_DEFINE_ERROR(NotPsd);
WAVEREC_DEFINE_ERROR(DimMismatch);
WAVEREC_DEFINE_ERROR(SingularPair);
WAVEREC_DEFINE_ERROR(BasisMismatch);
WAVEREC_DEFINE_ERROR(NegativeWeight);
WAVEREC_DEFINE_ERROR(Overflow);
WAVEREC_DEFINE_ERROR(TruncationTooSmall);
WAVEREC_DEFINE_ERROR(NonUniformGrid);
WAVEREC_DEFINE_ERROR(ZeroAmplitude);
WAVEREC_DEFINE_ERROR(NotContraction);
WAVEREC_DEFINE_ERROR(InvalidDilation);
WAVEREC_DEFINE_ERROR(NotUnitary);
WAVEREC_DEFINE_ERROR(BadReference);
WAVEREC_DEFINE_ERROR(GridTooCoarse);
WAVEREC_DEFINE_ERROR(SupportViolation);
WAVEREC_DEFINE_ERROR(Inadmissible);
WAVEREC_DEFINE_ERROR(ZeroSignal);
WAVEREC_DEFINE_ERROR(NoConvergence);
WAVEREC_DEFINE_ERROR(DegenerateGram);
WAVEREC_DEFINE_ERROR(NotEquidiagonal);
WAVEREC_DEFINE_ERROR(GammaOutOfRange);
WAVEREC_DEFINE_ERROR(TooFewPoints);
WAVEREC_DEFINE_ERROR(AllDominated);
WAVEREC_DEFINE_ERROR(NumericalFailure);
WAVEREC_DEFINE_ERROR(Dominated);
WAVEREC_DEFINE_ERROR(ModeMismatch);
WAVEREC_DEFINE_ERROR(ZeroOutcome);
WAVEREC_DEFINE_ERROR(SingularFisher);
WAVEREC_DEFINE_ERROR(SingularG);
WAVEREC_DEFINE_ERROR(SingularH);
WAVEREC_DEFINE_ERROR(SupportDeficient);
WAVEREC_DEFINE_ERROR(NegativeVariance);
WAVEREC_DEFINE_ERROR(StepTooSmall);
WAVEREC_DEFINE_ERROR(SchemaError);

#undef WAVEREC_DEFINE_ERROR

/// Residuals of a theorem's optimality conditions plus the primal-dual gap.
struct Certificate {
  std::vector<std::pair<std::string, double>> residuals;
  double gap = 0.0;

  void add(const std::string& name, double value) { residuals.emplace_back(name, value); }
  double max_residual() const {
    double m = 0.0;
    for (const auto& [name, v] : residuals) m = std::max(m, v);
    return m;
  }
  bool pass(double tol) const { return max_residual() <= tol && gap >= -tol; }
};

}  // namespace waverec

#endif
