#include "waverec/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace waverec::oracle {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

// splitmix64 for seeding / substreams
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t SeededRng::next_u64() { return splitmix64(state_); }

std::uint64_t SeededRng::raw() { return next_u64(); }

double SeededRng::uniform() {
  return double(next_u64() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

double SeededRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

Cplx SeededRng::complex_normal() {
  double re = normal();
  double im = normal();
  return Cplx(re, im);
}

SeededRng SeededRng::substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64(s) ^ (0x632be59bd9b4e019ULL * (index + 1));
  return SeededRng(mixed);
}

Matrix random_complex_gaussian(int rows, int cols, SeededRng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

Matrix random_hermitian(int dim, SeededRng& rng) {
  Matrix g = random_complex_gaussian(dim, dim, rng);
  return (g + g.adjoint()) / 2.0;
}

Matrix random_psd(int dim, SeededRng& rng) {
  Matrix g = random_complex_gaussian(dim, dim, rng);
  return g * g.adjoint();
}

Matrix random_unitary(int dim, SeededRng& rng) {
  Matrix g = random_complex_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    Cplx d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

Vector random_vector(int dim, SeededRng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v;
}

measure::Povm random_povm(int dim, int n_outcomes, SeededRng& rng) {
  if (dim < 1 || n_outcomes < 1) throw DimMismatch("dim, n_outcomes >= 1");
  std::vector<Matrix> blocks;
  Matrix total = Matrix::Zero(dim, dim);
  int rank_sum = 0;
  for (int i = 0; i < n_outcomes; ++i) {
    // random-rank Ginibre blocks; rank-1 draws reach the extremal POVMs,
    // while the last block tops the total rank up so that T is nonsingular
    int k = 1 + int(rng.raw() % std::uint64_t(dim));
    if (i == n_outcomes - 1 && rank_sum + k < dim) k = dim - rank_sum;
    rank_sum += k;
    Matrix g = random_complex_gaussian(dim, k, rng);
    blocks.push_back(g * g.adjoint());
    total += blocks.back();
  }
  // T^{-1/2} via a local eigendecomposition (independent of the solver paths)
  Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  Matrix tinv_half = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k)
    tinv_half += (1.0 / std::sqrt(std::max(es.eigenvalues()(k), 1e-300))) *
                 es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  std::vector<Matrix> elems;
  for (auto& b : blocks) {
    Matrix e = tinv_half * b * tinv_half;
    elems.push_back((e + e.adjoint()) / 2.0);
  }
  return measure::make_complete_povm(std::move(elems));
}

SampledMax sampled_max_objective(const std::function<double(const measure::Povm&)>& objective,
                                 int dim, int n_outcomes, int draws, SeededRng& rng) {
  SampledMax out;
  for (int d = 0; d < draws; ++d) {
    measure::Povm m = random_povm(dim, n_outcomes, rng);
    double v = objective(m);
    if (v > out.best_value) {
      out.best_value = v;
      out.best_povm = m;
    }
  }
  return out;
}

double duality_gap(double primal_value, double dual_value) {
  return dual_value - primal_value;
}

OperatorDerivative finite_difference_derivative(
    const std::function<Matrix(double)>& family, double at, double step,
    bool richardson) {
  if (step <= 0) throw StepTooSmall("step must be positive");
  auto central = [&](double h) {
    return ((family(at + h) - family(at - h)) / (2.0 * h)).eval();
  };
  OperatorDerivative out;
  Matrix d1 = central(step);
  if (!richardson) {
    out.derivative = d1;
    return out;
  }
  Matrix d2 = central(step / 2.0);
  Matrix d4 = central(step / 4.0);
  out.derivative = (4.0 * d2 - d1) / 3.0;
  double err_big = (d2 - d1).norm();
  double err_small = (d4 - d2).norm();
  out.error_estimate = err_small;
  if (err_small > 2.0 * err_big && err_big > 0)
    throw StepTooSmall("error estimate grows as the step shrinks");
  return out;
}

double povm_objective_trace(const std::vector<Matrix>& weights, const measure::Povm& m) {
  double v = 0.0;
  size_t n = std::min(weights.size(), m.elements.size());
  for (size_t i = 0; i < n; ++i) {
    const Matrix& a = weights[i];
    const Matrix& b = m.elements[i];
    Cplx acc = 0.0;
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) acc += a(r, c) * b(c, r);
    v += acc.real();
  }
  return v;
}

}  // namespace waverec::oracle
