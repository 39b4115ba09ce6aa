#include "waverec/measure.hpp"

#include <cmath>

#include "waverec/linop.hpp"

namespace waverec::measure {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Povm make_complete_povm(std::vector<Matrix> elements) {
  if (elements.empty()) throw DimMismatch("empty POVM");
  const int n = static_cast<int>(elements[0].rows());
  Povm m;
  m.support = Matrix::Identity(n, n);
  m.elements = std::move(elements);
  for (size_t i = 0; i < m.elements.size(); ++i) m.labels.push_back(std::to_string(i));
  return m;
}

PovmReport validate_povm(const Povm& m, double tol) {
  if (m.elements.empty()) throw DimMismatch("empty POVM");
  const int n = static_cast<int>(m.elements[0].rows());
  PovmReport rep;
  rep.min_eig = std::numeric_limits<double>::infinity();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& e : m.elements) {
    if (e.rows() != n || e.cols() != n) throw DimMismatch("POVM element dims");
    linop::EigenSystem es = linop::eig_hermitian(e);
    rep.min_eig = std::min(rep.min_eig, es.values.size() ? es.values.minCoeff() : 0.0);
    sum += e;
  }
  Matrix support = m.support.rows() == n ? m.support : Matrix::Identity(n, n);
  rep.completeness_residual = linop::spectral_norm(sum - support);
  rep.max_cross_norm = 0.0;
  if (m.elements.size() <= 128) {  // pairwise scan only for discrete outcome sets
    for (size_t i = 0; i < m.elements.size(); ++i)
      for (size_t k = i + 1; k < m.elements.size(); ++k)
        rep.max_cross_norm =
            std::max(rep.max_cross_norm, linop::spectral_norm(m.elements[i] * m.elements[k]));
    rep.disjoint = rep.max_cross_norm <= tol * std::max(1.0, linop::spectral_norm(sum));
  } else {
    rep.max_cross_norm = -1.0;  // not computed for quadrature-sized outcome sets
    rep.disjoint = false;
  }
  return rep;
}

Dilation halmos_dilate(const Matrix& d, double tol) {
  linop::require_hermitian(d, 1e-9);
  const int n = static_cast<int>(d.rows());
  linop::EigenSystem es = linop::eig_hermitian(d);
  if (es.values.size() &&
      (es.values.minCoeff() < -tol || es.values.maxCoeff() > 1.0 + tol))
    throw NotContraction("eigenvalue of D outside [0, 1]");
  // sqrt(D (I - D)) in D's eigenbasis, eigenvalues clamped into [0, 1]
  Matrix off = Matrix::Zero(n, n);
  Matrix dc = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double v = std::clamp(es.values(k), 0.0, 1.0);
    Matrix pk = es.vectors.col(k) * es.vectors.col(k).adjoint();
    dc += v * pk;
    off += std::sqrt(v * (1.0 - v)) * pk;
  }
  Matrix e(2 * n, 2 * n);
  e.block(0, 0, n, n) = dc;
  e.block(0, n, n, n) = off;
  e.block(n, 0, n, n) = off;
  e.block(n, n, n, n) = Matrix::Identity(n, n) - dc;
  Dilation dil;
  dil.embed = Matrix::Zero(2 * n, n);
  dil.embed.block(0, 0, n, n) = Matrix::Identity(n, n);
  dil.projective = {e, Matrix::Identity(2 * n, 2 * n) - e};
  return dil;
}

Dilation povm_dilate(const Povm& m, double tol) {
  const int n = m.dim();
  const int k = m.outcomes();
  PovmReport rep = validate_povm(m);
  if (rep.completeness_residual > 1e-8 || rep.min_eig < -1e-8)
    throw InvalidDilation("POVM must be complete and positive to dilate");
  Dilation dil;
  dil.embed = Matrix::Zero(k * n, n);
  for (int i = 0; i < k; ++i)
    dil.embed.block(i * n, 0, n, n) = linop::sqrt_psd(m.elements[i], 1e-8);
  for (int i = 0; i < k; ++i) {
    Matrix e = Matrix::Zero(k * n, k * n);
    e.block(i * n, i * n, n, n) = Matrix::Identity(n, n);
    dil.projective.push_back(e);
  }
  (void)tol;
  return dil;
}

Povm neumark_reduce(const Dilation& dil, double tol) {
  const Matrix& f = dil.embed;
  if ((f.adjoint() * f - Matrix::Identity(f.cols(), f.cols())).norm() > 1e-8)
    throw InvalidDilation("embed is not an isometry");
  for (const auto& e : dil.projective)
    if (linop::spectral_norm(e * e - e) > tol)
      throw InvalidDilation("projective element is not an orthoprojector");
  std::vector<Matrix> elems;
  for (const auto& e : dil.projective) elems.push_back(f.adjoint() * e * f);
  return make_complete_povm(std::move(elems));
}

Matrix neumark_embedding_unitary(const Matrix& f) {
  const int n = static_cast<int>(f.cols());
  const int np = static_cast<int>(f.rows());
  if ((f.adjoint() * f - Matrix::Identity(n, n)).norm() > 1e-8)
    throw InvalidDilation("embed is not an isometry");
  // U = (F* (x) F) SWAP + I (x) (1 - F F*) on H (x) H'
  Matrix u = Matrix::Zero(n * np, n * np);
  Matrix ffs = Matrix::Identity(np, np) - f * f.adjoint();
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < np; ++a) {
      // action on basis vector e_i (x) e'_a
      // term 1: (F* e'_a) (x) (F e_i)
      Vector left = f.adjoint().col(a);   // F* e'_a in H
      Vector right = f.col(i);            // F e_i in H'
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < np; ++b)
          u(j * np + b, i * np + a) += left(j) * right(b);
      // term 2: e_i (x) (1 - F F*) e'_a
      for (int b = 0; b < np; ++b) u(i * np + b, i * np + a) += ffs(b, a);
    }
  if ((u.adjoint() * u - Matrix::Identity(n * np, n * np)).norm() > 1e-8)
    throw NotUnitary("Neumark embedding unitary failed the unitarity check");
  return u;
}

Povm indirect_povm(const Matrix& u, const Matrix& s0, const std::vector<Matrix>& e0,
                   int dim_sys, int dim_ref, double tol) {
  if (u.rows() != dim_sys * dim_ref || u.cols() != u.rows())
    throw DimMismatch("unitary dims");
  if ((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() > 1e-9 * u.rows())
    throw NotUnitary("U^dag U != I");
  if (s0.rows() != dim_ref || std::abs(s0.trace().real() - 1.0) > 1e-9)
    throw BadReference("reference state must be normalized on the reference space");
  std::vector<Matrix> elems;
  for (const auto& ei : e0) {
    if (ei.rows() != dim_ref) throw DimMismatch("reference POVM element dims");
    Matrix eprime = u.adjoint() * linop::tensor(Matrix::Identity(dim_sys, dim_sys), ei) * u;
    elems.push_back(linop::weighted_partial_trace(eprime, s0, dim_sys, dim_ref));
  }
  (void)tol;
  return make_complete_povm(std::move(elems));
}

std::vector<Cplx> coherent_povm_outcomes(const states::AlphaGrid& grid) {
  std::vector<Cplx> out;
  const int n = grid.points_per_axis;
  double lo = -grid.alpha_max;
  double d = 2.0 * grid.alpha_max / (n - 1);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) out.emplace_back(lo + ix * d, lo + iy * d);
  return out;
}

Povm coherent_povm(int fock_dim, const states::AlphaGrid& grid) {
  const int n = grid.points_per_axis;
  double d = 2.0 * grid.alpha_max / (n - 1);
  if (d > 0.5) throw GridTooCoarse("alpha grid spacing above 0.5");
  // the disc must at least cover the unit coherent support with tail mass
  // < 1e-6; completeness over the higher Fock levels of the truncation is a
  // property of the caller's states and is reported by validate_povm
  if (std::exp(-(grid.alpha_max - 1.0) * (grid.alpha_max - 1.0)) > 1e-6)
    throw GridTooCoarse("alpha_max below the unit coherent support");
  Povm m;
  m.support = Matrix::Identity(fock_dim, fock_dim);
  double w = d * d / kPi;
  for (const Cplx& alpha : coherent_povm_outcomes(grid)) {
    Vector v(fock_dim);
    Cplx c = std::exp(-std::norm(alpha) / 2.0);
    for (int k = 0; k < fock_dim; ++k) {
      v(k) = c;
      c *= alpha / std::sqrt(double(k + 1));
    }
    m.elements.push_back(w * (v * v.adjoint()));
    m.labels.push_back("alpha=" + std::to_string(alpha.real()) + "+" +
                       std::to_string(alpha.imag()) + "j");
  }
  return m;
}

}  // namespace waverec::measure
