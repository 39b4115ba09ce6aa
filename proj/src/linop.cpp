#include "waverec/linop.hpp"

#include <Eigen/Eigenvalues>

namespace waverec::linop {

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double frob_norm(const Matrix& a) { return a.norm(); }

bool is_finite(const Matrix& a) { return a.allFinite(); }

double hermiticity_defect(const Matrix& h) {
  double n = h.norm();
  if (n == 0.0) return 0.0;
  return (h - h.adjoint()).norm() / n;
}

void require_square(const Matrix& h) {
  if (h.rows() != h.cols()) throw DimMismatch("matrix is not square");
}

void require_hermitian(const Matrix& h, double tol) {
  require_square(h);
  if (!is_finite(h)) throw NonFinite("matrix has NaN/Inf entries");
  if (hermiticity_defect(h) > tol) throw NonHermitian("symmetry defect beyond tolerance");
}

EigenSystem eig_hermitian(const Matrix& h) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
  const int n = static_cast<int>(h.rows());
  EigenSystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {  // Eigen sorts ascending; flip
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

Matrix positive_projector(const Matrix& h, double tol) {
  EigenSystem es = eig_hermitian(h);
  double cut = tol * (es.values.size() ? std::abs(es.values.cwiseAbs().maxCoeff()) : 0.0);
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (int k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cut) p += es.vectors.col(k) * es.vectors.col(k).adjoint();
  return p;
}

Matrix positive_part(const Matrix& h, double tol) {
  EigenSystem es = eig_hermitian(h);
  double cut = tol * (es.values.size() ? std::abs(es.values.cwiseAbs().maxCoeff()) : 0.0);
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (int k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cut) p += es.values(k) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return p;
}

double positive_trace(const Matrix& h, double tol) {
  EigenSystem es = eig_hermitian(h);
  double cut = tol * (es.values.size() ? std::abs(es.values.cwiseAbs().maxCoeff()) : 0.0);
  double s = 0.0;
  for (int k = 0; k < es.values.size(); ++k)
    if (es.values(k) > cut) s += es.values(k);
  return s;
}

Matrix sqrt_psd(const Matrix& p, double tol) {
  EigenSystem es = eig_hermitian(p);
  double scale = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  if (es.values.size() && es.values.minCoeff() < -tol * scale)
    throw NotPsd("negative eigenvalue beyond tolerance");
  Matrix r = Matrix::Zero(p.rows(), p.cols());
  for (int k = 0; k < es.values.size(); ++k) {
    double v = std::max(es.values(k), 0.0);
    r += std::sqrt(v) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  }
  return r;
}

Matrix pinv_on_support(const Matrix& p, double tol) {
  EigenSystem es = eig_hermitian(p);
  double scale = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  if (es.values.size() && es.values.minCoeff() < -tol * scale)
    throw NotPsd("negative eigenvalue beyond tolerance");
  Matrix r = Matrix::Zero(p.rows(), p.cols());
  for (int k = 0; k < es.values.size(); ++k)
    if (es.values(k) > tol * scale)
      r += (1.0 / es.values(k)) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return r;
}

Matrix support_projector(const Matrix& p, double tol) {
  EigenSystem es = eig_hermitian(p);
  double scale = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  Matrix r = Matrix::Zero(p.rows(), p.cols());
  for (int k = 0; k < es.values.size(); ++k)
    if (std::abs(es.values(k)) > tol * scale)
      r += es.vectors.col(k) * es.vectors.col(k).adjoint();
  return r;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& ab, int which, int dim_a, int dim_b) {
  if (ab.rows() != dim_a * dim_b || ab.cols() != dim_a * dim_b)
    throw DimMismatch("operator size inconsistent with factor dims");
  if (which == 0) {  // trace out first factor, result on H_b
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (int i = 0; i < dim_a; ++i)
      out += ab.block(i * dim_b, i * dim_b, dim_b, dim_b);
    return out;
  }
  if (which == 1) {  // trace out second factor, result on H_a
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        out(i, j) = ab.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  throw DimMismatch("subsystem index must be 0 or 1");
}

Matrix weighted_partial_trace(const Matrix& x, const Matrix& w, int dim_a, int dim_b) {
  if (x.rows() != dim_a * dim_b || w.rows() != dim_b || w.cols() != dim_b)
    throw DimMismatch("weighted partial trace dims");
  Matrix out = Matrix::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j) {
      Cplx acc = 0.0;
      for (int a = 0; a < dim_b; ++a)
        for (int c = 0; c < dim_b; ++c)
          acc += w(a, c) * x(i * dim_b + c, j * dim_b + a);
      out(i, j) = acc;
    }
  return out;
}

Matrix solve_anticommutator(const Matrix& s, const Matrix& b, double tol) {
  require_hermitian(s, 1e-9);
  require_hermitian(b, 1e-9);
  if (s.rows() != b.rows()) throw DimMismatch("anticommutator operand dims");
  EigenSystem es = eig_hermitian(((s + s.adjoint()) / 2.0).eval());
  double sscale = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  double bscale = std::max(b.norm(), 1e-300);
  Matrix bt = es.vectors.adjoint() * b * es.vectors;
  Matrix g = Matrix::Zero(s.rows(), s.cols());
  for (int i = 0; i < es.values.size(); ++i)
    for (int j = 0; j < es.values.size(); ++j) {
      double den = es.values(i) + es.values(j);
      if (den > tol * std::max(sscale, 1e-300)) {
        g(i, j) = 2.0 * bt(i, j) / den;
      } else if (std::abs(bt(i, j)) > tol * bscale) {
        throw SingularPair("no solution on a null block of S");
      }
    }
  return es.vectors * g * es.vectors.adjoint();
}

}  // namespace waverec::linop
