#include "waverec/estimate.hpp"

#include <cmath>

#include "waverec/bloch.hpp"
#include "waverec/linop.hpp"
#include "waverec/oracle.hpp"

namespace waverec::estimate {

namespace {
constexpr double kPi = 3.14159265358979323846;
using linop::eig_hermitian;
using linop::solve_anticommutator;
using linop::spectral_norm;
}  // namespace

double BoundReport::slack_min_eig(const Eigen::MatrixXd& covariance) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      (covariance - bound + (covariance - bound).transpose()) / 2.0);
  return es.eigenvalues().minCoeff();
}

Matrix ParamFamily::at_real(const RealVector& theta) const {
  if (kind != ParamKind::Real || !eval_real) throw DimMismatch("family is not real-parametric");
  return eval_real(theta);
}

Matrix ParamFamily::at_complex(const Vector& alpha) const {
  if (kind != ParamKind::Complex || !eval_complex)
    throw DimMismatch("family is not complex-parametric");
  return eval_complex(alpha);
}

ParamFamily rotation_qubit_family(double r, const Vec3& axis) {
  ParamFamily f;
  f.kind = ParamKind::Real;
  f.dim_params = 1;
  Vec3 n = axis.normalized();
  Matrix gen = (n(0) * bloch::pauli_x() + n(1) * bloch::pauli_y() + n(2) * bloch::pauli_z()) / 2.0;
  f.generator = gen;
  f.eval_real = [r, gen](const RealVector& th) {
    Matrix s0 = (Matrix::Identity(2, 2) + r * bloch::pauli_x()) / 2.0;
    linop::EigenSystem es = eig_hermitian(gen);
    Matrix u = Matrix::Zero(2, 2);
    for (int k = 0; k < 2; ++k)
      u += std::exp(Cplx(0, th(0) * es.values(k))) * es.vectors.col(k) * es.vectors.col(k).adjoint();
    return (u * s0 * u.adjoint()).eval();
  };
  return f;
}

ParamFamily coherent_displacement_family(int fock_dim) {
  ParamFamily f;
  f.kind = ParamKind::Real;
  f.dim_params = 1;
  f.generator = states::annihilation_operator(fock_dim);
  f.eval_real = [fock_dim](const RealVector& th) {
    states::Amplitude v = states::coherent_vector(th(0), fock_dim);
    return (v.coeffs * v.coeffs.adjoint()).eval();
  };
  return f;
}

ParamFamily coherent_complex_family(int fock_dim) {
  ParamFamily f;
  f.kind = ParamKind::Complex;
  f.dim_params = 1;
  f.generator = states::annihilation_operator(fock_dim);
  f.eval_complex = [fock_dim](const Vector& a) {
    states::Amplitude v = states::coherent_vector(a(0), fock_dim);
    return (v.coeffs * v.coeffs.adjoint()).eval();
  };
  return f;
}

ParamFamily thermal_coherent_family(double nbar, int fock_dim) {
  ParamFamily f;
  f.kind = ParamKind::Complex;
  f.dim_params = 1;
  f.generator = states::annihilation_operator(fock_dim);
  // no truncation gate: prior integration weighs far tail members by their
  // prior mass, so the loss budget belongs to the caller
  f.eval_complex = [nbar, fock_dim](const Vector& a) {
    return states::thermal_coherent_density(a(0), nbar, fock_dim, 1.0).op;
  };
  return f;
}

ParamFamily classical_binary_family() {
  ParamFamily f;
  f.kind = ParamKind::Real;
  f.dim_params = 1;
  f.eval_real = [](const RealVector& th) {
    double p = std::cos(th(0) / 2.0) * std::cos(th(0) / 2.0);
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = p;
    s(1, 1) = 1.0 - p;
    return s;
  };
  return f;
}

namespace {

std::vector<Matrix> real_derivatives(const ParamFamily& family, const RealVector& at,
                                     double step) {
  std::vector<Matrix> out;
  for (int k = 0; k < family.dim_params; ++k) {
    double h = step * std::max(1.0, std::abs(at(k)));
    RealVector p = at, m = at;
    p(k) += h;
    m(k) -= h;
    out.push_back((family.at_real(p) - family.at_real(m)) / (2.0 * h));
  }
  return out;
}

// d/d(conj alpha) S = (dS/dx + j dS/dy)/2 per component
std::vector<Matrix> conj_wirtinger_derivatives(const ParamFamily& family, const Vector& at,
                                               double step) {
  std::vector<Matrix> out;
  for (int k = 0; k < family.dim_params; ++k) {
    double h = step * std::max(1.0, std::abs(at(k)));
    Vector px = at, mx = at, py = at, my = at;
    px(k) += h;
    mx(k) -= h;
    py(k) += Cplx(0, h);
    my(k) -= Cplx(0, h);
    Matrix dx = (family.at_complex(px) - family.at_complex(mx)) / (2.0 * h);
    Matrix dy = (family.at_complex(py) - family.at_complex(my)) / (2.0 * h);
    out.push_back((dx + Cplx(0, 1) * dy) / 2.0);
  }
  return out;
}

}  // namespace

BoundReport classical_bound(const measure::Povm& m, const ParamFamily& family,
                            const RealVector& at, double fd_step) {
  const int n = family.dim_params;
  Matrix s = family.at_real(at);
  double j_total = 0.0;
  std::vector<double> mu(m.outcomes());
  for (int o = 0; o < m.outcomes(); ++o) {
    mu[o] = (s * m.elements[o]).trace().real();
    j_total += mu[o];
  }
  std::vector<std::vector<double>> dmu(n, std::vector<double>(m.outcomes()));
  std::vector<Matrix> ds = real_derivatives(family, at, fd_step);
  for (int k = 0; k < n; ++k)
    for (int o = 0; o < m.outcomes(); ++o)
      dmu[k][o] = (ds[k] * m.elements[o]).trace().real();
  Eigen::MatrixXd fisher = Eigen::MatrixXd::Zero(n, n);
  double floor = 1e-12 * std::max(j_total, 1e-300);
  for (int o = 0; o < m.outcomes(); ++o) {
    if (mu[o] <= floor) {
      for (int k = 0; k < n; ++k)
        if (std::abs(dmu[k][o]) > 1e-7 * std::max(1.0, j_total))
          throw ZeroOutcome("outcome with zero intensity but nonzero derivative");
      continue;
    }
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) fisher(k, l) += dmu[k][o] * dmu[l][o] / mu[o];
  }
  fisher /= std::max(j_total, 1e-300);
  BoundReport rep;
  rep.information = fisher;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(fisher);
  if (!lu.isInvertible() || fisher.norm() < 1e-12)
    throw SingularFisher("Fisher matrix singular; bound infinite");
  rep.bound = lu.inverse();
  return rep;
}

BoundReport sld_bound(const ParamFamily& family, const RealVector& at, double fd_step) {
  const int n = family.dim_params;
  Matrix s = family.at_real(at);
  std::vector<Matrix> ds = real_derivatives(family, at, fd_step);
  BoundReport rep;
  // null-block tolerance absorbs the O(fd_step^2) curvature noise of the
  // central differences on rank-deficient families
  double solve_tol = std::max(1e-9, 1e3 * fd_step * fd_step);
  for (int k = 0; k < n; ++k)
    rep.log_derivatives.push_back(
        solve_anticommutator(s, (ds[k] + ds[k].adjoint()) / 2.0, solve_tol));
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      g(i, k) = 0.5 * ((s * (rep.log_derivatives[i] * rep.log_derivatives[k] +
                             rep.log_derivatives[k] * rep.log_derivatives[i]))
                           .trace()
                           .real());
  rep.information = g;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible() || g.norm() < 1e-14) throw SingularG("G singular");
  rep.bound = lu.inverse();
  return rep;
}

BoundReport rld_bound(const ParamFamily& family, const Vector& at, double fd_step) {
  const int n = family.dim_params;
  Matrix s = family.at_complex(at);
  std::vector<Matrix> ds = conj_wirtinger_derivatives(family, at, fd_step);
  Matrix spinv = linop::pinv_on_support(s, 1e-8);
  Matrix psupp = linop::support_projector(s, 1e-8);
  BoundReport rep;
  for (int k = 0; k < n; ++k) {
    Matrix h = spinv * ds[k];
    double resid = spectral_norm(s * h - ds[k]);
    if (resid > 1e-6 * std::max(1.0, spectral_norm(ds[k])))
      throw SupportDeficient("dS/d(conj alpha) not solvable on the support of S");
    rep.log_derivatives.push_back(h);
    (void)psupp;
  }
  Eigen::MatrixXcd hmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      hmat(i, k) =
          (s * rep.log_derivatives[i] * rep.log_derivatives[k].adjoint()).trace();
  Matrix hm = hmat;
  linop::EigenSystem es = eig_hermitian((hm + hm.adjoint()) / 2.0);
  if (es.values.minCoeff() < -1e-8 * std::max(1.0, es.values.cwiseAbs().maxCoeff()))
    throw SingularH("H not PSD under the pinned convention");
  rep.information = ((hm + hm.adjoint()) / 2.0).real();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rep.information);
  if (!lu.isInvertible() || rep.information.norm() < 1e-14) throw SingularH("H singular");
  rep.bound = lu.inverse();
  return rep;
}

CovarianceReport measurement_covariance(const measure::Povm& m,
                                        const std::vector<RealVector>& estimator,
                                        const Matrix& s, const RealVector& theta) {
  const int n = static_cast<int>(theta.size());
  CovarianceReport rep;
  rep.covariance = Eigen::MatrixXd::Zero(n, n);
  rep.bias = RealVector::Zero(n);
  for (int o = 0; o < m.outcomes(); ++o) {
    double w = (s * m.elements[o]).trace().real();
    rep.total_intensity += w;
    RealVector d = estimator[o] - theta;
    rep.covariance += w * d * d.transpose();
    rep.bias += w * d;
  }
  if (rep.total_intensity > 0) {
    rep.covariance /= rep.total_intensity;
    rep.bias /= rep.total_intensity;
  }
  return rep;
}

CovarianceReport measurement_covariance_complex(const measure::Povm& m,
                                                const std::vector<Cplx>& estimator,
                                                const Matrix& s, Cplx theta) {
  CovarianceReport rep;
  rep.covariance = Eigen::MatrixXd::Zero(1, 1);
  rep.bias = RealVector::Zero(2);
  for (int o = 0; o < m.outcomes(); ++o) {
    double w = (s * m.elements[o]).trace().real();
    rep.total_intensity += w;
    Cplx d = estimator[o] - theta;
    rep.covariance(0, 0) += w * std::norm(d);
    rep.bias(0) += w * d.real();
    rep.bias(1) += w * d.imag();
  }
  if (rep.total_intensity > 0) {
    rep.covariance /= rep.total_intensity;
    rep.bias /= rep.total_intensity;
  }
  return rep;
}

EfficiencyReport efficiency_check(const ParamFamily& family, const measure::Povm& m,
                                  const std::vector<Cplx>& estimator, Cplx at,
                                  double tol) {
  EfficiencyReport rep;
  Matrix s = family.at_complex(Vector::Constant(1, at));
  CovarianceReport cov = measurement_covariance_complex(m, estimator, s, at);
  BoundReport bound = rld_bound(family, Vector::Constant(1, at));
  rep.attainment_slack = bound.slack_min_eig(cov.covariance);
  rep.attained = rep.attainment_slack < tol;
  // right-eigen property: xhat M_o ~= x_o M_o with xhat = sum_o x_o M_o.
  // Checked on the covered bulk (|x_o| up to half the largest outcome); the
  // truncation boundary of a quadrature POVM cannot satisfy it.
  const int dim = m.dim();
  Matrix xhat = Matrix::Zero(dim, dim);
  double xmax = 0.0;
  for (int o = 0; o < m.outcomes(); ++o) {
    xhat += estimator[o] * m.elements[o];
    xmax = std::max(xmax, std::abs(estimator[o]));
  }
  double resid = 0.0, scale = 0.0;
  for (int o = 0; o < m.outcomes(); ++o) {
    if (std::abs(estimator[o]) > 0.25 * xmax) continue;
    resid = std::max(resid,
                     (xhat * m.elements[o] - estimator[o] * m.elements[o]).norm());
    scale = std::max(scale, m.elements[o].norm());
  }
  rep.right_eigen_residual = resid / std::max(scale, 1e-300);
  // Gaussian generating function: log chi(beta) quadratic (canonical families
  // with a declared generator only)
  if (family.generator.size() > 0) {
    const Matrix& x = family.generator;
    Matrix s0 = family.at_complex(Vector::Constant(1, Cplx(0, 0)));
    std::vector<double> betas = {0.05, 0.1, 0.15, 0.2};
    std::vector<double> logchi;
    for (double b : betas) {
      // chi = Tr S0 e^{conj(b) x} e^{b x^dag}; b real here
      Matrix e1 = Matrix::Identity(x.rows(), x.cols());
      Matrix e2 = e1;
      Matrix t1 = e1, t2 = e1;
      for (int k = 1; k <= 24; ++k) {  // series, ||b x|| small at desk scale
        t1 = (t1 * (b * x) / double(k)).eval();
        t2 = (t2 * (b * x.adjoint()) / double(k)).eval();
        e1 += t1;
        e2 += t2;
      }
      logchi.push_back(std::log(std::max((s0 * e1 * e2).trace().real(), 1e-300)));
    }
    // fit logchi = c2 b^2 (zero linear term for centered x); report residual
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < betas.size(); ++i) {
      num += logchi[i] * betas[i] * betas[i];
      den += betas[i] * betas[i] * betas[i] * betas[i];
    }
    double c2 = num / den;
    double res = 0.0;
    for (size_t i = 0; i < betas.size(); ++i)
      res = std::max(res, std::abs(logchi[i] - c2 * betas[i] * betas[i]));
    rep.gaussian_fit_residual = res;
  }
  return rep;
}

UncertaintyReport uncertainty_check(const ParamFamily& family, const measure::Povm& m,
                                    const std::vector<RealVector>& estimator,
                                    double theta) {
  UncertaintyReport rep;
  if (family.generator.size() == 0) throw DimMismatch("family carries no generator");
  Matrix s0 = family.at_real(RealVector::Constant(1, 0.0));
  const Matrix& x = family.generator;
  double mean = (s0 * x).trace().real();
  double var = (s0 * x * x).trace().real() - mean * mean;
  if (var < 1e-12 * std::max(1.0, std::abs(mean))) {
    rep.singular = true;
    return rep;
  }
  Matrix s = family.at_real(RealVector::Constant(1, theta));
  CovarianceReport cov =
      measurement_covariance(m, estimator, s, RealVector::Constant(1, theta));
  rep.product = (2.0 * kPi) * (2.0 * kPi) * cov.covariance(0, 0) * var;
  rep.slack = rep.product - 0.25;
  return rep;
}

BayesResult bayes_quadratic(const ParamFamily& family, const RealVector& thetas,
                            const RealVector& prior_weights) {
  if (thetas.size() != prior_weights.size()) throw DimMismatch("prior grid");
  if (prior_weights.minCoeff() < 0) throw NegativeWeight("prior weights");
  double wsum = prior_weights.sum();
  if (wsum <= 0) throw NegativeWeight("prior weights all zero");
  Matrix r0, r1, r2;
  for (int i = 0; i < thetas.size(); ++i) {
    Matrix s = family.at_real(RealVector::Constant(1, thetas(i)));
    double w = prior_weights(i) / wsum;
    if (i == 0) {
      r0 = w * s;
      r1 = w * thetas(i) * s;
      r2 = w * thetas(i) * thetas(i) * s;
    } else {
      r0 += w * s;
      r1 += w * thetas(i) * s;
      r2 += w * thetas(i) * thetas(i) * s;
    }
  }
  BayesResult out;
  out.xhat = solve_anticommutator(((r0 + r0.adjoint()) / 2.0).eval(),
                                  ((r1 + r1.adjoint()) / 2.0).eval(), 1e-11);
  linop::EigenSystem es = eig_hermitian(((out.xhat + out.xhat.adjoint()) / 2.0).eval());
  std::vector<Matrix> elems;
  out.estimator.resize(es.values.size());
  for (int k = 0; k < es.values.size(); ++k) {
    elems.push_back(es.vectors.col(k) * es.vectors.col(k).adjoint());
    out.estimator(k) = es.values(k);
  }
  out.povm = measure::make_complete_povm(std::move(elems));
  Matrix lam = r2 - out.xhat * r0 * out.xhat;
  out.sigma2 = lam.trace().real();
  if (out.sigma2 < -1e-9) throw NegativeVariance("numerical breakdown");
  // minorant certificate at sampled outcomes: (R_x - Lam) chi_x = 0, R_x >= Lam
  double worst_vec = 0.0, worst_eig = 0.0;
  double scale = std::max(spectral_norm(r2) + spectral_norm(r0), 1e-300);
  int step = std::max(1, int(es.values.size()) / 8);
  for (int k = 0; k < es.values.size(); k += step) {
    double xv = es.values(k);
    Matrix rx = xv * xv * r0 - xv * (r1 + r1.adjoint()) + r2;
    worst_vec = std::max(worst_vec, ((rx - lam) * es.vectors.col(k)).norm() / scale);
    Matrix slackop = rx - lam;
    linop::EigenSystem d = eig_hermitian(((slackop + slackop.adjoint()) / 2.0).eval());
    worst_eig = std::max(worst_eig, std::max(0.0, -d.values.minCoeff()) / scale);
  }
  out.certificate.add("(R_x-Lam)chi_x", worst_vec);
  out.certificate.add("R_x>=Lam", worst_eig);
  return out;
}

HeterodyneClosedForm heterodyne_closed_form(double nbar, double sbar) {
  if (nbar < 0 || sbar < 0) throw NegativeWeight("nbar, sbar must be >= 0");
  HeterodyneClosedForm out;
  out.x_scale = sbar / (sbar + nbar + 1.0);
  out.sigma2 = sbar * (nbar + 1.0) / (sbar + nbar + 1.0);
  return out;
}

DerivativeReport finite_difference_derivative(const ParamFamily& family,
                                              const RealVector& at, double step,
                                              bool richardson) {
  DerivativeReport rep;
  for (int k = 0; k < family.dim_params; ++k) {
    RealVector base = at;
    auto slice = [&family, base, k](double t) {
      RealVector p = base;
      p(k) = t;
      return family.at_real(p);
    };
    oracle::OperatorDerivative d = oracle::finite_difference_derivative(
        slice, at(k), step * std::max(1.0, std::abs(at(k))), richardson);
    rep.derivative.push_back(d.derivative);
    rep.error_estimate = std::max(rep.error_estimate, d.error_estimate);
  }
  return rep;
}

}  // namespace waverec::estimate
