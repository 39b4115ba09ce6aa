#include "waverec/identify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>

#include "waverec/bloch.hpp"
#include "waverec/linop.hpp"

namespace waverec::identify {

namespace {

constexpr double kPi = 3.14159265358979323846;

using linop::eig_hermitian;
using linop::pinv_on_support;
using linop::spectral_norm;
using linop::sqrt_psd;

struct Engine {
  Matrix sigma;
  Matrix h;          // sqrt(sigma)
  Matrix sigma_support;
  double scale = 0.0;
  int m = 0;

  explicit Engine(const Matrix& sig) : sigma(sig) {
    linop::require_hermitian(sigma, 1e-8);
    m = static_cast<int>(sigma.rows());
    scale = std::max(sigma.trace().real(), 1e-300);
    h = sqrt_psd(sigma, 1e-8);
    sigma_support = linop::support_projector(sigma);
  }

  // g_i(mu) = (h lambda^+ h)_ii with lambda = sqrt(h diag(mu) h)
  RealVector g(const RealVector& mu) const {
    Matrix lam2 = h * mu.asDiagonal().toDenseMatrix().cast<Cplx>() * h;
    linop::EigenSystem es = eig_hermitian(lam2);
    double wm = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
    Matrix w = h * es.vectors;  // columns h U_a
    RealVector out = RealVector::Zero(m);
    for (int a = 0; a < m; ++a) {
      if (es.values(a) <= 1e-12 * wm) continue;
      double sinv = 1.0 / std::sqrt(es.values(a));
      for (int i = 0; i < m; ++i) out(i) += std::norm(w(i, a)) * sinv;
    }
    return out;
  }

  // exact Jacobian dg_i/dmu_k on an active subset (perturbation of the
  // matrix square root stays within the support block)
  void g_and_jacobian(const RealVector& mu, const std::vector<int>& act,
                      RealVector& gval, Eigen::MatrixXd& jac) const {
    Matrix lam2 = h * mu.asDiagonal().toDenseMatrix().cast<Cplx>() * h;
    linop::EigenSystem es = eig_hermitian(lam2);
    double wm = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
    RealVector s = RealVector::Zero(m), sinv = RealVector::Zero(m);
    std::vector<bool> sup(m, false);
    for (int a = 0; a < m; ++a) {
      if (es.values(a) > 1e-12 * wm) {
        s(a) = std::sqrt(es.values(a));
        sinv(a) = 1.0 / s(a);
        sup[a] = true;
      }
    }
    Matrix w = h * es.vectors;  // w(i,a) = (h U)_{ia};  (U^dag h e_k)_a = conj(w(k,a))
    gval = RealVector::Zero(m);
    for (int a = 0; a < m; ++a)
      if (sup[a])
        for (int i = 0; i < m; ++i) gval(i) += std::norm(w(i, a)) * sinv(a);
    const int na = static_cast<int>(act.size());
    jac.setZero(na, na);
    for (int kk = 0; kk < na; ++kk) {
      const int k = act[kk];
      for (int ii = 0; ii < na; ++ii) {
        const int i = act[ii];
        Cplx acc = 0.0;
        for (int a = 0; a < m; ++a) {
          if (!sup[a]) continue;
          for (int b = 0; b < m; ++b) {
            if (!sup[b]) continue;
            Cplx lp = std::conj(w(k, a)) * w(k, b) / (s(a) + s(b));
            acc += w(i, a) * sinv(a) * lp * std::conj(w(i, b)) * sinv(b);
          }
        }
        jac(ii, kk) = -acc.real();
      }
    }
  }

  // sigma-weighted support deficiency: ||(I - P_L) sigma (I - P_L)|| / Tr sigma.
  // A hypothesis with O(1) weight outside supp(L) shows up at O(1); borderline
  // eigen-directions contribute only their own sigma weight.
  double support_deficiency(const RealVector& mu) const {
    Matrix lam2 = h * mu.asDiagonal().toDenseMatrix().cast<Cplx>() * h;
    Matrix q = Matrix::Identity(m, m) - linop::support_projector(lam2, 1e-12);
    return spectral_norm(q * sigma * q) / scale;
  }

  // certificate residual: scalar conditions + support coverage of sigma
  double residual(const RealVector& mu) const {
    RealVector gv = g(mu);
    double r = 0.0;
    for (int i = 0; i < m; ++i) {
      r = std::max(r, std::abs(mu(i) * (1.0 - gv(i))) / scale);
      r = std::max(r, std::max(0.0, gv(i) - 1.0));
    }
    return std::max(r, support_deficiency(mu));
  }
};

RealVector newton_on_subset(const Engine& eng, const RealVector& start,
                            const std::vector<int>& act, int steps = 50) {
  const int m = eng.m;
  const int na = static_cast<int>(act.size());
  double mx = std::max(start.maxCoeff(), 1e-300);
  RealVector x(na);
  for (int j = 0; j < na; ++j) x(j) = std::max(start(act[j]), 1e-8 * mx);
  auto expand = [&](const RealVector& xa) {
    RealVector full = RealVector::Zero(m);
    for (int j = 0; j < na; ++j) full(act[j]) = xa(j);
    return full;
  };
  auto fval = [&](const RealVector& xa) {
    RealVector gv = eng.g(expand(xa));
    RealVector f(na);
    for (int j = 0; j < na; ++j) f(j) = gv(act[j]) - 1.0;
    return f;
  };
  for (int it = 0; it < steps; ++it) {
    RealVector gv;
    Eigen::MatrixXd jac;
    eng.g_and_jacobian(expand(x), act, gv, jac);
    RealVector f(na);
    for (int j = 0; j < na; ++j) f(j) = gv(act[j]) - 1.0;
    double fn = f.cwiseAbs().maxCoeff();
    if (fn < 1e-14) break;
    RealVector step = jac.colPivHouseholderQr().solve(-f);
    double lam = 1.0;
    bool moved = false;
    while (lam > 1e-9) {
      RealVector c = x + lam * step;
      if (c.minCoeff() > 0.0 && fval(c).cwiseAbs().maxCoeff() < fn) {
        moved = true;
        x = c;
        break;
      }
      lam /= 2.0;
    }
    if (!moved) break;
  }
  return expand(x);
}

// fixed point + zero-forcing with revert + Newton-ladder polish
std::pair<RealVector, double> run_engine(const Engine& eng, const Options& opts) {
  const int m = eng.m;
  RealVector init(m);
  for (int i = 0; i < m; ++i) init(i) = std::norm(eng.h(i, i));
  if (opts.initial_mu.size() == m && opts.initial_mu.minCoeff() >= 0.0)
    init = opts.initial_mu;
  RealVector mu = init;
  std::vector<bool> frozen(m, false), noforce(m, false);
  std::vector<int> below(m, 0);
  std::deque<RealVector> hist{mu};
  double best_res = eng.residual(mu);
  RealVector best_mu = mu;
  double prev = std::numeric_limits<double>::infinity();
  bool damp = false;
  struct Ckpt {
    double res;
    RealVector mu;
    int idx;
    int iter;
  };
  std::optional<Ckpt> ckpt;
  int t = 0;
  const int n_fp = std::min(opts.max_iters, 300);
  while (t < n_fp) {
    RealVector gv = eng.g(mu);
    double r = eng.residual(mu);
    if (r < best_res) {
      best_res = r;
      best_mu = mu;
    }
    if (r < opts.tol) return {best_mu, best_res};
    if (ckpt && t - ckpt->iter > 80) {
      if (best_res > 0.5 * ckpt->res) {
        mu = ckpt->mu;
        frozen[ckpt->idx] = false;
        noforce[ckpt->idx] = true;
      }
      ckpt.reset();
    }
    for (int i = 0; i < m; ++i) below[i] = gv(i) < 1.0 - 1e-9 ? below[i] + 1 : 0;
    if (!ckpt) {
      int cand = -1;
      for (int i = 0; i < m; ++i) {
        if (frozen[i] || noforce[i] || below[i] < 30) continue;
        if (mu(i) >= 0.2 * mu.maxCoeff()) continue;
        if (hist.size() > 30 && mu(i) >= hist[hist.size() - 31](i)) continue;
        if (cand == -1 || mu(i) < mu(cand)) cand = i;
      }
      if (cand >= 0) {
        ckpt = Ckpt{best_res, mu, cand, t};
        frozen[cand] = true;
      }
    }
    RealVector next = gv.cwiseProduct(mu);
    for (int i = 0; i < m; ++i)
      if (frozen[i]) next(i) = 0.0;
    if (r > prev * 1.0000001) damp = true;
    else if (r < 0.3 * prev) damp = false;
    if (damp) next = 0.5 * (mu + next);
    prev = r;
    mu = next;
    hist.push_back(mu);
    if (hist.size() > 40) hist.pop_front();
    ++t;
  }
  if (!opts.polish_enabled()) return {best_mu, best_res};

  // Newton ladder over candidate active sets derived from the best iterate
  double mx = std::max(best_mu.maxCoeff(), 1e-300);
  std::vector<std::vector<int>> tried;
  auto try_set = [&](const std::vector<int>& act) {
    if (act.empty()) return;
    for (const auto& s : tried)
      if (s == act) return;
    tried.push_back(act);
    RealVector cand = newton_on_subset(eng, best_mu, act);
    double r = eng.residual(cand);
    if (r < best_res) {
      best_res = r;
      best_mu = cand;
    }
  };
  for (double tau : {1e-2, 1e-4, 1e-6, 1e-8, 0.0}) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (best_mu(i) > tau * mx) act.push_back(i);
    try_set(act);
    if (best_res < opts.tol) return {best_mu, best_res};
  }
  if (m <= 8) {  // exhaustive subsets, largest first
    for (int size = m; size >= 1 && best_res >= opts.tol; --size) {
      std::vector<int> idx(size);
      std::function<void(int, int)> rec = [&](int start, int depth) {
        if (best_res < opts.tol) return;
        if (depth == size) {
          try_set(idx);
          return;
        }
        for (int i = start; i < m; ++i) {
          idx[depth] = i;
          rec(i + 1, depth + 1);
        }
      };
      rec(0, 0);
    }
  }
  return {best_mu, best_res};
}

// decision operators and certificate in the signal space
IdentifyResult assemble_result(const Engine& eng, const RealVector& mu, double res,
                               int iters, const Options& opts) {
  const int m = eng.m;
  IdentifyResult out;
  Matrix lam2 = eng.h * mu.asDiagonal().toDenseMatrix().cast<Cplx>() * eng.h;
  Matrix lam = sqrt_psd(lam2, 1e-8);
  Matrix lam_pinv = pinv_on_support(lam, 1e-12);
  out.l_opt = lam;
  std::vector<Matrix> elems;
  for (int i = 0; i < m; ++i) {
    Matrix hi = eng.h.col(i) * mu(i) * eng.h.col(i).adjoint();  // h e_i mu_i e_i h
    elems.push_back(lam_pinv * hi * lam_pinv);
  }
  out.povm.elements = std::move(elems);
  out.povm.support = eng.sigma_support;
  for (int i = 0; i < m; ++i) out.povm.labels.push_back(std::to_string(i));
  out.mu.assign(mu.data(), mu.data() + m);
  out.kappa = mu.sum();
  out.iterations = iters;
  out.converged = res < opts.tol;
  out.lost_intensity = eng.sigma.trace().real() - out.kappa;
  RealVector gv = eng.g(mu);
  double c_eq = 0.0, c_ineq = 0.0;
  for (int i = 0; i < m; ++i) {
    c_eq = std::max(c_eq, std::abs(mu(i) * (1.0 - gv(i))) / eng.scale);
    c_ineq = std::max(c_ineq, std::max(0.0, gv(i) - 1.0));
  }
  out.certificate.add("mu(1-g)", c_eq);
  out.certificate.add("max(0,g-1)", c_ineq);
  out.certificate.add("support", eng.support_deficiency(mu));
  // primal value sum_i (psi_i|D_i psi_i); psi_i = h e_i in the signal space
  double primal = 0.0;
  for (int i = 0; i < m; ++i)
    primal += (eng.h.col(i).adjoint() * out.povm.elements[i] * eng.h.col(i))(0, 0).real();
  out.certificate.gap = out.kappa - primal;
  return out;
}

Matrix dft_matrix(int m) {
  Matrix u(m, m);
  for (int i = 0; i < m; ++i)
    for (int n = 0; n < m; ++n)
      u(i, n) = std::exp(Cplx(0, 2.0 * kPi * i * n / m)) / std::sqrt(double(m));
  return u;
}

}  // namespace

IdentifyResult solve_identification(const Matrix& sigma, const Options& opts) {
  Engine eng(sigma);
  if (spectral_norm(sigma) <= 0.0) throw DegenerateGram("sigma = 0");
  if (eng.m < 2) throw DimMismatch("need m >= 2 patterns");

  // rank-2 spans are solved exactly by the covering-cone geometry
  int rank = static_cast<int>(std::round(eng.sigma_support.trace().real()));
  if (opts.polish_enabled() && rank == 2 && eng.m > 2) {
    linop::EigenSystem es = eig_hermitian(sigma);
    Matrix basis = es.vectors.leftCols(2);  // columns span supp(sigma) in C^m
    std::vector<bloch::BlochPoint> pts;
    for (int i = 0; i < eng.m; ++i) {
      Vector v = basis.adjoint() * eng.h.col(i);  // psi_i coords in C^2
      pts.push_back(bloch::bloch_from_operator(v * v.adjoint()));
    }
    try {
      bloch::BlochSolution bs = bloch::solve_polarizations(pts, 1e-10);
      RealVector mu(eng.m);
      for (int i = 0; i < eng.m; ++i) {
        Matrix di2 = bs.povm.elements[i];
        mu(i) = ((basis.adjoint() * eng.h.col(i)).adjoint() * di2 *
                 (basis.adjoint() * eng.h.col(i)))(0, 0)
                    .real();
      }
      double res = eng.residual(mu);
      IdentifyResult out = assemble_result(eng, mu, res, 0, opts);
      if (out.certificate.max_residual() < opts.tol &&
          std::abs(out.kappa - bs.kappa) < 1e-8 * std::max(1.0, bs.kappa)) {
        out.converged = true;
        return out;
      }
    } catch (const Error&) {
      // fall through to the generic engine
    }
  }

  auto [mu, res] = run_engine(eng, opts);
  IdentifyResult out = assemble_result(eng, mu, res, opts.max_iters, opts);
  if (!out.converged && res >= opts.tol) {
    // returned with the best iterate; caller inspects certificate
    out.converged = false;
  }
  return out;
}

IdentifyResult solve_identification(const std::vector<states::Amplitude>& amps,
                                    const Options& opts) {
  if (amps.size() < 2) throw DimMismatch("need m >= 2 amplitudes");
  states::GramMatrix sigma = states::gram_matrix(amps);
  if (spectral_norm(sigma) <= 0.0) throw DegenerateGram("all amplitudes vanish");
  return solve_identification(sigma, opts);
}

IdentifyResult solve_identification_blocks(const Matrix& sigma,
                                           const std::vector<int>& block_sizes,
                                           const Options& opts) {
  const int total = std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
  if (sigma.rows() != total) throw DimMismatch("block sizes inconsistent with sigma");
  linop::require_hermitian(sigma, 1e-8);
  const int m = static_cast<int>(block_sizes.size());
  std::vector<int> offs(m, 0);
  for (int i = 1; i < m; ++i) offs[i] = offs[i - 1] + block_sizes[i - 1];
  Matrix h = sqrt_psd(sigma, 1e-8);
  double scale = std::max(sigma.trace().real(), 1e-300);

  auto block_eval = [&](const Matrix& mu_full) {
    Matrix lam = sqrt_psd(h * mu_full * h, 1e-10);
    return (h * pinv_on_support(lam, 1e-12) * h).eval();
  };
  // init: mu_i = (h_ii block)^2
  Matrix mu = Matrix::Zero(total, total);
  for (int i = 0; i < m; ++i) {
    Matrix hb = h.block(offs[i], offs[i], block_sizes[i], block_sizes[i]);
    mu.block(offs[i], offs[i], block_sizes[i], block_sizes[i]) = hb * hb;
  }
  double best_res = std::numeric_limits<double>::infinity();
  Matrix best_mu = mu;
  double prev = std::numeric_limits<double>::infinity();
  bool damp = false;
  int t = 0;
  for (; t < opts.max_iters; ++t) {
    Matrix a = block_eval(mu);
    double res = 0.0;
    Matrix next = Matrix::Zero(total, total);
    for (int i = 0; i < m; ++i) {
      Matrix gi = a.block(offs[i], offs[i], block_sizes[i], block_sizes[i]);
      gi = ((gi + gi.adjoint()) / 2.0).eval();
      Matrix mui = mu.block(offs[i], offs[i], block_sizes[i], block_sizes[i]);
      res = std::max(res, (mui * (Matrix::Identity(block_sizes[i], block_sizes[i]) - gi)).norm() / scale);
      linop::EigenSystem es = eig_hermitian(gi);
      res = std::max(res, std::max(0.0, es.values.maxCoeff() - 1.0));
      Matrix gs = sqrt_psd((gi + gi.adjoint()) / 2.0 +
                           1e-15 * Matrix::Identity(block_sizes[i], block_sizes[i]), 1e-6);
      next.block(offs[i], offs[i], block_sizes[i], block_sizes[i]) = gs * mui * gs;
    }
    if (res < best_res) {
      best_res = res;
      best_mu = mu;
    }
    if (res < opts.tol) break;
    if (res > prev * 1.0000001) damp = true;
    else if (res < 0.3 * prev) damp = false;
    if (damp) next = 0.5 * (mu + next);
    prev = res;
    mu = next;
  }
  IdentifyResult out;
  Matrix lam = sqrt_psd(h * best_mu * h, 1e-8);
  Matrix lam_pinv = pinv_on_support(lam, 1e-12);
  out.l_opt = lam;
  for (int i = 0; i < m; ++i) {
    Matrix hi = Matrix::Zero(total, total);
    hi.block(0, offs[i], total, block_sizes[i]) = h.block(0, offs[i], total, block_sizes[i]);
    Matrix di = lam_pinv * hi * best_mu * hi.adjoint() * lam_pinv;
    out.povm.elements.push_back((di + di.adjoint()) / 2.0);
    out.povm.labels.push_back(std::to_string(i));
    out.mu.push_back(
        best_mu.block(offs[i], offs[i], block_sizes[i], block_sizes[i]).trace().real());
  }
  out.povm.support = linop::support_projector(sigma);
  out.kappa = std::accumulate(out.mu.begin(), out.mu.end(), 0.0);
  out.iterations = t;
  out.converged = best_res < opts.tol;
  out.certificate.add("block_kkt", best_res);
  out.lost_intensity = sigma.trace().real() - out.kappa;
  return out;
}

IdentifyResult srm_equidiagonal(const Matrix& sigma, double tol) {
  linop::require_hermitian(sigma, 1e-8);
  const int m = static_cast<int>(sigma.rows());
  Matrix h = sqrt_psd(sigma, 1e-8);
  double a = h(0, 0).real();
  for (int i = 1; i < m; ++i)
    if (std::abs(h(i, i).real() - a) > tol * std::max(1.0, a))
      throw NotEquidiagonal("sqrt(sigma) diagonal is not constant");
  Engine eng(sigma);
  RealVector mu(m);
  for (int i = 0; i < m; ++i) mu(i) = std::norm(h(i, i));
  Options opts;
  opts.tol = 1e-9;
  IdentifyResult out = assemble_result(eng, mu, eng.residual(mu), 1, opts);
  out.converged = out.certificate.max_residual() < 1e-8;
  return out;
}

IdentifyResult srm_equidiagonal(const std::vector<states::Amplitude>& amps, double tol) {
  return srm_equidiagonal(states::gram_matrix(amps), tol);
}

double equiangular_closed_form(int m, double nu, double gamma) {
  if (m < 2) throw DimMismatch("m >= 2");
  if (gamma <= 1.0 / (1.0 - m) || gamma > 1.0) throw GammaOutOfRange("gamma outside (1/(1-m), 1]");
  double s = (m - 1) * std::sqrt(std::max(1.0 - gamma, 0.0)) +
             std::sqrt(1.0 + (m - 1) * gamma);
  return nu / m * s * s;
}

Matrix equiangular_gram(int m, double nu, double gamma) {
  Matrix sigma = Matrix::Constant(m, m, Cplx(nu * gamma, 0));
  for (int i = 0; i < m; ++i) sigma(i, i) = nu;
  return sigma;
}

std::vector<states::Amplitude> equiangular_amplitudes(int m, double nu, double gamma) {
  // psi_i = phi_0 + phi_i with orthogonal phi's, ||phi_0||^2 = nu gamma,
  // ||phi_i||^2 = nu (1-gamma); dimension m+1
  if (gamma < 0.0 || gamma > 1.0)
    throw GammaOutOfRange("explicit construction needs gamma in [0, 1]");
  std::vector<states::Amplitude> amps;
  for (int i = 0; i < m; ++i) {
    Vector v = Vector::Zero(m + 1);
    v(0) = std::sqrt(nu * gamma);
    v(i + 1) = std::sqrt(nu * (1.0 - gamma));
    amps.push_back(states::Amplitude{states::FockBasis{m + 1}, v});
  }
  return amps;
}

IdentifyResult cyclic_solve(const Vector& sigma_row, double tol) {
  const int m = static_cast<int>(sigma_row.size());
  if (m < 1) throw DimMismatch("empty sigma row");
  Matrix u = dft_matrix(m);
  // circulant eigenvalues lambda_k = sum_l sigma(l) e^{-2pi j k l / m}
  RealVector eigs(m);
  for (int k = 0; k < m; ++k) {
    Cplx acc = 0.0;
    for (int l = 0; l < m; ++l)
      acc += sigma_row(l) * std::exp(Cplx(0, -2.0 * kPi * k * l / m));
    eigs(k) = acc.real();
    if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, std::abs(acc.real())))
      throw NonHermitian("sigma row is not Hermitian-circulant");
  }
  double mx = eigs.cwiseAbs().maxCoeff();
  if (eigs.minCoeff() < -1e-9 * std::max(1.0, mx)) throw NotPsd("circulant sigma not PSD");
  Matrix sigma = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      int l = (i - k) % m;
      if (l < 0) l += m;
      sigma(i, k) = sigma_row(l);
    }
  sigma = ((sigma + sigma.adjoint()) / 2.0).eval();
  IdentifyResult out = srm_equidiagonal(sigma, 1e-8);
  std::sort(eigs.data(), eigs.data() + m, std::greater<double>());
  out.sigma_eigenvalues = eigs;
  (void)tol;
  return out;
}

measure::Povm phase_povm(int fock_dim, int n_points) {
  if (n_points < fock_dim) throw TooFewPoints("need n_points >= fock_dim");
  std::vector<Matrix> elems;
  std::vector<std::string> labels;
  for (int k = 0; k < n_points; ++k) {
    double x = double(k) / n_points;
    Vector chi(fock_dim);
    for (int n = 0; n < fock_dim; ++n) chi(n) = std::exp(Cplx(0, 2.0 * kPi * x * n));
    elems.push_back((chi * chi.adjoint()) / double(n_points));
    labels.push_back("x=" + std::to_string(x));
  }
  measure::Povm m = measure::make_complete_povm(std::move(elems));
  m.labels = std::move(labels);
  return m;
}

RealVector phase_distribution(const measure::Povm& povm, const Matrix& s) {
  RealVector p(povm.outcomes());
  for (int k = 0; k < povm.outcomes(); ++k)
    p(k) = (povm.elements[k] * s).trace().real();
  return p;
}

}  // namespace waverec::identify
