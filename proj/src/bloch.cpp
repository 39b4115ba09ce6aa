#include "waverec/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "waverec/linop.hpp"

namespace waverec::bloch {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix pauli_y() {
  Matrix m(2, 2);
  m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
  return m;
}
Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

BlochPoint bloch_from_operator(const Matrix& r) {
  if (r.rows() != 2 || r.cols() != 2) throw DimMismatch("Bloch encoding needs 2x2");
  linop::require_hermitian(r, 1e-9);
  BlochPoint p;
  p.nu = r.trace().real();
  p.r(0) = (r * pauli_x()).trace().real();
  p.r(1) = (r * pauli_y()).trace().real();
  p.r(2) = (r * pauli_z()).trace().real();
  return p;
}

Matrix operator_from_bloch(const BlochPoint& p) {
  return (p.nu * Matrix::Identity(2, 2) + p.r(0) * pauli_x() + p.r(1) * pauli_y() +
          p.r(2) * pauli_z()) /
         2.0;
}

double pair_closed_form(const BlochPoint& p, const BlochPoint& q) {
  double dr = (p.r - q.r).norm();
  if (dr <= std::abs(p.nu - q.nu)) throw Dominated("pair violates non-domination");
  return 0.5 * (p.nu + q.nu) + 0.5 * dr;
}

namespace {

struct Candidate {
  Vec3 l;
  double lambda = 0.0;
  std::vector<int> subset;
  std::vector<double> mu_subset;
};

// Solve nu_j + |r_j - l| = lambda on a subset, l in the affine hull.
std::optional<std::pair<Vec3, double>> constant_sum_solve(
    const std::vector<BlochPoint>& pts, const std::vector<int>& sub, double scale) {
  const int s = static_cast<int>(sub.size());
  Eigen::MatrixXd rs(s, 3);
  Eigen::VectorXd nus(s);
  for (int j = 0; j < s; ++j) {
    rs.row(j) = pts[sub[j]].r.transpose();
    nus(j) = pts[sub[j]].nu;
  }
  Vec3 r0 = rs.row(0).transpose();
  Eigen::MatrixXd diffs(3, s - 1);
  for (int j = 1; j < s; ++j) diffs.col(j - 1) = rs.row(j).transpose() - r0;
  // rank-revealing basis of the affine hull
  Eigen::MatrixXd y;
  if (s > 1) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diffs);
    qr.setThreshold(1e-9);
    int rank = static_cast<int>(qr.rank());
    Eigen::MatrixXd q = qr.householderQ();
    y = q.leftCols(rank);
  } else {
    y = Eigen::MatrixXd(3, 0);
  }
  const int k = static_cast<int>(y.cols());
  Eigen::VectorXd u = y.transpose() * (rs.colwise().mean().transpose() - r0);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    Vec3 l = r0 + y * u;
    Eigen::VectorXd dist(s), vals(s);
    for (int j = 0; j < s; ++j) {
      dist(j) = (rs.row(j).transpose() - l).norm();
      if (dist(j) < 1e-12 * std::max(1.0, scale)) return std::nullopt;
      vals(j) = nus(j) + dist(j);
    }
    double lambda = vals.mean();
    Eigen::VectorXd f = vals.array() - lambda;
    double fn = f.cwiseAbs().maxCoeff();
    if (fn < 1e-12 * std::max(1.0, scale)) return std::make_pair(l, lambda);
    Eigen::MatrixXd jac(s, k);
    for (int j = 0; j < s; ++j)
      jac.row(j) = -((rs.row(j).transpose() - l) / dist(j)).transpose() * y;
    Eigen::MatrixXd jc = jac.rowwise() - jac.colwise().mean();
    Eigen::VectorXd du = jc.colPivHouseholderQr().solve(-f);
    double step = 1.0;
    bool moved = false;
    while (step > 1e-12) {
      Eigen::VectorXd uc = u + step * du;
      Vec3 lc = r0 + y * uc;
      bool ok = true;
      Eigen::VectorXd vv(s);
      for (int j = 0; j < s; ++j) {
        double dd = (rs.row(j).transpose() - lc).norm();
        if (dd < 1e-12 * std::max(1.0, scale)) { ok = false; break; }
        vv(j) = nus(j) + dd;
      }
      if (ok && (vv.array() - vv.mean()).abs().maxCoeff() < fn) {
        moved = true;
        u = uc;
        break;
      }
      step /= 2.0;
    }
    if (!moved) return std::nullopt;
    if (fn >= prev && it > 50) return std::nullopt;
    prev = fn;
  }
  return std::nullopt;
}

void enumerate_subsets(int n, int size, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(size);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == size) {
      out.push_back(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

BlochSolution solve_polarizations(const std::vector<BlochPoint>& points, double tol) {
  const int m_all = static_cast<int>(points.size());
  if (m_all < 2) throw DimMismatch("need at least 2 points");
  if (m_all > 64) throw DimMismatch("more than 64 hypotheses rejected");
  for (const auto& p : points)
    if (p.r.norm() > p.nu + 1e-9) throw NotPsd("point with |r| > nu");
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.nu);

  // prune dominated points (keep the larger nu; first of exact duplicates)
  std::vector<int> keep;
  std::vector<int> pruned;
  for (int i = 0; i < m_all; ++i) {
    bool dominated = false;
    for (int k = 0; k < m_all && !dominated; ++k) {
      if (k == i) continue;
      double dr = (points[i].r - points[k].r).norm();
      if (dr <= std::abs(points[k].nu - points[i].nu) + 1e-12 * std::max(1.0, scale)) {
        if (points[k].nu > points[i].nu ||
            (points[k].nu == points[i].nu && k < i))
          dominated = true;
      }
    }
    (dominated ? pruned : keep).push_back(i);
  }
  if (static_cast<int>(keep.size()) < 2) throw AllDominated("pruning left fewer than 2 points");

  const int m = static_cast<int>(keep.size());
  std::optional<Candidate> best;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int size = 2; size <= std::min(4, m); ++size) {
    std::vector<std::vector<int>> subs;
    enumerate_subsets(m, size, subs);
    for (const auto& sub_local : subs) {
      std::vector<int> sub;
      for (int j : sub_local) sub.push_back(keep[j]);
      auto sol = constant_sum_solve(points, sub, scale);
      if (!sol) continue;
      auto [l, lambda] = *sol;
      // barycentric weights pi on the subset: sum pi r = l, sum pi = 1
      const int s = static_cast<int>(sub.size());
      Eigen::MatrixXd a(4, s);
      Eigen::VectorXd b(4);
      for (int j = 0; j < s; ++j) {
        a.block(0, j, 3, 1) = points[sub[j]].r;
        a(3, j) = 1.0;
      }
      b.head(3) = l;
      b(3) = 1.0;
      Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
      if ((a * pi - b).norm() > 1e-8 * std::max(1.0, scale)) continue;
      if (pi.minCoeff() < -1e-9) continue;
      double denom = lambda;
      for (int j = 0; j < s; ++j) denom -= pi(j) * points[sub[j]].nu;
      if (denom <= 1e-12 * std::max(1.0, scale)) continue;
      bool lam_above_nu = true;
      for (int j = 0; j < s; ++j)
        if (lambda - points[sub[j]].nu <= 1e-12 * std::max(1.0, scale)) lam_above_nu = false;
      if (!lam_above_nu) continue;
      // covering check over all points
      double viol = 0.0;
      for (const auto& p : points)
        viol = std::max(viol, p.nu + (p.r - l).norm() - lambda);
      if (viol > tol * std::max(1.0, scale)) {
        best_violation = std::min(best_violation, viol);
        continue;
      }
      Candidate cand;
      cand.l = l;
      cand.lambda = lambda;
      cand.subset = sub;
      for (int j = 0; j < s; ++j) cand.mu_subset.push_back(pi(j) / denom);
      // ties within 1e-10: first (lexicographic) subset wins
      if (!best || cand.lambda > best->lambda + 1e-10 * std::max(1.0, scale))
        best = cand;
    }
  }
  if (!best)
    throw NumericalFailure("no feasible covering apex; best covering violation " +
                           std::to_string(best_violation));

  BlochSolution out;
  out.l = best->l;
  out.lambda = best->lambda;
  out.kappa = best->lambda;
  out.pruned = pruned;
  out.active_set = best->subset;
  out.mu.assign(m_all, 0.0);
  out.d.assign(m_all, Vec3::Zero());
  out.delta.assign(m_all, 0.0);
  for (size_t j = 0; j < best->subset.size(); ++j) {
    int i = best->subset[j];
    out.mu[i] = best->mu_subset[j];
    out.d[i] = out.mu[i] * (points[i].r - out.l);
    out.delta[i] = out.d[i].norm();
  }
  // POVM D_i = delta_i + d_i . sigma; zero-decision points get D_i = 0
  std::vector<Matrix> elems;
  for (int i = 0; i < m_all; ++i)
    elems.push_back(out.delta[i] * Matrix::Identity(2, 2) + out.d[i](0) * pauli_x() +
                    out.d[i](1) * pauli_y() + out.d[i](2) * pauli_z());
  out.povm = measure::make_complete_povm(std::move(elems));

  // certificate under (L - R_i) D_i = 0, L >= R_i
  Matrix lop = (out.lambda * Matrix::Identity(2, 2) + out.l(0) * pauli_x() +
                out.l(1) * pauli_y() + out.l(2) * pauli_z()) /
               2.0;
  double worst_min_eig = 0.0, worst_slack = 0.0;
  for (int i = 0; i < m_all; ++i) {
    Matrix ri = operator_from_bloch(points[i]);
    auto es = linop::eig_hermitian(lop - ri);
    worst_min_eig = std::min(worst_min_eig, es.values.minCoeff());
    worst_slack =
        std::max(worst_slack, linop::spectral_norm((lop - ri) * out.povm.elements[i]));
  }
  double s = std::max(scale, 1e-300);
  out.certificate.add("min_eig(L-R_i)", std::max(0.0, -worst_min_eig) / s);
  out.certificate.add("(L-R_i)D_i", worst_slack / s);
  double value = 0.0;
  for (int i = 0; i < m_all; ++i)
    value += (operator_from_bloch(points[i]) * out.povm.elements[i]).trace().real();
  out.certificate.gap = out.lambda - value;
  return out;
}

namespace {

// Welzl-style minimal enclosing sphere for <= 64 points (iterative restarts).
std::pair<Vec3, double> min_enclosing_sphere(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= double(pts.size());
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, (p - c).norm());
  // Ritter-style shrink iterations, then exact polish by subset enumeration
  for (int it = 0; it < 200; ++it) {
    int far = 0;
    double dmax = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      double d = (pts[i] - c).norm();
      if (d > dmax) {
        dmax = d;
        far = static_cast<int>(i);
      }
    }
    double step = (dmax - r) / 2.0;
    if (step < 1e-15) break;
    c += (pts[far] - c).normalized() * step;
    r = 0.0;
    for (const auto& p : pts) r = std::max(r, (p - c).norm());
  }
  return {c, r};
}

}  // namespace

BlochSolution special_case_solvers(const std::vector<BlochPoint>& points,
                                   SpecialMode mode, double tol) {
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.nu);
  if (mode == SpecialMode::PureEllipsoid) {
    for (const auto& p : points)
      if (std::abs(p.r.norm() - p.nu) > 1e-8 * std::max(1.0, scale))
        throw ModeMismatch("pure mode requires |r_i| = nu_i");
    // the covering cone constraint nu_j + |r_j - l| = lambda is, for pure
    // points, the circumscribing ellipsoid with foci 0 and l; the generic
    // subset solver realizes exactly that geometry
    return solve_polarizations(points, tol);
  }
  // equal intensity: minimal enclosing sphere, center in the hull of the
  // tangency points; kappa = rho + nu0
  double nu0 = points.at(0).nu;
  for (const auto& p : points)
    if (std::abs(p.nu - nu0) > 1e-8 * std::max(1.0, scale))
      throw ModeMismatch("equal-intensity mode requires equal nu_i");
  BlochSolution out = solve_polarizations(points, tol);
  // cross-check the sphere reading: lambda = rho + nu0
  std::vector<Vec3> rs;
  for (const auto& p : points) rs.push_back(p.r);
  auto [c, rho] = min_enclosing_sphere(rs);
  if (std::abs(out.lambda - (rho + nu0)) > 1e-7 * std::max(1.0, scale) ||
      (c - out.l).norm() > 1e-6 * std::max(1.0, scale) + 1e-9)
    throw NumericalFailure("sphere route disagrees with the generic solver");
  return out;
}

}  // namespace waverec::bloch
