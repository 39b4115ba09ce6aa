#include "waverec/states.hpp"

#include <cmath>

#include "waverec/linop.hpp"

namespace waverec::states {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool same_basis(const Basis& a, const Basis& b) { return a == b; }

int basis_size(const Basis& b) {
  if (const auto* g = std::get_if<GridBasis>(&b)) return g->points;
  return std::get<FockBasis>(b).dim;
}

double Amplitude::intensity() const {
  double w = 1.0;
  if (const auto* g = std::get_if<GridBasis>(&basis)) w = g->step;
  return w * coeffs.squaredNorm();
}

Cplx Amplitude::inner(const Amplitude& other) const {
  if (!same_basis(basis, other.basis)) throw BasisMismatch("inner product across bases");
  double w = 1.0;
  if (const auto* g = std::get_if<GridBasis>(&basis)) w = g->step;
  return w * coeffs.dot(other.coeffs);  // Eigen dot conjugates the left argument
}

double DensityOperator::total_intensity() const {
  double w = 1.0;
  if (const auto* g = std::get_if<GridBasis>(&basis)) w = g->step;
  return w * op.trace().real();
}

Amplitude coherent_vector(Cplx alpha, int fock_dim) {
  if (fock_dim < 1) throw DimMismatch("fock_dim must be >= 1");
  double lam = std::norm(alpha);
  if (lam > 0 && displaced_thermal_tail(lam, 0.0, fock_dim) > 1e-9)
    throw Overflow("truncation loss above 1e-9 for this |alpha| and fock_dim");
  Amplitude amp{FockBasis{fock_dim}, Vector(fock_dim)};
  Cplx c = std::exp(-lam / 2.0);
  for (int n = 0; n < fock_dim; ++n) {
    amp.coeffs(n) = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return amp;
}

Cplx coherent_overlap(const Vector& alpha, const Vector& alpha_prime) {
  if (alpha.size() != alpha_prime.size()) throw DimMismatch("coherent vector lengths");
  Cplx cross = alpha.dot(alpha_prime);  // sum conj(alpha_i) alpha'_i
  return std::exp(-0.5 * alpha_prime.squaredNorm() + cross - 0.5 * alpha.squaredNorm());
}

Cplx coherent_overlap(Cplx a, Cplx ap) {
  Vector x(1), y(1);
  x(0) = a;
  y(0) = ap;
  return coherent_overlap(x, y);
}

GramMatrix gram_matrix(const std::vector<Amplitude>& amps) {
  const int m = static_cast<int>(amps.size());
  GramMatrix sigma(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) sigma(i, k) = amps[i].inner(amps[k]);
  return (sigma + sigma.adjoint().eval()) / 2.0;
}

DensityOperator mixture_density(const std::vector<Amplitude>& amps,
                                const std::vector<double>& weights) {
  if (amps.empty()) throw DimMismatch("no amplitudes");
  if (amps.size() != weights.size()) throw DimMismatch("weights/amplitudes count");
  const int n = static_cast<int>(amps[0].coeffs.size());
  Matrix s = Matrix::Zero(n, n);
  for (size_t i = 0; i < amps.size(); ++i) {
    if (!same_basis(amps[i].basis, amps[0].basis)) throw BasisMismatch("mixture bases differ");
    if (weights[i] < 0.0) throw NegativeWeight("mixture weight < 0");
    s += weights[i] * (amps[i].coeffs * amps[i].coeffs.adjoint());
  }
  return DensityOperator{amps[0].basis, s};
}

Matrix annihilation_operator(int fock_dim) {
  Matrix a = Matrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix number_operator(int fock_dim) {
  Matrix n = Matrix::Zero(fock_dim, fock_dim);
  for (int k = 0; k < fock_dim; ++k) n(k, k) = double(k);
  return n;
}

Matrix quadrature_operator(int fock_dim) {
  Matrix a = annihilation_operator(fock_dim);
  return (a + a.adjoint()) / 2.0;
}

Matrix displacement_operator(Cplx theta, int fock_dim) {
  // G = theta a^dag - conj(theta) a is anti-Hermitian; exp via eig of -iG
  Matrix a = annihilation_operator(fock_dim);
  Matrix g = theta * a.adjoint() - std::conj(theta) * a;
  Matrix h = Cplx(0, -1) * g;  // Hermitian
  linop::EigenSystem es = linop::eig_hermitian(h);
  Matrix d = Matrix::Zero(fock_dim, fock_dim);
  for (int k = 0; k < fock_dim; ++k)
    d += std::exp(Cplx(0, 1) * es.values(k)) * es.vectors.col(k) * es.vectors.col(k).adjoint();
  return d;
}

double displaced_thermal_tail(double abs_theta_sq, double nbar, int dim) {
  // exact photon distribution: p_n = nbar^n/(1+nbar)^{n+1}
  //   * exp(-|t|^2/(1+nbar)) * L_n(-|t|^2/(nbar(1+nbar)))
  if (nbar <= 0.0) {  // Poisson
    double head = 0.0, term = std::exp(-abs_theta_sq);
    for (int n = 0; n < dim; ++n) {
      head += term;
      term *= abs_theta_sq / (n + 1);
    }
    return std::max(1.0 - head, 0.0);
  }
  double x = -abs_theta_sq / (nbar * (1.0 + nbar));
  double pref = std::exp(-abs_theta_sq / (1.0 + nbar)) / (1.0 + nbar);
  double ratio = nbar / (1.0 + nbar);
  double l_prev = 1.0, l_cur = 1.0 - x;
  double geom = pref;
  double head = geom * l_prev;
  if (dim > 1) {
    geom *= ratio;
    head += geom * l_cur;
  }
  for (int n = 1; n + 1 < dim; ++n) {
    double l_next = ((2.0 * n + 1.0 - x) * l_cur - n * l_prev) / (n + 1.0);
    l_prev = l_cur;
    l_cur = l_next;
    geom *= ratio;
    head += geom * l_cur;
  }
  return std::max(1.0 - head, 0.0);
}

DensityOperator thermal_coherent_density(Cplx theta, double nbar, int fock_dim,
                                         double max_tail) {
  if (nbar < 0.0) throw NegativeWeight("nbar must be >= 0");
  if (displaced_thermal_tail(std::norm(theta), nbar, fock_dim) > max_tail)
    throw TruncationTooSmall("photon-number tail mass above the accepted loss");
  if (nbar == 0.0) {
    Amplitude v = coherent_vector(theta, fock_dim);
    return DensityOperator{FockBasis{fock_dim}, v.coeffs * v.coeffs.adjoint()};
  }
  Matrix th = Matrix::Zero(fock_dim, fock_dim);
  double p = 1.0 / (1.0 + nbar);
  for (int n = 0; n < fock_dim; ++n) {
    th(n, n) = p;
    p *= nbar / (1.0 + nbar);
  }
  Matrix d = displacement_operator(theta, fock_dim);
  return DensityOperator{FockBasis{fock_dim}, d * th * d.adjoint()};
}

Amplitude fourier_involution(const Amplitude& phi) {
  const auto* g = std::get_if<GridBasis>(&phi.basis);
  if (!g) throw NonUniformGrid("fourier_involution needs a grid amplitude");
  if (g->step <= 0.0) throw NonUniformGrid("grid step must be positive");
  const int n = g->points;
  Amplitude out{phi.basis, Vector(n)};
  for (int k = 0; k < n; ++k) {
    double p = g->origin + k * g->step;
    Cplx acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double q = g->origin + i * g->step;
      acc += std::conj(phi.coeffs(i)) * std::exp(Cplx(0, 2.0 * kPi * p * q));
    }
    out.coeffs(k) = acc * g->step;
  }
  return out;
}

UncertaintyProduct uncertainty_product(const Amplitude& phi) {
  const auto* g = std::get_if<GridBasis>(&phi.basis);
  if (!g) throw NonUniformGrid("uncertainty_product needs a grid amplitude");
  double total = phi.intensity();
  if (total <= 0.0) throw ZeroAmplitude("zero amplitude");
  auto moments = [](const Amplitude& a) {
    const auto& gb = std::get<GridBasis>(a.basis);
    double i0 = 0.0, i1 = 0.0, i2 = 0.0;
    for (int i = 0; i < gb.points; ++i) {
      double x = gb.origin + i * gb.step;
      double w = std::norm(a.coeffs(i)) * gb.step;
      i0 += w;
      i1 += w * x;
      i2 += w * x * x;
    }
    double mean = i1 / i0;
    return std::sqrt(std::max(i2 / i0 - mean * mean, 0.0));
  };
  UncertaintyProduct up;
  up.sigma_q = moments(phi);
  up.sigma_p = moments(fourier_involution(phi));
  return up;
}

Amplitude gaussian_amplitude(double mean_q, double mean_p, double sigma_q,
                             int points, double span_sigmas) {
  double half = span_sigmas * sigma_q;
  GridBasis g{mean_q - half, 2.0 * half / (points - 1), points};
  Amplitude amp{g, Vector(points)};
  double c = std::pow(2.0 * kPi * sigma_q * sigma_q, -0.25);
  for (int i = 0; i < points; ++i) {
    double q = g.origin + i * g.step;
    amp.coeffs(i) = c * std::exp(Cplx(0, 2.0 * kPi * (q - mean_q / 2.0) * mean_p)) *
                    std::exp(Cplx(-(q - mean_q) * (q - mean_q) / (4.0 * sigma_q * sigma_q), 0));
  }
  return amp;
}

HusimiField husimi_density(const DensityOperator& s, const AlphaGrid& grid) {
  const auto* f = std::get_if<FockBasis>(&s.basis);
  if (!f) throw BasisMismatch("husimi_density needs a Fock-basis density");
  const int n = grid.points_per_axis;
  HusimiField field{grid, Eigen::MatrixXd(n, n), 0.0};
  double lo = -grid.alpha_max;
  double d = 2.0 * grid.alpha_max / (n - 1);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      Cplx alpha(lo + ix * d, lo + iy * d);
      Amplitude v = [&] {
        // direct truncated coherent coefficients; no tail check here
        Amplitude a{FockBasis{f->dim}, Vector(f->dim)};
        Cplx c = std::exp(-std::norm(alpha) / 2.0);
        for (int k = 0; k < f->dim; ++k) {
          a.coeffs(k) = c;
          c *= alpha / std::sqrt(double(k + 1));
        }
        return a;
      }();
      double k = std::max((v.coeffs.adjoint() * s.op * v.coeffs)(0, 0).real(), 0.0);
      field.values(ix, iy) = k;
      field.integral += k * d * d / kPi;
    }
  }
  return field;
}

}  // namespace waverec::states
