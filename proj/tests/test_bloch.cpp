#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "waverec/bloch.hpp"
#include "waverec/detect.hpp"
#include "waverec/linop.hpp"
#include "waverec/oracle.hpp"

using namespace waverec;
using namespace waverec::bloch;
using linop::spectral_norm;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<BlochPoint> trine_points() {
  std::vector<BlochPoint> pts;
  for (int k = 0; k < 3; ++k) {
    BlochPoint p;
    p.nu = 1.0 / 3.0;
    p.r = Vec3(std::cos(2.0 * kPi * k / 3.0) / 3.0, std::sin(2.0 * kPi * k / 3.0) / 3.0, 0);
    pts.push_back(p);
  }
  return pts;
}

BlochPoint random_point(oracle::SeededRng& rng, bool pure = false) {
  BlochPoint p;
  Vec3 r(rng.normal(), rng.normal(), rng.normal());
  r.normalize();
  double nu = 0.2 + rng.uniform();
  double len = pure ? nu : nu * rng.uniform();
  p.nu = nu;
  p.r = len * r;
  return p;
}

}  // namespace

TEST_CASE("pauli_roundtrip: pinned and random") {
  BlochPoint half = bloch_from_operator((0.5 * Matrix::Identity(2, 2)).eval());
  CHECK(half.nu == doctest::Approx(1.0));
  CHECK(half.r.norm() < 1e-14);

  Matrix ket0 = Matrix::Zero(2, 2);
  ket0(0, 0) = 1;
  BlochPoint p0 = bloch_from_operator(ket0);
  CHECK(p0.nu == doctest::Approx(1.0));
  CHECK((p0.r - Vec3(0, 0, 1)).norm() < 1e-14);

  oracle::SeededRng rng(14);
  for (int t = 0; t < 100; ++t) {
    Matrix h = oracle::random_hermitian(2, rng);
    BlochPoint p = bloch_from_operator(h);
    CHECK(spectral_norm(operator_from_bloch(p) - h) < 1e-14);
    // Det R = (nu^2 - |r|^2)/4
    Cplx det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    CHECK(det.real() ==
          doctest::Approx((p.nu * p.nu - p.r.squaredNorm()) / 4.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bloch_from_operator(Matrix::Identity(3, 3).eval()), DimMismatch);
}

TEST_CASE("solve_polarizations: antipodal pure pair") {
  std::vector<BlochPoint> pts = {{0.5, Vec3(0, 0, 0.5)}, {0.5, Vec3(0, 0, -0.5)}};
  BlochSolution s = solve_polarizations(pts);
  CHECK(s.kappa == doctest::Approx(1.0).epsilon(1e-11));
  // decision operators are the +/- z projectors
  Matrix pz = Matrix::Zero(2, 2);
  pz(0, 0) = 1;
  CHECK(spectral_norm(s.povm.elements[0] - pz) < 1e-9);
}

TEST_CASE("solve_polarizations: trine") {
  BlochSolution s = solve_polarizations(trine_points());
  CHECK(s.kappa == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(s.l.norm() < 1e-9);
  CHECK(s.certificate.max_residual() < 1e-8);
  // D_i = (1/3)(1 + rhat_i . sigma), rank one
  for (int i = 0; i < 3; ++i) {
    CHECK(s.delta[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    auto es = linop::eig_hermitian(s.povm.elements[i]);
    CHECK(es.values(1) < 1e-9);  // rank 1
  }
  auto rep = measure::validate_povm(s.povm);
  CHECK(rep.completeness_residual < 1e-9);
}

TEST_CASE("solve_polarizations: two mixed points on the x axis") {
  std::vector<BlochPoint> pts = {{0.5, Vec3(0.3, 0, 0)}, {0.5, Vec3(-0.1, 0, 0)}};
  BlochSolution s = solve_polarizations(pts);
  CHECK(s.kappa == doctest::Approx(0.7).epsilon(1e-11));
}

TEST_CASE("solve_polarizations: solution invariants") {
  oracle::SeededRng rng(99);
  for (int t = 0; t < 30; ++t) {
    int m = 2 + int(rng.raw() % 4);
    std::vector<BlochPoint> pts;
    for (int i = 0; i < m; ++i) pts.push_back(random_point(rng));
    BlochSolution s;
    try {
      s = solve_polarizations(pts);
    } catch (const AllDominated&) {
      continue;
    }
    // sum delta = 1, sum d = 0, delta_i = |d_i|
    double dsum = 0.0;
    Vec3 vsum = Vec3::Zero();
    for (size_t i = 0; i < pts.size(); ++i) {
      dsum += s.delta[i];
      vsum += s.d[i];
      CHECK(s.delta[i] == doctest::Approx(s.d[i].norm()).epsilon(1e-9));
    }
    CHECK(dsum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(vsum.norm() < 1e-9);
    CHECK(int(s.active_set.size()) <= 4);
    // covering
    for (const auto& p : pts)
      CHECK(p.nu + (p.r - s.l).norm() <= s.lambda + 1e-8);
    // value: sum Tr(R_i D_i) = kappa
    double value = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
      value += (operator_from_bloch(pts[i]) * s.povm.elements[i]).trace().real();
    CHECK(value == doctest::Approx(s.kappa).epsilon(1e-8));
    CHECK(s.certificate.max_residual() < 1e-8);
  }
}

TEST_CASE("solve_polarizations: rotation covariance") {
  oracle::SeededRng rng(55);
  std::vector<BlochPoint> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(random_point(rng));
  BlochSolution base = solve_polarizations(pts);
  // rotate all r_i about z by a fixed angle
  double a = 0.83;
  Eigen::Matrix3d rot;
  rot << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  std::vector<BlochPoint> rpts = pts;
  for (auto& p : rpts) p.r = rot * p.r;
  BlochSolution rotated = solve_polarizations(rpts);
  CHECK(rotated.kappa == doctest::Approx(base.kappa).epsilon(1e-10));
  CHECK((rotated.l - rot * base.l).norm() < 1e-8);
  for (size_t i = 0; i < pts.size(); ++i)
    CHECK((rotated.d[i] - rot * base.d[i]).norm() < 1e-8);
}

TEST_CASE("solve_polarizations: oracle sampling never beats kappa") {
  oracle::SeededRng rng(123);
  std::vector<BlochPoint> pts = trine_points();
  BlochSolution s = solve_polarizations(pts);
  std::vector<Matrix> weights;
  for (const auto& p : pts) weights.push_back(operator_from_bloch(p));
  for (int draw = 0; draw < 500; ++draw) {
    measure::Povm m = oracle::random_povm(2, 3, rng);
    CHECK(oracle::povm_objective_trace(weights, m) <= s.kappa + 1e-8);
  }
}

TEST_CASE("solve_polarizations: dominated pruning and errors") {
  // the second point is dominated (same r, smaller nu)
  std::vector<BlochPoint> pts = {{0.8, Vec3(0.1, 0, 0)},
                                 {0.5, Vec3(0.1, 0, 0)},
                                 {0.5, Vec3(-0.4, 0, 0)}};
  BlochSolution s = solve_polarizations(pts);
  CHECK(s.pruned == std::vector<int>{1});
  CHECK(s.mu[1] == 0.0);

  std::vector<BlochPoint> all_dom = {{0.8, Vec3(0.1, 0, 0)}, {0.5, Vec3(0.1, 0, 0)}};
  CHECK_THROWS_AS(solve_polarizations(all_dom), AllDominated);
}

TEST_CASE("pair_closed_form: pinned values and Helstrom equivalence") {
  BlochPoint a{0.5, Vec3(0, 0, 0.5)}, b{0.5, Vec3(0, 0, -0.5)};
  CHECK(pair_closed_form(a, b) == doctest::Approx(1.0));
  BlochPoint c{0.5, Vec3(0.2, 0.3, 0)}, d{0.5, Vec3(-0.1, 0.05, 0.1)};
  CHECK(pair_closed_form(c, d) ==
        doctest::Approx(0.5 + 0.5 * (c.r - d.r).norm()).epsilon(1e-14));
  CHECK_THROWS_AS(pair_closed_form(a, BlochPoint{0.4, Vec3(0, 0, 0.5)}), Dominated);

  // Helstrom equivalence on 100 seeded pairs:
  // kappa = Tr R_q + optimal_detect(R_p - R_q).kappa
  oracle::SeededRng rng(321);
  int done = 0;
  while (done < 100) {
    BlochPoint p = random_point(rng), q = random_point(rng);
    if ((p.r - q.r).norm() <= std::abs(p.nu - q.nu) + 1e-6) continue;
    ++done;
    double closed = pair_closed_form(p, q);
    Matrix rp = operator_from_bloch(p), rq = operator_from_bloch(q);
    double helstrom = rq.trace().real() + detect::optimal_detect((rp - rq).eval()).kappa;
    CHECK(closed == doctest::Approx(helstrom).epsilon(1e-9));
    // and the geometric solver agrees
    BlochSolution s = solve_polarizations({p, q});
    CHECK(s.kappa == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("special_case_solvers: equal-intensity sphere") {
  // trine: rho = nu0, kappa = 2 nu0
  BlochSolution s = special_case_solvers(trine_points(), SpecialMode::EqualIntensitySphere);
  CHECK(s.kappa == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  // tetrahedral pure points nu = 1/4: kappa = 1/2, l = 0
  std::vector<BlochPoint> tetra;
  double s3 = 1.0 / std::sqrt(3.0);
  for (Vec3 v : {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)})
    tetra.push_back({0.25, 0.25 * s3 * v});
  BlochSolution st = special_case_solvers(tetra, SpecialMode::EqualIntensitySphere);
  CHECK(st.kappa == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(st.l.norm() < 1e-8);

  CHECK_THROWS_AS(special_case_solvers({{0.5, Vec3(0.1, 0, 0)}, {0.7, Vec3(-0.3, 0, 0)}},
                                       SpecialMode::EqualIntensitySphere),
                  ModeMismatch);
}

TEST_CASE("special_case_solvers: pure ellipsoid") {
  // two pure points reduce to the pair closed form
  oracle::SeededRng rng(77);
  BlochPoint p = random_point(rng, true), q = random_point(rng, true);
  BlochSolution s = special_case_solvers({p, q}, SpecialMode::PureEllipsoid);
  CHECK(s.kappa == doctest::Approx(pair_closed_form(p, q)).epsilon(1e-9));

  // tetrahedral pure set through the ellipsoid mode agrees with the sphere mode
  std::vector<BlochPoint> tetra;
  double s3 = 1.0 / std::sqrt(3.0);
  for (Vec3 v : {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)})
    tetra.push_back({0.25, 0.25 * s3 * v});
  BlochSolution se = special_case_solvers(tetra, SpecialMode::PureEllipsoid);
  CHECK(se.kappa == doctest::Approx(0.5).epsilon(1e-8));

  CHECK_THROWS_AS(special_case_solvers({{0.5, Vec3(0.1, 0, 0)}, {0.7, Vec3(-0.3, 0, 0)}},
                                       SpecialMode::PureEllipsoid),
                  ModeMismatch);
}

TEST_CASE("solve_polarizations: barycentric feasibility of the apex") {
  oracle::SeededRng rng(888);
  for (int t = 0; t < 20; ++t) {
    std::vector<BlochPoint> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(random_point(rng));
    BlochSolution s;
    try {
      s = solve_polarizations(pts);
    } catch (const AllDominated&) {
      continue;
    }
    // l is a nonnegative combination of active r's summing to one
    double musum = 0.0;
    Vec3 recon = Vec3::Zero();
    for (int i : s.active_set) {
      CHECK(s.mu[i] >= -1e-10);
      musum += s.mu[i];
      recon += s.mu[i] * pts[i].r;
    }
    CHECK((recon / musum - s.l).norm() < 1e-7);
  }
}
