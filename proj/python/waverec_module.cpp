#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "waverec/bloch.hpp"
#include "waverec/detect.hpp"
#include "waverec/estimate.hpp"
#include "waverec/identify.hpp"
#include "waverec/linop.hpp"
#include "waverec/measure.hpp"
#include "waverec/oracle.hpp"
#include "waverec/states.hpp"
#include "waverec/version.hpp"

namespace py = pybind11;
using namespace waverec;

namespace {

py::dict certificate_dict(const Certificate& c) {
  py::dict d;
  py::dict res;
  for (const auto& [name, v] : c.residuals) res[py::str(name)] = v;
  d["residuals"] = res;
  d["gap"] = c.gap;
  d["max_residual"] = c.max_residual();
  return d;
}

}  // namespace

PYBIND11_MODULE(_waverec, m) {
  m.doc() = "optimal detection, identification and estimation of wave patterns";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "WaverecError");

  // linop
  m.def("eig_hermitian", [](const Matrix& h) {
    auto es = linop::eig_hermitian(h);
    return py::make_tuple(es.values, es.vectors);
  });
  m.def("positive_part", [](const Matrix& h) { return linop::positive_part(h); });
  m.def("sqrt_psd", [](const Matrix& p) { return linop::sqrt_psd(p); });
  m.def("pinv_on_support", [](const Matrix& p) { return linop::pinv_on_support(p); });
  m.def("solve_anticommutator", [](const Matrix& s, const Matrix& b) {
    return linop::solve_anticommutator(s, b);
  });

  // states
  m.def("coherent_vector", [](Cplx alpha, int dim) {
    return states::coherent_vector(alpha, dim).coeffs;
  });
  m.def("coherent_overlap",
        [](Cplx a, Cplx b) { return states::coherent_overlap(a, b); });
  m.def("thermal_coherent_density", [](Cplx theta, double nbar, int dim) {
    return states::thermal_coherent_density(theta, nbar, dim).op;
  });
  m.def("gram_matrix", [](const std::vector<Vector>& vecs) {
    std::vector<states::Amplitude> amps;
    for (const auto& v : vecs)
      amps.push_back(states::Amplitude{states::FockBasis{int(v.size())}, v});
    return states::gram_matrix(amps);
  });

  // detect
  m.def("optimal_detect", [](const Matrix& c) {
    detect::DetectionResult r = detect::optimal_detect(c);
    py::dict d;
    d["kappa"] = r.kappa;
    d["d_opt"] = r.d_opt;
    d["b_opt"] = r.b_opt;
    d["certificate"] = certificate_dict(r.certificate);
    return d;
  });

  // identify
  m.def(
      "solve_identification",
      [](const Matrix& sigma, int max_iters, double tol) {
        identify::Options o;
        o.max_iters = max_iters;
        o.tol = tol;
        identify::IdentifyResult r = identify::solve_identification(sigma, o);
        py::dict d;
        d["kappa"] = r.kappa;
        d["mu"] = r.mu;
        d["converged"] = r.converged;
        d["elements"] = r.povm.elements;
        d["certificate"] = certificate_dict(r.certificate);
        return d;
      },
      py::arg("sigma"), py::arg("max_iters") = 500, py::arg("tol") = 1e-9);
  m.def("equiangular_closed_form", &identify::equiangular_closed_form);
  m.def("srm_equidiagonal", [](const Matrix& sigma) {
    identify::IdentifyResult r = identify::srm_equidiagonal(sigma);
    py::dict d;
    d["kappa"] = r.kappa;
    d["mu"] = r.mu;
    d["elements"] = r.povm.elements;
    return d;
  });
  m.def("cyclic_solve", [](const Vector& row) {
    identify::IdentifyResult r = identify::cyclic_solve(row);
    py::dict d;
    d["kappa"] = r.kappa;
    d["sigma_eigenvalues"] = r.sigma_eigenvalues;
    return d;
  });
  m.def("phase_povm_completeness", [](int dim, int n_points) {
    return measure::validate_povm(identify::phase_povm(dim, n_points))
        .completeness_residual;
  });

  // bloch
  m.def("solve_polarizations", [](const std::vector<std::pair<double, Vec3>>& pts) {
    std::vector<bloch::BlochPoint> points;
    for (const auto& [nu, r] : pts) points.push_back({nu, r});
    bloch::BlochSolution s = bloch::solve_polarizations(points);
    py::dict d;
    d["kappa"] = s.kappa;
    d["l"] = s.l;
    d["mu"] = s.mu;
    d["delta"] = s.delta;
    d["active_set"] = s.active_set;
    d["elements"] = s.povm.elements;
    d["certificate"] = certificate_dict(s.certificate);
    return d;
  });
  m.def("pair_closed_form", [](double nu_p, const Vec3& rp, double nu_q, const Vec3& rq) {
    return bloch::pair_closed_form({nu_p, rp}, {nu_q, rq});
  });

  // estimate
  m.def("sld_bound_rotation_qubit", [](double radius, double at) {
    estimate::BoundReport r = estimate::sld_bound(estimate::rotation_qubit_family(radius),
                                                  RealVector::Constant(1, at));
    return py::make_tuple(r.information(0, 0), r.bound(0, 0));
  });
  m.def("rld_bound_coherent", [](Cplx at, int dim) {
    estimate::BoundReport r = estimate::rld_bound(estimate::coherent_complex_family(dim),
                                                  Vector::Constant(1, at));
    return py::make_tuple(r.information(0, 0), r.bound(0, 0));
  });
  m.def("heterodyne_closed_form", [](double nbar, double sbar) {
    auto h = estimate::heterodyne_closed_form(nbar, sbar);
    return py::make_tuple(h.x_scale, h.sigma2);
  });
  m.def(
      "bayes_quadratic_thermal",
      [](double nbar, int dim, double variance, int points, double span) {
        estimate::ParamFamily fam = estimate::thermal_coherent_family(nbar, dim);
        estimate::ParamFamily real_fam;
        real_fam.kind = estimate::ParamKind::Real;
        real_fam.dim_params = 1;
        real_fam.eval_real = [fam](const RealVector& th) {
          return fam.at_complex(Vector::Constant(1, Cplx(th(0), 0.0)));
        };
        double sd = std::sqrt(variance);
        RealVector thetas(points), weights(points);
        for (int i = 0; i < points; ++i) {
          thetas(i) = -span * sd + 2.0 * span * sd * i / (points - 1);
          weights(i) = std::exp(-thetas(i) * thetas(i) / (2.0 * variance));
        }
        estimate::BayesResult r = estimate::bayes_quadratic(real_fam, thetas, weights);
        py::dict d;
        d["sigma2"] = r.sigma2;
        d["certificate"] = certificate_dict(r.certificate);
        return d;
      },
      py::arg("nbar"), py::arg("dim") = 64, py::arg("variance") = 1.0,
      py::arg("points") = 201, py::arg("span") = 6.0);

  // measure + oracle
  m.def("validate_povm", [](const std::vector<Matrix>& elements) {
    measure::PovmReport r = measure::validate_povm(measure::make_complete_povm(
        std::vector<Matrix>(elements.begin(), elements.end())));
    py::dict d;
    d["min_eig"] = r.min_eig;
    d["completeness_residual"] = r.completeness_residual;
    d["disjoint"] = r.disjoint;
    return d;
  });
  m.def("halmos_neumark_roundtrip", [](const Matrix& contraction) {
    measure::Dilation dil = measure::halmos_dilate(contraction);
    measure::Povm back = measure::neumark_reduce(dil);
    return back.elements;
  });
  m.def(
      "random_povm",
      [](int dim, int n, std::uint64_t seed) {
        oracle::SeededRng rng(seed);
        return oracle::random_povm(dim, n, rng).elements;
      },
      py::arg("dim"), py::arg("n"), py::arg("seed") = 1);
}
