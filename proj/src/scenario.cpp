#include "waverec/scenario.hpp"

#include <filesystem>
#include <fstream>

#include "waverec/bloch.hpp"
#include "waverec/detect.hpp"
#include "waverec/estimate.hpp"
#include "waverec/identify.hpp"
#include "waverec/linop.hpp"
#include "waverec/measure.hpp"
#include "waverec/oracle.hpp"
#include "waverec/states.hpp"
#include "waverec/version.hpp"

namespace waverec::scenario {

namespace {

constexpr double kPi = 3.14159265358979323846;

Cplx cplx_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return Cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Cplx(j[0].get<double>(), j[1].get<double>());
  throw SchemaError(where + ": expected number or [re, im]");
}

Json cplx_to_json(Cplx c) { return Json::array({c.real(), c.imag()}); }

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(i) = cplx_from_json(j[i], where + "/" + std::to_string(i));
  return v;
}

states::Amplitude amplitude_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("basis") || !j.contains("coeffs"))
    throw SchemaError(where + ": amplitude needs basis and coeffs");
  const Json& b = j["basis"];
  states::Basis basis;
  std::string type = b.value("type", "");
  if (type == "fock") {
    basis = states::FockBasis{b.value("dim", 0)};
  } else if (type == "grid") {
    basis = states::GridBasis{b.value("origin", 0.0), b.value("step", 1.0),
                              b.value("points", 0)};
  } else {
    throw SchemaError(where + "/basis/type: expected 'fock' or 'grid'");
  }
  Vector coeffs = vector_from_json(j["coeffs"], where + "/coeffs");
  if (static_cast<int>(coeffs.size()) != states::basis_size(basis))
    throw SchemaError(where + ": coeffs length does not match basis size");
  return states::Amplitude{basis, coeffs};
}

Json certificate_to_json(const Certificate& c) {
  Json res = Json::object();
  for (const auto& [name, v] : c.residuals) res[name] = v;
  Json out = Json::object();
  out["residuals"] = res;
  out["gap"] = c.gap;
  out["max_residual"] = c.max_residual();
  return out;
}

Json povm_to_json(const measure::Povm& m) {
  Json out = Json::object();
  Json elems = Json::array();
  for (const auto& e : m.elements) elems.push_back(matrix_to_json(e));
  out["elements"] = elems;
  if (m.support.size()) out["support"] = matrix_to_json(m.support);
  return out;
}

measure::Povm povm_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("elements"))
    throw SchemaError(where + ": povm needs elements");
  measure::Povm m;
  for (size_t i = 0; i < j["elements"].size(); ++i)
    m.elements.push_back(
        matrix_from_json(j["elements"][i], where + "/elements/" + std::to_string(i)));
  if (m.elements.empty()) throw SchemaError(where + ": empty POVM");
  if (j.contains("support"))
    m.support = matrix_from_json(j["support"], where + "/support");
  else
    m.support = Matrix::Identity(m.elements[0].rows(), m.elements[0].cols());
  for (size_t i = 0; i < m.elements.size(); ++i) m.labels.push_back(std::to_string(i));
  return m;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(cplx_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected matrix rows");
  const size_t cols = j[0].size();
  Matrix m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw SchemaError(where + "/" + std::to_string(i) + ": ragged matrix");
    for (size_t k = 0; k < cols; ++k)
      m(i, k) =
          cplx_from_json(j[i][k], where + "/" + std::to_string(i) + "/" + std::to_string(k));
  }
  return m;
}

std::uint64_t digest(const std::string& s) {  // FNV-1a
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RunOptions merge_options(const Json& scenario, RunOptions base) {
  if (scenario.contains("options")) {
    const Json& o = scenario["options"];
    base.tol = o.value("tol", base.tol);
    base.fock_dim = o.value("fock_dim", base.fock_dim);
    base.seed = o.value("seed", base.seed);
    base.max_iters = o.value("max_iters", base.max_iters);
  }
  return base;
}

namespace {

Json run_detect(const Json& inputs, const RunOptions& opts, int& exit_code,
                std::string& summary) {
  Matrix c;
  Json extra = Json::object();
  if (inputs.contains("contrast")) {
    c = matrix_from_json(inputs["contrast"], "/inputs/contrast");
  } else if (inputs.contains("pair")) {
    states::Amplitude phi = amplitude_from_json(inputs["pair"].at("phi"), "/inputs/pair/phi");
    states::Amplitude phi0 =
        amplitude_from_json(inputs["pair"].at("phi0"), "/inputs/pair/phi0");
    detect::CoherentPairResult pr = detect::coherent_pair_detect(phi, phi0);
    extra["kappa_plus"] = pr.kappa_plus;
    extra["kappa_matched"] = pr.kappa_matched;
    extra["kappa_resulting"] = pr.kappa_resulting;
    extra["ratio"] = pr.ratio;
    Vector psi1 = phi0.coeffs + phi.coeffs;
    c = psi1 * psi1.adjoint() - phi0.coeffs * phi0.coeffs.adjoint();
    if (const auto* g = std::get_if<states::GridBasis>(&phi.basis)) c *= g->step;
  } else {
    throw SchemaError("/inputs: detect needs 'contrast' or 'pair'");
  }
  Matrix e;
  if (inputs.contains("support")) e = matrix_from_json(inputs["support"], "/inputs/support");
  detect::DetectionResult res = detect::optimal_detect(c, e);
  Json out = Json::object();
  out["kappa"] = res.kappa;
  for (auto& [k, v] : extra.items()) out[k] = v;
  out["d_opt"] = matrix_to_json(res.d_opt);
  out["b_opt"] = matrix_to_json(res.b_opt);
  out["certificate"] = certificate_to_json(res.certificate);
  if (!res.certificate.pass(std::max(opts.tol, 1e-9))) exit_code = 2;
  summary = "detect: kappa = " + std::to_string(res.kappa);
  return out;
}

Json run_identify(const Json& inputs, const RunOptions& opts, int& exit_code,
                  std::string& summary) {
  identify::Options io;
  io.max_iters = opts.max_iters;
  io.tol = opts.tol;
  Json out = Json::object();
  if (inputs.contains("phase")) {
    const Json& p = inputs["phase"];
    int dim = p.value("fock_dim", opts.fock_dim);
    int n = p.value("n_points", 4 * dim);
    measure::Povm povm = identify::phase_povm(dim, n);
    measure::PovmReport rep = measure::validate_povm(povm);
    out["completeness_residual"] = rep.completeness_residual;
    out["n_points"] = n;
    out["fock_dim"] = dim;
    if (p.contains("coherent_lambda")) {
      double lam = p["coherent_lambda"].get<double>();
      states::Amplitude a = states::coherent_vector(std::sqrt(lam), dim);
      RealVector dist = identify::phase_distribution(povm, a.coeffs * a.coeffs.adjoint());
      out["distribution_sum"] = dist.sum();
      if (!opts.csv_dir.empty()) {
        std::filesystem::create_directories(opts.csv_dir);
        std::ofstream csv(opts.csv_dir + "/phase_distribution.csv");
        csv << "x,probability\n";
        for (int k = 0; k < dist.size(); ++k)
          csv << double(k) / n << "," << dist(k) << "\n";
        out["csv"] = "phase_distribution.csv";
      }
    }
    summary = "identify/phase: completeness residual = " +
              std::to_string(rep.completeness_residual);
    return out;
  }
  identify::IdentifyResult res;
  if (inputs.contains("amplitudes")) {
    std::vector<states::Amplitude> amps;
    for (size_t i = 0; i < inputs["amplitudes"].size(); ++i)
      amps.push_back(amplitude_from_json(inputs["amplitudes"][i],
                                         "/inputs/amplitudes/" + std::to_string(i)));
    res = identify::solve_identification(amps, io);
  } else if (inputs.contains("gram")) {
    res = identify::solve_identification(matrix_from_json(inputs["gram"], "/inputs/gram"), io);
  } else if (inputs.contains("sigma_row")) {
    res = identify::cyclic_solve(vector_from_json(inputs["sigma_row"], "/inputs/sigma_row"),
                                 opts.tol);
  } else if (inputs.contains("equiangular")) {
    const Json& e = inputs["equiangular"];
    int m = e.value("m", 0);
    double nu = e.value("nu", 1.0);
    double gamma = e.value("gamma", 0.0);
    out["kappa_closed_form"] = identify::equiangular_closed_form(m, nu, gamma);
    res = identify::srm_equidiagonal(identify::equiangular_gram(m, nu, gamma));
  } else {
    throw SchemaError("/inputs: identify needs amplitudes, gram, sigma_row, equiangular or phase");
  }
  out["kappa"] = res.kappa;
  out["mu"] = res.mu;
  out["lost_intensity"] = res.lost_intensity;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  if (res.sigma_eigenvalues.size()) {
    Json eigs = Json::array();
    for (int i = 0; i < res.sigma_eigenvalues.size(); ++i)
      eigs.push_back(res.sigma_eigenvalues(i));
    out["sigma_eigenvalues"] = eigs;
  }
  out["measurement"] = povm_to_json(res.povm);
  out["certificate"] = certificate_to_json(res.certificate);
  if (!res.converged) {
    exit_code = 2;
    summary = "identify: NoConvergence, best kappa = " + std::to_string(res.kappa);
  } else {
    summary = "identify: kappa = " + std::to_string(res.kappa);
  }
  return out;
}

Json run_bloch(const Json& inputs, const RunOptions& opts, int& exit_code,
               std::string& summary) {
  if (!inputs.contains("points")) throw SchemaError("/inputs: bloch needs points");
  std::vector<bloch::BlochPoint> pts;
  for (size_t i = 0; i < inputs["points"].size(); ++i) {
    const Json& p = inputs["points"][i];
    if (!p.contains("nu") || !p.contains("r") || p["r"].size() != 3)
      throw SchemaError("/inputs/points/" + std::to_string(i) + ": need nu and r[3]");
    bloch::BlochPoint bp;
    bp.nu = p["nu"].get<double>();
    for (int k = 0; k < 3; ++k) bp.r(k) = p["r"][k].get<double>();
    pts.push_back(bp);
  }
  std::string mode = inputs.value("mode", "generic");
  bloch::BlochSolution sol;
  if (mode == "generic") {
    sol = bloch::solve_polarizations(pts, opts.tol);
  } else if (mode == "pure_ellipsoid") {
    sol = bloch::special_case_solvers(pts, bloch::SpecialMode::PureEllipsoid, opts.tol);
  } else if (mode == "equal_intensity_sphere") {
    sol = bloch::special_case_solvers(pts, bloch::SpecialMode::EqualIntensitySphere, opts.tol);
  } else {
    throw SchemaError("/inputs/mode: unknown mode '" + mode + "'");
  }
  Json out = Json::object();
  out["kappa"] = sol.kappa;
  out["lambda"] = sol.lambda;
  out["l"] = Json::array({sol.l(0), sol.l(1), sol.l(2)});
  out["active_set"] = sol.active_set;
  out["pruned"] = sol.pruned;
  out["mu"] = sol.mu;
  out["delta"] = sol.delta;
  out["measurement"] = povm_to_json(sol.povm);
  out["certificate"] = certificate_to_json(sol.certificate);
  if (!sol.certificate.pass(std::max(opts.tol, 1e-8))) exit_code = 2;
  summary = "bloch: kappa = " + std::to_string(sol.kappa);
  return out;
}

estimate::ParamFamily family_from_json(const Json& f, int fock_dim) {
  std::string name = f.value("name", "");
  if (name == "rotation-qubit")
    return estimate::rotation_qubit_family(f.value("bloch_radius", 0.8));
  if (name == "coherent-displacement")
    return estimate::coherent_displacement_family(f.value("fock_dim", fock_dim));
  if (name == "coherent-complex")
    return estimate::coherent_complex_family(f.value("fock_dim", fock_dim));
  if (name == "thermal-coherent")
    return estimate::thermal_coherent_family(f.value("nbar", 1.0),
                                             f.value("fock_dim", fock_dim));
  if (name == "classical-binary") return estimate::classical_binary_family();
  if (name == "custom-matrix-list") {
    // density operators sampled on a uniform real theta grid, evaluated by
    // linear interpolation between neighbors
    if (!f.contains("thetas") || !f.contains("matrices"))
      throw SchemaError("/inputs/family: custom-matrix-list needs thetas and matrices");
    std::vector<double> thetas = f["thetas"].get<std::vector<double>>();
    std::vector<Matrix> mats;
    for (size_t i = 0; i < f["matrices"].size(); ++i)
      mats.push_back(matrix_from_json(f["matrices"][i],
                                      "/inputs/family/matrices/" + std::to_string(i)));
    if (thetas.size() != mats.size() || thetas.size() < 2)
      throw SchemaError("/inputs/family: need matching thetas/matrices, at least 2");
    estimate::ParamFamily fam;
    fam.kind = estimate::ParamKind::Real;
    fam.dim_params = 1;
    fam.eval_real = [thetas, mats](const RealVector& th) {
      double t = th(0);
      size_t hi = 1;
      while (hi + 1 < thetas.size() && thetas[hi] < t) ++hi;
      size_t lo = hi - 1;
      double span = thetas[hi] - thetas[lo];
      double w = span > 0 ? std::clamp((t - thetas[lo]) / span, 0.0, 1.0) : 0.0;
      return ((1.0 - w) * mats[lo] + w * mats[hi]).eval();
    };
    return fam;
  }
  throw SchemaError("/inputs/family/name: unknown family '" + name + "'");
}

Json run_estimate(const Json& inputs, const RunOptions& opts, int& exit_code,
                  std::string& summary) {
  std::string task = inputs.value("task", "");
  Json out = Json::object();
  if (task == "heterodyne") {
    double nbar = inputs.value("nbar", 1.0);
    double sbar = inputs.value("sbar", 1.0);
    estimate::HeterodyneClosedForm hc = estimate::heterodyne_closed_form(nbar, sbar);
    out["x_scale"] = hc.x_scale;
    out["sigma2"] = hc.sigma2;
    summary = "estimate/heterodyne: sigma2 = " + std::to_string(hc.sigma2);
    return out;
  }
  if (!inputs.contains("family")) throw SchemaError("/inputs: estimate needs a family");
  estimate::ParamFamily fam = family_from_json(inputs["family"], opts.fock_dim);
  if (task == "husimi") {
    Cplx at = inputs.contains("at") ? cplx_from_json(inputs["at"], "/inputs/at") : Cplx(0, 0);
    Matrix s = fam.kind == estimate::ParamKind::Complex
                   ? fam.at_complex(Vector::Constant(1, at))
                   : fam.at_real(RealVector::Constant(1, at.real()));
    states::AlphaGrid grid{inputs.value("alpha_max", 5.0), inputs.value("points", 61)};
    states::HusimiField field = states::husimi_density(
        states::DensityOperator{states::FockBasis{int(s.rows())}, s}, grid);
    out["integral"] = field.integral;
    if (!opts.csv_dir.empty()) {
      std::filesystem::create_directories(opts.csv_dir);
      std::ofstream csv(opts.csv_dir + "/husimi.csv");
      csv << "re,im,k\n";
      double lo = -grid.alpha_max, d = 2.0 * grid.alpha_max / (grid.points_per_axis - 1);
      for (int ix = 0; ix < grid.points_per_axis; ++ix)
        for (int iy = 0; iy < grid.points_per_axis; ++iy)
          csv << lo + ix * d << "," << lo + iy * d << "," << field.values(ix, iy) << "\n";
      out["csv"] = "husimi.csv";
    }
    summary = "estimate/husimi: integral = " + std::to_string(field.integral);
    return out;
  }
  if (task == "sld") {
    RealVector at = RealVector::Constant(1, inputs.value("at", 0.0));
    estimate::BoundReport rep = estimate::sld_bound(fam, at);
    out["information"] = rep.information(0, 0);
    out["bound"] = rep.bound(0, 0);
    summary = "estimate/sld: bound = " + std::to_string(rep.bound(0, 0));
    return out;
  }
  if (task == "rld") {
    Cplx at = inputs.contains("at") ? cplx_from_json(inputs["at"], "/inputs/at") : Cplx(0.3, 0.1);
    estimate::BoundReport rep = estimate::rld_bound(fam, Vector::Constant(1, at));
    out["information"] = rep.information(0, 0);
    out["bound"] = rep.bound(0, 0);
    summary = "estimate/rld: bound = " + std::to_string(rep.bound(0, 0));
    return out;
  }
  if (task == "classical") {
    RealVector at = RealVector::Constant(1, inputs.value("at", 0.0));
    // default measurement: sigma_z projectors for qubits, phase POVM otherwise
    measure::Povm m;
    if (inputs.contains("povm")) {
      m = povm_from_json(inputs["povm"], "/inputs/povm");
    } else {
      Matrix up = Matrix::Zero(2, 2), dn = Matrix::Zero(2, 2);
      up(0, 0) = 1;
      dn(1, 1) = 1;
      m = measure::make_complete_povm({up, dn});
    }
    estimate::BoundReport rep = estimate::classical_bound(m, fam, at);
    out["fisher"] = rep.information(0, 0);
    out["bound"] = rep.bound(0, 0);
    summary = "estimate/classical: fisher = " + std::to_string(rep.information(0, 0));
    return out;
  }
  if (task == "bayes") {
    const Json& prior = inputs.at("prior");
    double var = prior.value("variance", 1.0);
    int points = prior.value("points", 201);
    double span = prior.value("span_sigmas", 6.0);
    RealVector thetas(points), weights(points);
    double sd = std::sqrt(var);
    for (int i = 0; i < points; ++i) {
      double th = -span * sd + 2.0 * span * sd * i / (points - 1);
      thetas(i) = th;
      weights(i) = std::exp(-th * th / (2.0 * var));
    }
    estimate::BayesResult res = estimate::bayes_quadratic(fam, thetas, weights);
    out["sigma2"] = res.sigma2;
    out["certificate"] = certificate_to_json(res.certificate);
    if (res.certificate.max_residual() > 1e-6) exit_code = 2;
    summary = "estimate/bayes: sigma2 = " + std::to_string(res.sigma2);
    return out;
  }
  throw SchemaError("/inputs/task: unknown task '" + task + "'");
}

Json run_validate(const Json& inputs, const RunOptions& opts, int& exit_code,
                  std::string& summary) {
  if (!inputs.contains("povm")) throw SchemaError("/inputs: validate needs a povm");
  measure::Povm m = povm_from_json(inputs["povm"], "/inputs/povm");
  measure::PovmReport rep = measure::validate_povm(m, std::max(opts.tol, 1e-9));
  Json out = Json::object();
  out["min_eig"] = rep.min_eig;
  out["completeness_residual"] = rep.completeness_residual;
  out["disjoint"] = rep.disjoint;
  out["max_cross_norm"] = rep.max_cross_norm;
  if (rep.min_eig < -1e-8 || rep.completeness_residual > 1e-6) exit_code = 2;
  summary = "validate: completeness residual = " + std::to_string(rep.completeness_residual);
  return out;
}

}  // namespace

RunOutcome verify_report(const Json& report, const RunOptions& opts) {
  RunOutcome out;
  if (!report.contains("scenario") || !report.contains("result"))
    throw SchemaError("/: verify needs a report with embedded scenario and result");
  const Json& scen = report["scenario"];
  std::string kind = scen.value("kind", "");
  oracle::SeededRng rng(opts.seed);
  Json ver = Json::object();
  int draws = 2000;
  if (kind == "detect" && report["result"].contains("kappa") &&
      scen["inputs"].contains("contrast")) {
    Matrix c = matrix_from_json(scen["inputs"]["contrast"], "/scenario/inputs/contrast");
    double kappa = report["result"]["kappa"].get<double>();
    auto objective = [&](const measure::Povm& m) {
      return oracle::povm_objective_trace({c}, m);
    };
    oracle::SampledMax sm = oracle::sampled_max_objective(
        objective, static_cast<int>(c.rows()), 2, draws, rng);
    ver["draws"] = draws;
    ver["best_sampled"] = sm.best_value;
    ver["certified"] = kappa;
    ver["sound"] = sm.best_value <= kappa + 1e-8;
    if (!(sm.best_value <= kappa + 1e-8)) out.exit_code = 2;
  } else if (kind == "bloch" && report["result"].contains("kappa")) {
    std::vector<Matrix> rs;
    for (const auto& p : scen["inputs"]["points"]) {
      bloch::BlochPoint bp;
      bp.nu = p["nu"].get<double>();
      for (int k = 0; k < 3; ++k) bp.r(k) = p["r"][k].get<double>();
      rs.push_back(bloch::operator_from_bloch(bp));
    }
    double kappa = report["result"]["kappa"].get<double>();
    auto objective = [&](const measure::Povm& m) {
      return oracle::povm_objective_trace(rs, m);
    };
    oracle::SampledMax sm = oracle::sampled_max_objective(
        objective, 2, static_cast<int>(rs.size()), draws, rng);
    ver["draws"] = draws;
    ver["best_sampled"] = sm.best_value;
    ver["certified"] = kappa;
    ver["sound"] = sm.best_value <= kappa + 1e-8;
    if (!(sm.best_value <= kappa + 1e-8)) out.exit_code = 2;
  } else if (kind == "identify" && report["result"].contains("kappa") &&
             (scen["inputs"].contains("gram") || scen["inputs"].contains("amplitudes"))) {
    Matrix sigma;
    if (scen["inputs"].contains("gram")) {
      sigma = matrix_from_json(scen["inputs"]["gram"], "/scenario/inputs/gram");
    } else {
      std::vector<states::Amplitude> amps;
      for (size_t i = 0; i < scen["inputs"]["amplitudes"].size(); ++i)
        amps.push_back(amplitude_from_json(scen["inputs"]["amplitudes"][i], "amp"));
      sigma = states::gram_matrix(amps);
    }
    const int m = static_cast<int>(sigma.rows());
    Matrix h = linop::sqrt_psd(sigma, 1e-8);
    std::vector<Matrix> weights;
    for (int i = 0; i < m; ++i)
      weights.push_back(h.col(i) * h.col(i).adjoint());  // |psi_i)(psi_i| in signal space
    double kappa = report["result"]["kappa"].get<double>();
    auto objective = [&](const measure::Povm& mm) {
      return oracle::povm_objective_trace(weights, mm);
    };
    oracle::SampledMax sm = oracle::sampled_max_objective(objective, m, m, draws, rng);
    ver["draws"] = draws;
    ver["best_sampled"] = sm.best_value;
    ver["certified"] = kappa;
    ver["sound"] = sm.best_value <= kappa + 1e-8;
    if (!(sm.best_value <= kappa + 1e-8)) out.exit_code = 2;
  } else {
    ver["skipped"] = true;
    ver["reason"] = "no oracle cross-check for this kind/input combination";
  }
  out.report = ver;
  out.summary = out.exit_code == 0 ? "verify: sound" : "verify: OPTIMUM EXCEEDED";
  return out;
}

RunOutcome run_scenario(const Json& scenario, const RunOptions& base_opts) {
  RunOutcome out;
  if (!scenario.is_object()) throw SchemaError("/: scenario must be an object");
  if (scenario.value("schema_version", 0) != 1)
    throw SchemaError("/schema_version: expected 1");
  std::string kind = scenario.value("kind", "");
  RunOptions opts = merge_options(scenario, base_opts);
  const Json inputs = scenario.value("inputs", Json::object());

  Json result;
  if (kind == "detect") result = run_detect(inputs, opts, out.exit_code, out.summary);
  else if (kind == "identify") result = run_identify(inputs, opts, out.exit_code, out.summary);
  else if (kind == "bloch") result = run_bloch(inputs, opts, out.exit_code, out.summary);
  else if (kind == "estimate") result = run_estimate(inputs, opts, out.exit_code, out.summary);
  else if (kind == "validate") result = run_validate(inputs, opts, out.exit_code, out.summary);
  else if (kind == "verify") return verify_report(inputs, opts);
  else throw SchemaError("/kind: unknown kind '" + kind + "'");

  Json report = Json::object();
  report["schema_version"] = 1;
  report["kind"] = kind;
  report["tool_version"] = kVersion;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest(scenario.dump())));
  report["input_digest"] = std::string(buf);
  report["seed"] = opts.seed;
  report["scenario"] = scenario;
  report["result"] = result;
  if (opts.verify) {
    RunOutcome ver = verify_report(report, opts);
    report["oracle"] = ver.report;
    if (ver.exit_code != 0) out.exit_code = std::max(out.exit_code, ver.exit_code);
  }
  out.report = report;
  return out;
}

RunOutcome verify_report_file(const std::string& path, RunOptions opts) {
  RunOutcome out;
  try {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    Json doc = Json::parse(in);
    if (doc.value("kind", "") == "verify") doc = doc.value("inputs", Json::object());
    return verify_report(doc, opts);
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = 1;
    out.summary = std::string("SchemaError: ") + e.what();
  } catch (const Error& e) {
    out.exit_code = 1;
    out.summary = e.what();
  }
  return out;
}

RunOutcome run_scenario_file(const std::string& path, RunOptions opts) {
  RunOutcome out;
  Json scenario;
  try {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    scenario = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = 1;
    out.summary = std::string("SchemaError: ") + e.what();
    return out;
  } catch (const SchemaError& e) {
    out.exit_code = 1;
    out.summary = e.what();
    return out;
  }
  try {
    return run_scenario(scenario, opts);
  } catch (const SchemaError& e) {
    out.exit_code = 1;
    out.summary = e.what();
  } catch (const Error& e) {
    out.exit_code = 1;
    out.summary = e.what();
  }
  return out;
}

std::string schema_text() {
  static const char* text = R"JSON({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "waverec scenario",
  "type": "object",
  "required": ["schema_version", "kind", "inputs"],
  "properties": {
    "schema_version": {"const": 1},
    "kind": {"enum": ["detect", "identify", "bloch", "estimate", "validate", "verify"]},
    "inputs": {"type": "object"},
    "options": {
      "type": "object",
      "properties": {
        "tol": {"type": "number"},
        "fock_dim": {"type": "integer"},
        "seed": {"type": "integer"},
        "max_iters": {"type": "integer"}
      }
    }
  },
  "$defs": {
    "complex": {"oneOf": [{"type": "number"},
                           {"type": "array", "items": {"type": "number"},
                            "minItems": 2, "maxItems": 2}]},
    "matrix": {"type": "array", "items": {"type": "array",
               "items": {"$ref": "#/$defs/complex"}}},
    "amplitude": {
      "type": "object", "required": ["basis", "coeffs"],
      "properties": {
        "basis": {"oneOf": [
          {"type": "object", "properties": {"type": {"const": "fock"},
           "dim": {"type": "integer"}}, "required": ["type", "dim"]},
          {"type": "object", "properties": {"type": {"const": "grid"},
           "origin": {"type": "number"}, "step": {"type": "number"},
           "points": {"type": "integer"}}, "required": ["type", "points"]}]},
        "coeffs": {"type": "array", "items": {"$ref": "#/$defs/complex"}}
      }
    }
  }
})JSON";
  return text;
}

}  // namespace waverec::scenario
