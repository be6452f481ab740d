#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optoresponse/errors.hpp"
#include "optoresponse/green.hpp"
#include "optoresponse/model.hpp"
#include "optoresponse/oracle.hpp"
#include "optoresponse/response.hpp"
#include "optoresponse/steady_state.hpp"

namespace py = pybind11;
using namespace optoresponse;

namespace
{

MomentConvention Convention(const std::string &name) { return ParseMomentConvention(name); }

Eigen::MatrixXcd GreenColumns(const GreenTable &t, int j)
{
  const auto &blocks = t.ForSource(j);
  Eigen::MatrixXcd out(blocks.size(), 4);
  for (std::size_t i = 0; i < blocks.size(); i++)
    out.row(i) = blocks[i].g_col.transpose();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Optomechanical linear response with the cubic coupling kept";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", error);
  py::register_exception<Unstable>(m, "Unstable", error);
  py::register_exception<NoStableRoot>(m, "NoStableRoot", error);
  py::register_exception<ImaginaryMode>(m, "ImaginaryMode", error);
  py::register_exception<NoRoot>(m, "NoRoot", error);
  py::register_exception<Singular>(m, "Singular", error);
  py::register_exception<SingularAt>(m, "SingularAt", error);
  py::register_exception<GridTooCoarse>(m, "GridTooCoarse", error);
  py::register_exception<GridTooNarrow>(m, "GridTooNarrow", error);
  py::register_exception<CutoffTooSmall>(m, "CutoffTooSmall", error);
  py::register_exception<NonUniqueSteadyState>(m, "NonUniqueSteadyState", error);
  py::register_exception<WindowBias>(m, "WindowBias", error);

  py::class_<EffectiveParams>(m, "EffectiveParams")
      .def(py::init<>())
      .def(py::init(
               [](double delta, double omega_m, double kappa, double gamma, double g0, double g,
                  double kappa_prime, double n_th, double n_ph)
               {
                 EffectiveParams e{delta, omega_m, kappa, gamma, g0, g, kappa_prime, n_th, n_ph};
                 e.Validate();
                 return e;
               }),
           py::arg("delta"), py::arg("omega_m"), py::arg("kappa") = 1.0,
           py::arg("gamma") = 0.0, py::arg("g0") = 0.0, py::arg("g") = 0.0,
           py::arg("kappa_prime") = 0.0, py::arg("n_th") = 0.0, py::arg("n_ph") = 0.0)
      .def_readwrite("delta", &EffectiveParams::delta)
      .def_readwrite("omega_m", &EffectiveParams::omega_m)
      .def_readwrite("kappa", &EffectiveParams::kappa)
      .def_readwrite("gamma", &EffectiveParams::gamma)
      .def_readwrite("g0", &EffectiveParams::g0)
      .def_readwrite("g", &EffectiveParams::g)
      .def_readwrite("kappa_prime", &EffectiveParams::kappa_prime)
      .def_readwrite("n_th", &EffectiveParams::n_th)
      .def_readwrite("n_ph", &EffectiveParams::n_ph)
      .def("validate", &EffectiveParams::Validate);

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def(py::init(
               [](double delta_c, double eta_mag, double omega_m, double kappa, double gamma,
                  double g0, double kappa_prime, double n_th, double n_ph)
               {
                 PhysicalParams p{delta_c, eta_mag, omega_m, kappa, gamma,
                                  g0,      kappa_prime, n_th, n_ph};
                 p.Validate();
                 return p;
               }),
           py::arg("delta_c"), py::arg("eta_mag"), py::arg("omega_m"),
           py::arg("kappa") = 1.0, py::arg("gamma") = 0.0, py::arg("g0") = 0.0,
           py::arg("kappa_prime") = 0.0, py::arg("n_th") = 0.0, py::arg("n_ph") = 0.0)
      .def_readwrite("delta_c", &PhysicalParams::delta_c)
      .def_readwrite("eta_mag", &PhysicalParams::eta_mag)
      .def_readwrite("omega_m", &PhysicalParams::omega_m)
      .def_readwrite("kappa", &PhysicalParams::kappa)
      .def_readwrite("gamma", &PhysicalParams::gamma)
      .def_readwrite("g0", &PhysicalParams::g0)
      .def_readwrite("kappa_prime", &PhysicalParams::kappa_prime)
      .def_readwrite("n_th", &PhysicalParams::n_th)
      .def_readwrite("n_ph", &PhysicalParams::n_ph);

  m.def(
      "solve_mean_fields",
      [](const PhysicalParams &p)
      {
        const MeanFieldSolution s = SolveMeanFields(p);
        py::dict d;
        d["alpha"] = s.fields.alpha;
        d["beta"] = s.fields.beta;
        d["theta"] = s.fields.theta;
        d["delta_eff"] = s.fields.delta_eff;
        d["effective"] = s.effective;
        d["residuals"] = s.residuals;
        d["ambiguous"] = s.ambiguous;
        d["stable_roots"] = s.stable_roots;
        return d;
      },
      py::arg("params"));

  m.def("drift_matrix", &DriftMatrix, py::arg("params"));
  m.def("diffusion_matrix", &DiffusionMatrix, py::arg("params"));
  m.def("commutator_matrix", &CommutatorMatrix);
  m.def("nonlinear_tensors", &NonlinearTensors, py::arg("g0"));
  m.def(
      "normal_frequencies",
      [](double delta, double omega_m, double g)
      {
        const NormalModes n = NormalFrequencies(delta, omega_m, g);
        return py::make_tuple(n.omega_minus, n.omega_plus);
      },
      py::arg("delta"), py::arg("omega_m"), py::arg("g"));
  m.def("resonance_coupling", &ResonanceCoupling, py::arg("delta"), py::arg("omega_m"));
  m.def(
      "stability_check",
      [](const Mat4 &chi)
      {
        const StabilityReport r = StabilityCheck(chi);
        return py::make_tuple(r.stable, r.eigenvalues);
      },
      py::arg("chi"));

  m.def(
      "solve_lyapunov", [](const Mat4 &chi, const Mat4 &d) { return SolveLyapunov(chi, d).v; },
      py::arg("chi"), py::arg("d"));
  m.def(
      "ordered_moments",
      [](const Mat4 &v, const std::string &convention)
      { return ComputeOrderedMoments({v}, CommutatorMatrix(), Convention(convention)).m; },
      py::arg("v"), py::arg("convention") = "symmetric-plus-half");

  m.def("linear_green", &LinearGreen, py::arg("omega"), py::arg("chi"), py::arg("j_mat"),
        py::arg("j"));
  m.def(
      "solve_block",
      [](double omega, int j, const EffectiveParams &e, bool nonlinear,
         const std::string &convention)
      {
        const GreenBlock b =
            SolveBlock(omega, j, PrepareGreenInputs(e, nonlinear, Convention(convention)));
        return py::make_tuple(b.g_col, b.p_col);
      },
      py::arg("omega"), py::arg("j"), py::arg("params"), py::arg("nonlinear") = true,
      py::arg("convention") = "symmetric-plus-half");
  m.def(
      "green_sweep",
      [](const std::vector<double> &omegas, const std::vector<int> &j_set,
         const EffectiveParams &e, bool nonlinear, const std::string &convention)
      {
        const GreenTable t =
            Sweep(omegas, j_set, PrepareGreenInputs(e, nonlinear, Convention(convention)));
        py::dict d;
        for (int j : j_set)
          d[py::int_(j)] = GreenColumns(t, j);
        return d;
      },
      "G^{mj} on the grid: {j: array (n_omega, 4)}", py::arg("omegas"),
      py::arg("j_set") = std::vector<int>{2}, py::arg("params"), py::arg("nonlinear") = true,
      py::arg("convention") = "symmetric-plus-half");

  m.def(
      "spectrum",
      [](const std::vector<double> &omegas, const EffectiveParams &e, bool nonlinear,
         const std::string &convention)
      {
        const SpectrumResult s = ComputeSpectrum(
            omegas, PrepareGreenInputs(e, nonlinear, Convention(convention)), e.kappa_prime);
        py::dict d;
        d["omega"] = s.omegas;
        d["rho"] = s.rho;
        d["r_exact"] = s.r_exact;
        d["r_approx"] = s.r_approx;
        return d;
      },
      py::arg("omegas"), py::arg("params"), py::arg("nonlinear") = true,
      py::arg("convention") = "symmetric-plus-half");
  m.def(
      "dos_sum_rule",
      [](const std::vector<double> &omegas, const std::vector<double> &rho)
      { return DosSumRule(omegas, rho).total; },
      py::arg("omegas"), py::arg("rho"));
  m.def(
      "causality_check",
      [](const std::vector<double> &omegas, const std::vector<Complex> &g, const Mat4 &chi_ref,
         double t_max, double t_step)
      {
        const CausalityReport r = CausalityCheck(omegas, g, chi_ref, t_max, t_step);
        return py::make_tuple(r.ratio, r.g_zero_plus);
      },
      py::arg("omegas"), py::arg("g_aa_dag"), py::arg("chi_ref"), py::arg("t_max"),
      py::arg("t_step"));

  m.def(
      "oracle_dos",
      [](const EffectiveParams &e, const std::vector<double> &omegas, int n_a, int n_b,
         double tau_max, double dt)
      {
        const FockConfig f{n_a, n_b, tau_max, dt};
        py::gil_scoped_release release;
        const Generator gen = BuildGenerator(e, f);
        const SteadyDensity ss = SolveSteadyDensity(gen);
        return DosFromCorrelation(CommutatorCorrelation(ss, gen, f), omegas).rho;
      },
      "Master-equation density of states by quantum regression", py::arg("params"),
      py::arg("omegas"), py::arg("n_a") = 8, py::arg("n_b") = 8, py::arg("tau_max") = 0.0,
      py::arg("dt") = 0.01);
  m.def(
      "oracle_covariance",
      [](const EffectiveParams &e, int n_a, int n_b)
      {
        const FockConfig f{n_a, n_b, 0.0, 0.01};
        const Generator gen = BuildGenerator(e, f);
        return SteadyCovariance(SolveSteadyDensity(gen), gen);
      },
      py::arg("params"), py::arg("n_a") = 8, py::arg("n_b") = 8);
}
