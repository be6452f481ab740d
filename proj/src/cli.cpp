#include "optoresponse/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <optional>
#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include "optoresponse/errors.hpp"
#include "optoresponse/report.hpp"

namespace optoresponse
{

namespace
{

void WriteFile(const std::string &path, const std::function<void(std::ostream &)> &body)
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
  {
    throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  }
  body(f);
  if (!f)
  {
    throw std::runtime_error(fmt::format("write to '{}' failed", path));
  }
}

bool Contains(const std::vector<int> &js, int j)
{
  return std::find(js.begin(), js.end(), j) != js.end();
}

std::vector<double> GlrtDos(const std::vector<double> &omegas, const EffectiveParams &e,
                            bool nonlinear, MomentConvention conv)
{
  const GreenInputs in = PrepareGreenInputs(e, nonlinear, conv);
  return DensityOfStates(Sweep(omegas, {2}, in).Column(1, 2));
}

// Mean cavity amplitude for the carrier: physical mode from the mean fields,
// effective mode from g = g0 alpha.
void CarrierFields(const RunConfig &config, const EffectiveParams &e, Complex &eta,
                   Complex &alpha)
{
  if (config.mode == InputMode::Physical)
  {
    const MeanFieldSolution mf = SolveMeanFields(config.physical);
    alpha = mf.fields.alpha;
    eta = std::polar(config.physical.eta_mag, mf.fields.theta);
  }
  else
  {
    alpha = e.g0 > 0.0 ? Complex(e.g / e.g0) : Complex(0.0);
    eta = 0.0;
  }
}

}  // namespace

int ExitCodeFor(const std::exception &e)
{
  if (dynamic_cast<const Unstable *>(&e) || dynamic_cast<const ImaginaryMode *>(&e))
    return kExitUnstable;
  if (dynamic_cast<const NoRoot *>(&e))
    return kExitNoRoot;
  if (dynamic_cast<const CutoffTooSmall *>(&e))
    return kExitCutoffTooSmall;
  if (dynamic_cast<const NoStableRoot *>(&e))
    return kExitNoStableRoot;
  if (dynamic_cast<const InvalidParameter *>(&e))
    return kExitUsage;
  if (dynamic_cast<const Error *>(&e))
    return kExitSolverFailure;  // Singular, SingularAt, grid and window failures
  return kExitUsage;
}

SpectrumResult RunSpectrum(const RunConfig &config, const EffectiveParams &e)
{
  const std::vector<double> omegas = SweepGrid(config, e);
  const GreenInputs in = PrepareGreenInputs(e, config.nonlinear, config.convention);
  Complex eta;
  Complex alpha;
  CarrierFields(config, e, eta, alpha);
  return ComputeSpectrum(omegas, in, e.kappa_prime, Contains(config.j_set, 1),
                         ProbeDrive{config.zeta, 0.0}, eta, alpha);
}

double RelativeL2(const std::vector<double> &a, const std::vector<double> &b)
{
  if (a.size() != b.size() || a.empty())
  {
    throw InvalidParameter("relative L2 needs equal nonempty arrays");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); i++)
  {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

CompareResult RunCompare(const RunConfig &config)
{
  if (!config.oracle)
  {
    throw InvalidParameter("compare needs an oracle block (oracle = on)");
  }
  const OracleBlock &ob = *config.oracle;
  const EffectiveParams e = ResolveEffective(config);
  CompareResult r;
  r.omegas = config.grid.Points();

  std::map<std::string, std::vector<double>> glrt;
  for (MomentConvention conv :
       {MomentConvention::SymmetricPlusHalf, MomentConvention::PaperLiteral})
  {
    glrt[std::string(ToString(conv))] = GlrtDos(r.omegas, e, config.nonlinear, conv);
  }
  r.rho_glrt = glrt.at(std::string(ToString(config.convention)));

  r.cutoffs = ob.fock;
  if (!ob.scan.empty())
  {
    r.scan = ConvergenceScan(e, ob.scan, r.omegas, ob.fock, true, ob.window);
    if (!r.scan.converged)
    {
      const ScanEntry &last = r.scan.entries.back();
      throw CutoffTooSmall(fmt::format(
          "convergence scan did not converge up to n_a = {}, n_b = {} (top population {:.3e})",
          last.n_a, last.n_b, last.top_population));
    }
    const ScanEntry &best = r.scan.entries[r.scan.recommended_index];
    r.cutoffs = r.scan.recommended;
    r.rho_oracle = best.rho;
    r.peak_bias = best.peak_bias;
    r.top_population = best.top_population;
    if (r.peak_bias > ob.max_peak_bias)
    {
      throw WindowBias(fmt::format("windowing changes the density peak by {:.3e}", r.peak_bias));
    }
    const StabilityReport stab = StabilityCheck(DriftMatrix(e));
    double slowest = std::numeric_limits<double>::infinity();
    for (const Complex &z : stab.eigenvalues)
    {
      slowest = std::min(slowest, std::abs(z.real()));
    }
    r.tau_max = ob.fock.tau_max > 0.0 ? ob.fock.tau_max : 10.0 / slowest;
  }
  else
  {
    const Generator gen = BuildGenerator(e, ob.fock);
    const SteadyDensity ss = SolveSteadyDensity(gen, true);
    const CorrelationSeries c = CommutatorCorrelation(ss, gen, ob.fock);
    const OracleDos dos = DosFromCorrelation(c, r.omegas, ob.window, ob.max_peak_bias);
    r.rho_oracle = dos.rho;
    r.peak_bias = dos.peak_bias;
    r.top_population = std::max(ss.top_population_a, ss.top_population_b);
    r.tau_max = c.tau_max();
  }

  double best_l2 = std::numeric_limits<double>::infinity();
  for (const auto &[name, rho] : glrt)
  {
    const double d = RelativeL2(rho, r.rho_oracle);
    r.l2_by_convention[name] = d;
    if (d < best_l2)
    {
      best_l2 = d;
      r.best_convention = name;
    }
  }
  r.relative_l2 = RelativeL2(r.rho_glrt, r.rho_oracle);
  return r;
}

int CmdSpectrum(const RunConfig &config, std::ostream &out, std::ostream &err)
{
  try
  {
    const EffectiveParams e = ResolveEffective(config);
    const SpectrumResult s = RunSpectrum(config, e);
    if (config.output.empty())
    {
      WriteSpectrumCsv(out, s, e.kappa);
    }
    else
    {
      WriteFile(config.output, [&](std::ostream &f) { WriteSpectrumCsv(f, s, e.kappa); });
      out << EchoParameters(config);
      out << fmt::format("wrote {} rows to {}\n", s.omegas.size(), config.output);
    }
    if (!config.green_output.empty())
    {
      const GreenInputs in = PrepareGreenInputs(e, config.nonlinear, config.convention);
      const GreenTable t = Sweep(SweepGrid(config, e), config.j_set, in);
      WriteFile(config.green_output, [&](std::ostream &f) { WriteGreenCsv(f, t, config.verbose); });
    }
    if (!config.plot.empty())
    {
      std::vector<PlotCurve> curves;
      auto curve = [&](const SpectrumResult &r, bool nonlinear)
      {
        PlotCurve c;
        c.label = nonlinear ? "with H_NL" : "without H_NL";
        c.color = nonlinear ? "blue" : "red";
        c.dashed = nonlinear;
        for (std::size_t i = 0; i < r.omegas.size(); i++)
        {
          c.x.push_back(r.omegas[i] / e.kappa);
          c.rho.push_back(r.rho[i] * e.kappa);
        }
        c.r = r.r_exact;
        return c;
      };
      if (config.nonlinear && e.g0 > 0.0)
      {
        RunConfig off = config;
        off.nonlinear = false;
        off.j_set = {2};
        curves.push_back(curve(RunSpectrum(off, e), false));
      }
      curves.push_back(curve(s, config.nonlinear));
      const std::string title =
          config.preset.empty() ? std::string("density of states and reflection")
                                : config.preset;
      WriteFile(config.plot, [&](std::ostream &f) { WriteSpectrumSvg(f, curves, title); });
    }
    return kExitOk;
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }
}

int CmdGreen(const RunConfig &config, std::ostream &out, std::ostream &err)
{
  try
  {
    const EffectiveParams e = ResolveEffective(config);
    const GreenInputs in = PrepareGreenInputs(e, config.nonlinear, config.convention);
    const GreenTable t = Sweep(SweepGrid(config, e), config.j_set, in);
    const std::string path = !config.green_output.empty() ? config.green_output : config.output;
    if (path.empty())
    {
      WriteGreenCsv(out, t, config.verbose);
    }
    else
    {
      WriteFile(path, [&](std::ostream &f) { WriteGreenCsv(f, t, config.verbose); });
      out << fmt::format("wrote {} rows to {}\n", t.omegas.size(), path);
    }
    return kExitOk;
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }
}

int CmdResonance(double delta, double omega_m, double kappa, double gamma, std::ostream &out,
                 std::ostream &err)
{
  try
  {
    const double g = ResonanceCoupling(delta, omega_m);
    const NormalModes nm = NormalFrequencies(delta, omega_m, g);
    EffectiveParams e;
    e.delta = delta;
    e.omega_m = omega_m;
    e.kappa = kappa;
    e.gamma = gamma;
    e.g = g;
    const StabilityReport stab = StabilityCheck(DriftMatrix(e));
    out << fmt::format("g = {:.11e}\n", g);
    out << fmt::format("omega_minus = {:.11e}\nomega_plus = {:.11e}\n", nm.omega_minus,
                       nm.omega_plus);
    out << fmt::format("stability = {} (kappa = {}, gamma = {})\n",
                       stab.stable ? "stable" : "unstable", kappa, gamma);
    out << FormatEigenvalues(stab) << '\n';
    return kExitOk;
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }
}

int CmdCompare(const RunConfig &config, std::ostream &out, std::ostream &err)
{
  try
  {
    const CompareResult r = RunCompare(config);
    const EffectiveParams e = ResolveEffective(config);
    nlohmann::ordered_json j;
    j["parameters"] = {{"delta", e.delta},     {"omega_m", e.omega_m}, {"kappa", e.kappa},
                       {"gamma", e.gamma},     {"g0", e.g0},           {"g", e.g},
                       {"kappa_prime", e.kappa_prime}, {"n_th", e.n_th}, {"n_ph", e.n_ph}};
    j["nonlinear"] = config.nonlinear;
    j["moment_convention"] = ToString(config.convention);
    j["grid"] = {{"omega_min", config.grid.omega_min},
                 {"omega_max", config.grid.omega_max},
                 {"step", config.grid.step}};
    j["cutoffs"] = {{"n_a", r.cutoffs.n_a}, {"n_b", r.cutoffs.n_b}};
    j["top_population"] = r.top_population;
    j["window"] = {{"flat_fraction", config.oracle->window.flat_fraction},
                   {"decay_fraction", config.oracle->window.decay_fraction},
                   {"tau_max", r.tau_max},
                   {"dt", r.cutoffs.dt},
                   {"peak_bias", r.peak_bias}};
    nlohmann::ordered_json scan = nlohmann::ordered_json::array();
    for (const auto &s : r.scan.entries)
    {
      scan.push_back({{"n_a", s.n_a},
                      {"n_b", s.n_b},
                      {"top_population", s.top_population},
                      {"peak_rho", s.peak_rho}});
    }
    j["convergence_scan"] = scan;
    j["relative_l2"] = r.relative_l2;
    j["relative_l2_by_convention"] = r.l2_by_convention;
    j["best_convention"] = r.best_convention;
    j["omega"] = r.omegas;
    j["rho_glrt"] = r.rho_glrt;
    j["rho_oracle"] = r.rho_oracle;

    if (!config.report.empty())
    {
      WriteFile(config.report, [&](std::ostream &f) { f << j.dump(2) << '\n'; });
    }
    auto write_csv = [&](std::ostream &f)
    {
      f << "omega_pc_over_kappa,rho_glrt_times_kappa,rho_oracle_times_kappa\n";
      for (std::size_t i = 0; i < r.omegas.size(); i++)
      {
        f << FormatNumber(r.omegas[i] / e.kappa) << ',' << FormatNumber(r.rho_glrt[i] * e.kappa)
          << ',' << FormatNumber(r.rho_oracle[i] * e.kappa) << '\n';
      }
    };
    if (!config.output.empty())
    {
      WriteFile(config.output, write_csv);
    }
    if (!config.plot.empty())
    {
      PlotCurve glrt{"GLRT", "red", false, {}, {}, {}};
      PlotCurve me{"master equation", "blue", true, {}, {}, {}};
      for (std::size_t i = 0; i < r.omegas.size(); i++)
      {
        glrt.x.push_back(r.omegas[i] / e.kappa);
        glrt.rho.push_back(r.rho_glrt[i] * e.kappa);
        glrt.r.push_back(1.0 - 2.0 * M_PI * e.kappa_prime * r.rho_glrt[i]);
        me.x.push_back(r.omegas[i] / e.kappa);
        me.rho.push_back(r.rho_oracle[i] * e.kappa);
        me.r.push_back(1.0 - 2.0 * M_PI * e.kappa_prime * r.rho_oracle[i]);
      }
      WriteFile(config.plot,
                [&](std::ostream &f) { WriteSpectrumSvg(f, {glrt, me}, "GLRT vs master equation"); });
    }
    out << EchoParameters(config);
    out << fmt::format("cutoffs = {}x{} (top population {:.3e})\n", r.cutoffs.n_a, r.cutoffs.n_b,
                       r.top_population);
    out << fmt::format("window = flat {} decay {} tau_max {:.6g} dt {} (peak bias {:.3e})\n",
                       config.oracle->window.flat_fraction, config.oracle->window.decay_fraction,
                       r.tau_max, r.cutoffs.dt, r.peak_bias);
    for (const auto &[name, d] : r.l2_by_convention)
    {
      out << fmt::format("relative_l2[{}] = {:.6e}\n", name, d);
    }
    out << fmt::format("relative_l2 = {:.6e}\nbest_convention = {}\n", r.relative_l2,
                       r.best_convention);
    if (config.output.empty() && config.report.empty())
    {
      write_csv(out);
    }
    return kExitOk;
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }
}

int CmdMeanfield(const RunConfig &config, std::ostream &out, std::ostream &err)
{
  try
  {
    if (config.mode != InputMode::Physical)
    {
      throw InvalidParameter("meanfield needs mode = physical (delta_c, eta_mag)");
    }
    const MeanFieldSolution s = SolveMeanFields(config.physical);
    const MeanFields &f = s.fields;
    out << fmt::format("alpha = {:.11e} {:+.11e}i\n", f.alpha.real(), f.alpha.imag());
    out << fmt::format("beta = {:.11e} {:+.11e}i\n", f.beta.real(), f.beta.imag());
    out << fmt::format("theta = {:.11e}\n", f.theta);
    out << fmt::format("delta = {:.11e}\n", f.delta_eff);
    out << fmt::format("g = {:.11e}\n", s.effective.g);
    out << fmt::format("residuals = {:.3e} {:.3e} {:.3e}\n", s.residuals[0], s.residuals[1],
                       s.residuals[2]);
    out << fmt::format("stable_roots = {}{}\n", s.stable_roots,
                       s.ambiguous ? " (ambiguous: lowest-intensity branch returned)" : "");
    return kExitOk;
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }
}

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Linear response of an optomechanical cavity with the cubic coupling kept"};
  app.require_subcommand(1);

  struct Flags
  {
    std::string config, preset, j_set, nonlinear, convention, output, plot, green_output, report;
    std::optional<double> omega_min, omega_max, step;
    bool oracle = false;
    bool verbose = false;
    std::vector<std::string> sets;
  } fl;
  auto common = [&fl](CLI::App *sub)
  {
    sub->add_option("--config", fl.config, "key = value configuration file");
    sub->add_option("--preset", fl.preset, "fig1a, fig1b, fig2, fig3 or fig4");
    sub->add_option("--omega-min", fl.omega_min);
    sub->add_option("--omega-max", fl.omega_max);
    sub->add_option("--step", fl.step);
    sub->add_option("--j-set", fl.j_set, "source indices, e.g. 1,2");
    sub->add_option("--nonlinear", fl.nonlinear, "on|off");
    sub->add_option("--moment-convention", fl.convention, "symmetric-plus-half|paper-literal");
    sub->add_option("--output", fl.output, "CSV path");
    sub->add_option("--plot", fl.plot, "SVG path");
    sub->add_option("--green-output", fl.green_output, "Green's table CSV path");
    sub->add_option("--report", fl.report, "comparison JSON path");
    sub->add_flag("--oracle", fl.oracle, "enable the master-equation block");
    sub->add_flag("--verbose", fl.verbose, "include P columns in the Green's table");
    sub->add_option("--set", fl.sets, "extra key=value overrides");
  };
  CLI::App *spectrum = app.add_subcommand("spectrum", "density of states, reflection, sidebands");
  CLI::App *green = app.add_subcommand("green", "Green's function table");
  CLI::App *compare = app.add_subcommand("compare", "GLRT against the master equation");
  CLI::App *meanfield = app.add_subcommand("meanfield", "mean-field solve (physical mode)");
  for (CLI::App *sub : {spectrum, green, compare, meanfield})
  {
    common(sub);
  }
  double delta = 0.0;
  double omega_m = 0.0;
  double kappa = 1.0;
  double gamma = 1e-4;
  CLI::App *resonance = app.add_subcommand("resonance", "coupling with omega_plus = 2 omega_minus");
  resonance->add_option("--delta", delta)->required();
  resonance->add_option("--omega-m", omega_m)->required();
  resonance->add_option("--kappa", kappa);
  resonance->add_option("--gamma", gamma);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (resonance->parsed())
  {
    return CmdResonance(delta, omega_m, kappa, gamma, out, err);
  }

  RunConfig config;
  try
  {
    KeyValues kv;
    if (!fl.preset.empty())
      kv.emplace_back("preset", fl.preset);
    if (!fl.config.empty())
    {
      std::ifstream in(fl.config);
      if (!in)
        throw InvalidParameter(fmt::format("cannot read configuration '{}'", fl.config));
      std::stringstream ss;
      ss << in.rdbuf();
      KeyValues file = ParseKeyValues(ss.str());
      // an explicit --preset overrides the file's preset
      if (!fl.preset.empty())
        std::erase_if(file, [](const auto &p) { return p.first == "preset"; });
      kv.insert(kv.end(), file.begin(), file.end());
    }
    auto num = [&kv](const char *k, const std::optional<double> &v)
    {
      if (v)
        kv.emplace_back(k, fmt::format("{}", *v));
    };
    num("omega_min", fl.omega_min);
    num("omega_max", fl.omega_max);
    num("step", fl.step);
    auto str = [&kv](const char *k, const std::string &v)
    {
      if (!v.empty())
        kv.emplace_back(k, v);
    };
    str("j_set", fl.j_set);
    str("nonlinear", fl.nonlinear);
    str("moment_convention", fl.convention);
    str("output", fl.output);
    str("plot", fl.plot);
    str("green_output", fl.green_output);
    str("report", fl.report);
    if (fl.oracle)
      kv.emplace_back("oracle", "on");
    if (fl.verbose)
      kv.emplace_back("verbose", "on");
    for (const auto &s : fl.sets)
    {
      KeyValues one = ParseKeyValues(s);
      kv.insert(kv.end(), one.begin(), one.end());
    }
    config = BuildConfig(kv);
  }
  catch (const std::exception &ex)
  {
    err << "error: " << ex.what() << '\n';
    return ExitCodeFor(ex);
  }

  if (spectrum->parsed())
    return CmdSpectrum(config, out, err);
  if (green->parsed())
    return CmdGreen(config, out, err);
  if (compare->parsed())
    return CmdCompare(config, out, err);
  return CmdMeanfield(config, out, err);
}

}  // namespace optoresponse
