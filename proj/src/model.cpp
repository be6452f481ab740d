#include "optoresponse/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <fmt/format.h>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

using namespace std::complex_literals;

namespace
{

void Require(bool condition, const char *what)
{
  if (!condition)
  {
    throw InvalidParameter(what);
  }
}

bool Finite(std::initializer_list<double> values)
{
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 may vanish), polished by Newton.
std::vector<double> RealCubicRoots(double c3, double c2, double c1, double c0)
{
  std::vector<double> roots;
  auto eval = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto deriv = [&](double x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (std::abs(c3) <= 1e-300 * scale || c3 == 0.0)
  {
    if (c2 == 0.0)
    {
      if (c1 != 0.0)
      {
        roots.push_back(-c0 / c1);
      }
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0)
    {
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      roots.push_back(q / c2);
      if (q != 0.0)
      {
        roots.push_back(c0 / q);
      }
    }
  }
  else
  {
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 0) = -c2 / c3;
    companion(0, 1) = -c1 / c3;
    companion(0, 2) = -c0 / c3;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
    for (int i = 0; i < 3; i++)
    {
      const std::complex<double> z = solver.eigenvalues()(i);
      if (std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z)))
      {
        roots.push_back(z.real());
      }
    }
  }
  for (double &x : roots)
  {
    for (int it = 0; it < 50; it++)
    {
      const double d = deriv(x);
      if (d == 0.0)
      {
        break;
      }
      const double step = eval(x) / d;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x)))
      {
        break;
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b)
                          { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }),
              roots.end());
  return roots;
}

}  // namespace

void EffectiveParams::Validate() const
{
  Require(Finite({delta, omega_m, kappa, gamma, g0, g, kappa_prime, n_th, n_ph}),
          "effective parameters must be finite");
  Require(kappa > 0.0, "kappa must be positive");
  Require(gamma >= 0.0, "gamma must be nonnegative");
  Require(omega_m > 0.0, "omega_m must be positive");
  Require(n_th >= 0.0, "n_th must be nonnegative");
  Require(n_ph >= 0.0, "n_ph must be nonnegative");
  Require(kappa_prime >= 0.0, "kappa_prime must be nonnegative");
  Require(g0 >= 0.0, "g0 must be nonnegative");
}

void PhysicalParams::Validate() const
{
  Require(Finite({delta_c, eta_mag, omega_m, kappa, gamma, g0, kappa_prime, n_th, n_ph}),
          "physical parameters must be finite");
  Require(eta_mag >= 0.0, "eta_mag must be nonnegative");
  Require(kappa > 0.0, "kappa must be positive");
  Require(gamma >= 0.0, "gamma must be nonnegative");
  Require(omega_m > 0.0, "omega_m must be positive");
  Require(n_th >= 0.0, "n_th must be nonnegative");
  Require(n_ph >= 0.0, "n_ph must be nonnegative");
  Require(kappa_prime >= 0.0, "kappa_prime must be nonnegative");
  Require(g0 >= 0.0, "g0 must be nonnegative");
}

MeanFieldSolution SolveMeanFields(const PhysicalParams &p)
{
  p.Validate();

  // |alpha|^2 = n obeys n ((delta_c - K n)^2 + kappa^2/4) = |eta|^2 where the
  // radiation-pressure shift of the detuning is -K n.
  const double mech_den = p.omega_m * p.omega_m + 0.25 * p.gamma * p.gamma;
  const double shift = 2.0 * p.g0 * p.g0 * p.omega_m / mech_den;
  const double eta2 = p.eta_mag * p.eta_mag;

  std::vector<double> intensities;
  if (eta2 == 0.0)
  {
    intensities.push_back(0.0);
  }
  else
  {
    const double c3 = shift * shift;
    const double c2 = -2.0 * p.delta_c * shift;
    const double c1 = p.delta_c * p.delta_c + 0.25 * p.kappa * p.kappa;
    const double c0 = -eta2;
    for (double n : RealCubicRoots(c3, c2, c1, c0))
    {
      if (n > 0.0)
      {
        intensities.push_back(n);
      }
    }
  }

  MeanFieldSolution best;
  bool found = false;
  std::string report;
  for (double n : intensities)
  {
    MeanFieldSolution sol;
    MeanFields &mf = sol.fields;
    const double alpha = std::sqrt(n);
    mf.delta_eff = p.delta_c - shift * n;
    mf.beta = -p.g0 * n / (p.omega_m - 0.5i * p.gamma);
    mf.beta_r = mf.beta.real();
    // Phase making alpha real and positive; tan(theta) = -kappa / (2 delta).
    mf.theta = std::atan2(0.5 * p.kappa, -mf.delta_eff);

    const Complex eta = std::polar(p.eta_mag, mf.theta);
    const Complex alpha_rel = -eta / (mf.delta_eff - 0.5i * p.kappa);
    mf.alpha = eta2 == 0.0 ? Complex(0.0) : Complex(alpha, 0.0);
    sol.residuals[0] = std::abs(mf.alpha - alpha_rel);
    sol.residuals[1] =
        std::abs(mf.beta + p.g0 * std::norm(mf.alpha) / (p.omega_m - 0.5i * p.gamma));
    sol.residuals[2] = std::abs(mf.delta_eff - (p.delta_c + 2.0 * p.g0 * mf.beta_r));

    EffectiveParams &e = sol.effective;
    e.delta = mf.delta_eff;
    e.omega_m = p.omega_m;
    e.kappa = p.kappa;
    e.gamma = p.gamma;
    e.g0 = p.g0;
    e.g = p.g0 * mf.alpha.real();
    e.kappa_prime = p.kappa_prime;
    e.n_th = p.n_th;
    e.n_ph = p.n_ph;

    const StabilityReport stab = StabilityCheck(DriftMatrix(e));
    report += fmt::format("  |alpha|^2 = {:.6e}, delta = {:.6e}: {}, {}\n", n, mf.delta_eff,
                          stab.stable ? "stable" : "unstable", FormatEigenvalues(stab));
    if (!stab.stable)
    {
      continue;
    }
    if (!found)
    {
      best = sol;
      found = true;
    }
    best.stable_roots++;
  }
  if (!found)
  {
    throw NoStableRoot("no mean-field root with a stable drift matrix\n" + report);
  }
  best.ambiguous = best.stable_roots > 1;
  return best;
}

Mat4 DriftMatrix(const EffectiveParams &e)
{
  const Complex ig = 1i * e.g;
  Mat4 chi;
  chi << -0.5 * e.kappa - 1i * e.delta, 0.0, -ig, -ig,
         0.0, -0.5 * e.kappa + 1i * e.delta, ig, ig,
         -ig, -ig, -0.5 * e.gamma - 1i * e.omega_m, 0.0,
         ig, ig, 0.0, -0.5 * e.gamma + 1i * e.omega_m;
  return chi;
}

std::array<Mat4, 4> NonlinearTensors(double g0)
{
  std::array<Mat4, 4> t;
  for (auto &m : t)
  {
    m.setZero();
  }
  const Complex ig0 = 1i * g0;
  t[0](0, 2) = -ig0;
  t[0](0, 3) = -ig0;
  t[1](1, 2) = ig0;
  t[1](1, 3) = ig0;
  t[2](1, 0) = -ig0;
  t[3](1, 0) = ig0;
  return t;
}

Mat4 CommutatorMatrix()
{
  Mat4 j = Mat4::Zero();
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  j(2, 3) = 1.0;
  j(3, 2) = -1.0;
  return j;
}

Mat4 DiffusionMatrix(const EffectiveParams &e)
{
  Mat4 d = Mat4::Zero();
  d(0, 1) = d(1, 0) = 0.5 * (1.0 + 2.0 * e.n_ph) * e.kappa;
  d(2, 3) = d(3, 2) = 0.5 * (1.0 + 2.0 * e.n_th) * e.gamma;
  return d;
}

SystemMatrices BuildSystem(const EffectiveParams &e, bool nonlinear)
{
  e.Validate();
  SystemMatrices s;
  s.chi = DriftMatrix(e);
  s.gamma_tensors = NonlinearTensors(nonlinear ? e.g0 : 0.0);
  s.j_mat = CommutatorMatrix();
  s.d_mat = DiffusionMatrix(e);
  return s;
}

StabilityReport StabilityCheck(const Mat4 &chi)
{
  Eigen::ComplexEigenSolver<Mat4> solver(chi, false);
  StabilityReport r;
  r.max_real_part = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; i++)
  {
    r.eigenvalues[i] = solver.eigenvalues()(i);
    r.max_real_part = std::max(r.max_real_part, r.eigenvalues[i].real());
  }
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
            [](Complex a, Complex b) { return a.imag() < b.imag(); });
  r.stable = r.max_real_part < 0.0;
  return r;
}

NormalModes NormalFrequencies(double delta, double omega_m, double g)
{
  const double sum = delta * delta + omega_m * omega_m;
  const double diff = delta * delta - omega_m * omega_m;
  const double radicand = diff * diff + 16.0 * g * g * omega_m * delta;
  if (radicand < 0.0)
  {
    throw ImaginaryMode(fmt::format("normal-mode radicand {:.6e} is negative", radicand));
  }
  const double root = std::sqrt(radicand);
  const double lower2 = 0.5 * (sum - root);
  if (lower2 < 0.0)
  {
    throw ImaginaryMode(fmt::format("omega_minus^2 = {:.6e} is negative", lower2));
  }
  return {std::sqrt(lower2), std::sqrt(0.5 * (sum + root))};
}

double ResonanceCoupling(double delta, double omega_m)
{
  if (!(delta > 0.0) || !(omega_m > 0.0))
  {
    throw NoRoot("resonance condition requires positive detuning and mechanical frequency");
  }
  // omega_minus reaches zero at g^2 = delta omega_m / 4, where the mismatch is positive.
  const double g_max = 0.5 * std::sqrt(delta * omega_m);
  auto mismatch = [&](double g)
  {
    const NormalModes m = NormalFrequencies(delta, omega_m, g);
    return m.omega_plus - 2.0 * m.omega_minus;
  };
  if (!(mismatch(0.0) < 0.0))
  {
    throw NoRoot(fmt::format("omega_plus = 2 omega_minus has no root for delta = {}, omega_m = {}",
                             delta, omega_m));
  }
  double lo = 0.0;
  double hi = g_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; it++)
  {
    const double mid = 0.5 * (lo + hi);
    (mismatch(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string FormatEigenvalues(const StabilityReport &report)
{
  std::ostringstream out;
  out << "drift-matrix eigenvalues:";
  for (const Complex &z : report.eigenvalues)
  {
    out << fmt::format(" ({:+.6e}{:+.6e}i)", z.real(), z.imag());
  }
  return out.str();
}

}  // namespace optoresponse
