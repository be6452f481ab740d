#include "optoresponse/response.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

using namespace std::complex_literals;

std::vector<double> DensityOfStates(const std::vector<Complex> &g_aa_dag)
{
  std::vector<double> rho(g_aa_dag.size());
  std::transform(g_aa_dag.begin(), g_aa_dag.end(), rho.begin(),
                 [](Complex g) { return -g.imag() / M_PI; });
  return rho;
}

std::vector<double> ReflectionExact(const std::vector<Complex> &g_aa_dag, double kappa_prime)
{
  if (kappa_prime < 0.0)
  {
    throw InvalidParameter("kappa_prime must be nonnegative");
  }
  std::vector<double> r(g_aa_dag.size());
  std::transform(g_aa_dag.begin(), g_aa_dag.end(), r.begin(),
                 [kappa_prime](Complex g) { return std::norm(1.0 - 1i * kappa_prime * g); });
  return r;
}

std::vector<double> ReflectionApprox(const std::vector<double> &rho, double kappa_prime)
{
  std::vector<double> r(rho.size());
  std::transform(rho.begin(), rho.end(), r.begin(),
                 [kappa_prime](double x) { return 1.0 - 2.0 * M_PI * kappa_prime * x; });
  return r;
}

SidebandAmplitudes ComputeSidebands(Complex g_aa_dag_at_w, Complex g_aa_at_minus_w,
                                    const ProbeDrive &probe, double kappa_prime, Complex eta,
                                    Complex alpha)
{
  SidebandAmplitudes amps;
  amps.a_c = 1i * eta + kappa_prime * alpha;
  amps.a_as = 1i * std::conj(probe.zeta) * (1.0 - 1i * kappa_prime * g_aa_dag_at_w);
  amps.a_s = kappa_prime * probe.zeta * g_aa_at_minus_w;
  return amps;
}

Complex OutputField(double t, const SidebandAmplitudes &amps, double omega_pc)
{
  return amps.a_c + amps.a_as * std::polar(1.0, -omega_pc * t) +
         amps.a_s * std::polar(1.0, omega_pc * t);
}

Complex CavityField(double t, Complex alpha, Complex g_aa_dag_at_w, Complex g_aa_at_minus_w,
                    const ProbeDrive &probe)
{
  return alpha + std::conj(probe.zeta) * g_aa_dag_at_w * std::polar(1.0, -probe.omega_pc * t) +
         probe.zeta * g_aa_at_minus_w * std::polar(1.0, probe.omega_pc * t);
}

SumRule DosSumRule(const std::vector<double> &omegas, const std::vector<double> &rho,
                   double max_boundary_rho)
{
  if (omegas.size() < 2 || omegas.size() != rho.size())
  {
    throw InvalidParameter("sum rule needs matching grid and density arrays");
  }
  SumRule s;
  double first_moment = 0.0;
  for (std::size_t i = 1; i < omegas.size(); i++)
  {
    const double h = omegas[i] - omegas[i - 1];
    s.integral += 0.5 * h * (rho[i] + rho[i - 1]);
    first_moment += 0.5 * h * (omegas[i] * rho[i] + omegas[i - 1] * rho[i - 1]);
  }
  s.boundary_rho = std::max(std::abs(rho.front()), std::abs(rho.back()));
  if (s.boundary_rho > max_boundary_rho)
  {
    throw GridTooNarrow(fmt::format("density at the grid edge is {:.3e} (limit {:.3e})",
                                    s.boundary_rho, max_boundary_rho));
  }
  // rho ~ A / (omega - c)^2 beyond the edges integrates to rho_edge |omega_edge - c|.
  const double centroid = first_moment / s.integral;
  s.tail = rho.front() * std::max(0.0, centroid - omegas.front()) +
           rho.back() * std::max(0.0, omegas.back() - centroid);
  s.total = s.integral + s.tail;
  return s;
}

std::vector<double> PaddedGrid(const FrequencyGrid &core, double pad_step, double cap,
                               double target_boundary_rho,
                               const std::function<double(double)> &rho_at)
{
  const std::vector<double> inner = core.Points();
  const double center = 0.5 * (core.omega_min + core.omega_max);
  double half = 0.5 * (core.omega_max - core.omega_min);
  while (half < cap &&
         std::max(std::abs(rho_at(center - half)), std::abs(rho_at(center + half))) >
             target_boundary_rho)
  {
    half = std::min(cap, 1.5 * half);
  }
  std::vector<double> pts;
  const auto n_lo = static_cast<long>(std::ceil((inner.front() - (center - half)) / pad_step));
  for (long i = n_lo; i >= 1; i--)
  {
    pts.push_back(inner.front() - static_cast<double>(i) * pad_step);
  }
  pts.insert(pts.end(), inner.begin(), inner.end());
  const auto n_hi = static_cast<long>(std::ceil((center + half - inner.back()) / pad_step));
  for (long i = 1; i <= n_hi; i++)
  {
    pts.push_back(inner.back() + static_cast<double>(i) * pad_step);
  }
  return pts;
}

SpectrumResult ComputeSpectrum(const std::vector<double> &omegas, const GreenInputs &in,
                               double kappa_prime, bool with_sidebands,
                               const ProbeDrive &probe, Complex eta, Complex alpha)
{
  SpectrumResult out;
  out.omegas = omegas;
  const GreenTable table = Sweep(omegas, {2}, in);
  const std::vector<Complex> g = table.Column(1, 2);
  out.rho = DensityOfStates(g);
  out.r_exact = ReflectionExact(g, kappa_prime);
  out.r_approx = ReflectionApprox(out.rho, kappa_prime);
  if (with_sidebands)
  {
    std::vector<double> mirrored(omegas.size());
    std::transform(omegas.begin(), omegas.end(), mirrored.begin(), [](double w) { return -w; });
    const std::vector<Complex> g_aa = Sweep(mirrored, {1}, in).Column(1, 1);
    out.sidebands.resize(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); i++)
    {
      ProbeDrive p = probe;
      p.omega_pc = omegas[i];
      out.sidebands[i] = ComputeSidebands(g[i], g_aa[i], p, kappa_prime, eta, alpha);
    }
  }
  return out;
}

}  // namespace optoresponse
