#pragma once

#include <functional>
#include <vector>
#include "optoresponse/green.hpp"

namespace optoresponse
{

struct ProbeDrive
{
  Complex zeta;
  double omega_pc = 0.0;
};

struct SidebandAmplitudes
{
  Complex a_c;   // carrier
  Complex a_as;  // anti-Stokes, at omega_c + omega_pc
  Complex a_s;   // Stokes, at omega_c - omega_pc
};

struct SpectrumResult
{
  std::vector<double> omegas;
  std::vector<double> rho;
  std::vector<double> r_exact;
  std::vector<double> r_approx;
  std::vector<SidebandAmplitudes> sidebands;  // empty unless both j = 1 and j = 2 were swept
};

// rho = -Im G^{aa+} / pi
std::vector<double> DensityOfStates(const std::vector<Complex> &g_aa_dag);

// R = |1 - i kappa' G^{aa+}|^2
std::vector<double> ReflectionExact(const std::vector<Complex> &g_aa_dag, double kappa_prime);

// R ~ 1 - 2 pi kappa' rho, valid for kappa' << kappa.
std::vector<double> ReflectionApprox(const std::vector<double> &rho, double kappa_prime);

// g_aa_at_minus_w is G^{aa}(-omega_pc), the j = 1 column evaluated at -omega_pc.
SidebandAmplitudes ComputeSidebands(Complex g_aa_dag_at_w, Complex g_aa_at_minus_w,
                                    const ProbeDrive &probe, double kappa_prime, Complex eta,
                                    Complex alpha);

// eps_out(t) = A_c + A_aS e^{-i w t} + A_S e^{i w t}
Complex OutputField(double t, const SidebandAmplitudes &amps, double omega_pc);

// <a(t)> = alpha + zeta* G^{aa+}(w) e^{-i w t} + zeta G^{aa}(-w) e^{i w t}
Complex CavityField(double t, Complex alpha, Complex g_aa_dag_at_w, Complex g_aa_at_minus_w,
                    const ProbeDrive &probe);

struct SumRule
{
  double integral = 0.0;    // trapezoid over the grid
  double tail = 0.0;        // estimated weight beyond the grid edges
  double total = 0.0;
  double boundary_rho = 0.0;
};

// Integral of rho over a sorted (possibly nonuniform) grid plus a 1/omega^2
// tail estimate beyond each edge, centered on the spectral centroid.
// Throws GridTooNarrow when rho at either edge exceeds max_boundary_rho.
SumRule DosSumRule(const std::vector<double> &omegas, const std::vector<double> &rho,
                   double max_boundary_rho = 1e-4);

// Grows [omega_min, omega_max] symmetrically until the boundary rho drops
// below target_boundary_rho or the half-width reaches cap. Coarser spacing
// (pad_step) is used outside the original window.
std::vector<double> PaddedGrid(const FrequencyGrid &core, double pad_step, double cap,
                               double target_boundary_rho,
                               const std::function<double(double)> &rho_at);

// Sweep j = 2 (and j = 1 when sidebands are requested) and derive all observables.
SpectrumResult ComputeSpectrum(const std::vector<double> &omegas, const GreenInputs &in,
                               double kappa_prime, bool with_sidebands = false,
                               const ProbeDrive &probe = {}, Complex eta = 0.0,
                               Complex alpha = 0.0);

}  // namespace optoresponse
