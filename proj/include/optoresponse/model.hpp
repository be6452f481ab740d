#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>
#include <Eigen/Dense>

namespace optoresponse
{

using Complex = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

// Fluctuation vector ordering used everywhere: u = (da, da^dag, db, db^dag).
// All rates are expressed in units of the cavity linewidth (kappa = 1 by default).

// Rotating-frame constants that fully determine the fluctuation dynamics.
struct EffectiveParams
{
  double delta = 0.0;        // effective detuning
  double omega_m = 1.0;      // mechanical frequency
  double kappa = 1.0;        // cavity linewidth
  double gamma = 0.0;        // mechanical linewidth
  double g0 = 0.0;           // single-photon coupling
  double g = 0.0;            // enhanced coupling g0 * alpha
  double kappa_prime = 0.0;  // drive-port coupling
  double n_th = 0.0;         // thermal phonon number
  double n_ph = 0.0;         // thermal photon number

  // Throws InvalidParameter when an invariant is violated.
  void Validate() const;
};

// Bare-detuning description used when the mean fields must be solved for.
struct PhysicalParams
{
  double delta_c = 0.0;  // omega_0 - omega_c
  double eta_mag = 0.0;  // |eta|
  double omega_m = 1.0;
  double kappa = 1.0;
  double gamma = 0.0;
  double g0 = 0.0;
  double kappa_prime = 0.0;
  double n_th = 0.0;
  double n_ph = 0.0;

  void Validate() const;
};

struct MeanFields
{
  Complex alpha;     // real up to round-off with the chosen drive phase
  Complex beta;
  double beta_r = 0.0;
  double theta = 0.0;  // coupling-laser phase
  double delta_eff = 0.0;
};

struct MeanFieldSolution
{
  MeanFields fields;
  EffectiveParams effective;
  // Residuals of alpha, beta and detuning relations, in kappa units.
  std::array<double, 3> residuals{};
  // Set when more than one stable root exists; the lowest-intensity branch
  // (connected to eta = 0) is returned.
  bool ambiguous = false;
  int stable_roots = 0;
};

struct SystemMatrices
{
  Mat4 chi;
  std::array<Mat4, 4> gamma_tensors;  // Gamma^i_{mn} = gamma_tensors[i](m, n)
  Mat4 j_mat;
  Mat4 d_mat;
};

struct NormalModes
{
  double omega_minus = 0.0;
  double omega_plus = 0.0;
};

struct StabilityReport
{
  bool stable = false;
  std::array<Complex, 4> eigenvalues{};
  double max_real_part = 0.0;
};

MeanFieldSolution SolveMeanFields(const PhysicalParams &p);

Mat4 DriftMatrix(const EffectiveParams &e);
std::array<Mat4, 4> NonlinearTensors(double g0);
Mat4 CommutatorMatrix();
Mat4 DiffusionMatrix(const EffectiveParams &e);

// Assembles chi, Gamma (zeroed when nonlinear == false), J and D.
SystemMatrices BuildSystem(const EffectiveParams &e, bool nonlinear = true);

StabilityReport StabilityCheck(const Mat4 &chi);

// Closed-form normal frequencies of the undamped drift matrix.
NormalModes NormalFrequencies(double delta, double omega_m, double g);

// Enhanced coupling g > 0 at which omega_plus = 2 omega_minus.
double ResonanceCoupling(double delta, double omega_m);

std::string FormatEigenvalues(const StabilityReport &report);

}  // namespace optoresponse
