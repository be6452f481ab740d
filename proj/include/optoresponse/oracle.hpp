#pragma once

#include <utility>
#include <vector>
#include <Eigen/Sparse>
#include "optoresponse/model.hpp"

namespace optoresponse
{

// Master-equation cross-check on a truncated two-mode Fock space. The
// density operator is vectorized column-major: vec(rho)[i + d j] = rho(i, j).

struct FockConfig
{
  int n_a = 8;           // optical levels 0..n_a-1
  int n_b = 8;           // mechanical levels 0..n_b-1
  double tau_max = 0.0;  // correlation horizon; 0 picks 10 x slowest decay time
  double dt = 0.01;      // correlation sampling step

  void Validate() const;
};

using SparseC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using VecX = Eigen::VectorXcd;
using MatX = Eigen::MatrixXcd;

struct Generator
{
  int n_a = 0;
  int n_b = 0;
  int dim = 0;  // Hilbert-space dimension n_a n_b
  SparseC liouvillian;
  SparseC a;  // annihilators on the product space
  SparseC b;
  SparseC hamiltonian;
  double slowest_rate = 0.0;  // smallest |Re| among drift-matrix eigenvalues
};

struct SteadyDensity
{
  MatX rho;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double residual = 0.0;           // max |L(rho)|
  double top_population_a = 0.0;   // population of optical level n_a - 1
  double top_population_b = 0.0;
};

struct CorrelationSeries
{
  double dt = 0.0;
  std::vector<Complex> values;  // C(k dt), k = 0..N-1
  double tau_max() const { return dt * static_cast<double>(values.size() - 1); }
};

struct WindowSettings
{
  double flat_fraction = 0.8;     // window is 1 up to flat_fraction * tau_max
  double decay_fraction = 0.04;   // then decays as exp(-(tau - flat) / (decay_fraction tau_max))
};

struct OracleDos
{
  std::vector<double> rho;
  double peak_bias = 0.0;         // relative peak change between windowed and raw transforms
  double imaginary_residue = 0.0; // max |Im| / max |Re| of the full-line transform
};

// Throws InvalidParameter unless n_ph == 0 and the drift matrix is stable.
Generator BuildGenerator(const EffectiveParams &e, const FockConfig &f);

// Null vector of the generator with unit trace. When enforce_cutoff is set,
// throws CutoffTooSmall if either top Fock level holds more than 1e-4.
SteadyDensity SolveSteadyDensity(const Generator &gen, bool enforce_cutoff = true);

// Steady state by time integration from the vacuum; used for large spaces.
SteadyDensity PropagateSteadyDensity(const Generator &gen, double tolerance = 1e-8,
                                     double t_limit = 1e6);

// Symmetrized fluctuation covariance V^{ij} = <{du^i, du^j}>/2 of the steady state.
Mat4 SteadyCovariance(const SteadyDensity &ss, const Generator &gen);

// C(tau) = <[da(tau), da^dag(0)]> by regression: evolve a^dag rho - rho a^dag and trace against a.
CorrelationSeries CommutatorCorrelation(const SteadyDensity &ss, const Generator &gen,
                                        const FockConfig &f);

// rho(w) = (1/pi) Re int_0^T e^{i w tau} C(tau) window(tau) dtau, equal to the
// full-line transform with C(-tau) = conj(C(tau)).
// Throws WindowBias when windowing moves the peak by more than max_peak_bias.
OracleDos DosFromCorrelation(const CorrelationSeries &c, const std::vector<double> &omegas,
                             const WindowSettings &window = {}, double max_peak_bias = 0.01);

// Frequency-domain route: rho(w) = (1/pi) Re Tr[a (-(L + i w))^{-1} (a^dag rho - rho a^dag)].
std::vector<double> DosFromResolvent(const SteadyDensity &ss, const Generator &gen,
                                     const std::vector<double> &omegas);

struct ScanEntry
{
  int n_a = 0;
  int n_b = 0;
  double top_population = 0.0;  // max of the two top-level populations
  double peak_rho = 0.0;
  double peak_bias = 0.0;
  std::vector<double> rho;  // windowed density on the scan grid
};

struct ScanReport
{
  std::vector<ScanEntry> entries;
  bool converged = false;
  FockConfig recommended;
  int recommended_index = -1;  // into entries
};

// Runs the oracle over increasing cutoffs. A pair qualifies when its top
// populations are below 1e-4 and its peak rho differs by at most 1% from the
// previous pair; the largest qualifying pair is recommended. With
// stop_when_converged the scan ends at the first qualifying pair.
ScanReport ConvergenceScan(const EffectiveParams &e,
                           const std::vector<std::pair<int, int>> &cutoffs,
                           const std::vector<double> &omegas, const FockConfig &base = {},
                           bool stop_when_converged = false, const WindowSettings &window = {});

}  // namespace optoresponse
