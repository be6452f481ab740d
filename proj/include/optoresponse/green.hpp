#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>
#include "optoresponse/model.hpp"
#include "optoresponse/steady_state.hpp"

namespace optoresponse
{

// Uniform grid of probe-coupling detunings, endpoints included.
struct FrequencyGrid
{
  double omega_min = 0.0;
  double omega_max = 1.0;
  double step = 0.01;

  void Validate() const;
  std::vector<double> Points() const;
};

// Unknowns per block: [G^{1j}..G^{4j}, P^{11j}, P^{12j}, .., P^{44j}], P row-major in (m, n).
constexpr int kBlockSize = 20;
constexpr int PIndex(int m, int n) { return 4 + 4 * m + n; }

using BlockMatrix = Eigen::Matrix<Complex, kBlockSize, kBlockSize>;
using BlockVector = Eigen::Matrix<Complex, kBlockSize, 1>;

// Everything the frequency-domain equations need besides omega and the source index.
struct GreenInputs
{
  Mat4 chi;
  std::array<Mat4, 4> gamma_tensors;
  Mat4 moments;
  Mat4 j_mat;
};

// Builds chi, Gamma, J and the steady-state moments for a parameter set.
GreenInputs PrepareGreenInputs(const EffectiveParams &e, bool nonlinear,
                               MomentConvention convention);

struct GreenBlock
{
  double omega = 0.0;
  int j = 1;  // 1-based source index
  Vec4 g_col;
  Eigen::Matrix<Complex, 16, 1> p_col;
  double relative_residual = 0.0;
};

struct GreenTable
{
  std::vector<double> omegas;
  std::vector<int> j_set;
  // blocks[jk][i] is the block for j_set[jk] at omegas[i].
  std::vector<std::vector<GreenBlock>> blocks;

  const std::vector<GreenBlock> &ForSource(int j) const;
  // G^{mj}(omega) along the grid, m and j 1-based.
  std::vector<Complex> Column(int m, int j) const;
};

struct AssembledSystem
{
  BlockMatrix a;
  BlockVector b;
};

// j is 1-based as in the physics notation.
AssembledSystem AssembleSystem(double omega, int j, const GreenInputs &in);

GreenBlock SolveBlock(double omega, int j, const GreenInputs &in);

// (i omega I + chi) G_{.j} = i J_{.j}
Vec4 LinearGreen(double omega, const Mat4 &chi, const Mat4 &j_mat, int j);

GreenTable Sweep(const std::vector<double> &omegas, const std::vector<int> &j_set,
                 const GreenInputs &in);

// Union of a base grid with finer sub-grids around each center; each level
// divides the step by `factor` on a window `factor` times narrower. Points
// outside [base.front(), base.back()] are dropped; base must be nonempty.
std::vector<double> RefineAround(const std::vector<double> &base, double base_step,
                                 const std::vector<double> &centers, double half_width,
                                 int levels, int factor);

struct CausalityReport
{
  double max_negative = 0.0;  // max |G(t)| for t < 0
  double max_positive = 0.0;  // max |G(t)| for t > 0
  double ratio = 0.0;
  Complex g_zero_plus;        // G(0+)
};

// Inverse Fourier transform of G^{12} on a uniform grid, sampled on
// t = +-t_step, +-2 t_step, .. up to t_max. The slowly decaying tail is
// removed first: the linear response of chi_ref, whose transform
// -i theta(t) (e^{chi_ref t} J)^{12} is known in closed form, is subtracted
// and only the remainder is transformed numerically. With chi_ref the drift
// matrix of the same parameters the remainder falls off as 1/omega^3.
CausalityReport CausalityCheck(const std::vector<double> &omegas,
                               const std::vector<Complex> &g_aa_dag, const Mat4 &chi_ref,
                               double t_max, double t_step);

}  // namespace optoresponse
