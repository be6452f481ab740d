#include <doctest.h>

#include <cmath>
#include <random>
#include "optoresponse/errors.hpp"
#include "optoresponse/model.hpp"

using namespace optoresponse;
using namespace std::complex_literals;

namespace
{

EffectiveParams Fig1a()
{
  EffectiveParams e;
  e.delta = 50;
  e.omega_m = 50;
  e.gamma = 1e-4;
  e.g0 = 1;
  e.g = 5;
  e.kappa_prime = 0.25;
  e.n_th = 1;
  return e;
}

EffectiveParams RandomParams(std::mt19937 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EffectiveParams e;
  e.kappa = 0.5 + u(rng);
  e.delta = 1.0 + 40.0 * u(rng);
  e.omega_m = 1.0 + 40.0 * u(rng);
  e.gamma = 1e-3 + 0.1 * u(rng);
  e.g = 0.1 * std::sqrt(e.delta * e.omega_m) * u(rng);
  e.g0 = u(rng);
  e.n_th = 3.0 * u(rng);
  e.n_ph = 0.5 * u(rng);
  return e;
}

}  // namespace

TEST_CASE("mean fields: undriven cavity")
{
  PhysicalParams p;
  p.delta_c = 37.0;
  p.omega_m = 50.0;
  p.gamma = 1e-4;
  p.g0 = 1.0;
  const MeanFieldSolution s = SolveMeanFields(p);
  CHECK(std::abs(s.fields.alpha) == 0.0);
  CHECK(std::abs(s.fields.beta) == 0.0);
  CHECK(s.fields.delta_eff == 37.0);
  CHECK(s.effective.g == 0.0);
}

TEST_CASE("mean fields: linear cavity reproduces alpha = X")
{
  const double wm = 50.0;
  const double x = 7.25;
  PhysicalParams p;
  p.delta_c = wm;
  p.omega_m = wm;
  p.gamma = 1e-4;
  p.g0 = 0.0;
  p.eta_mag = wm * std::sqrt(1.0 + 1.0 / (4.0 * wm * wm)) * x;
  const MeanFieldSolution s = SolveMeanFields(p);
  CHECK(s.fields.alpha.real() == doctest::Approx(x).epsilon(1e-13));
  CHECK(std::abs(s.fields.alpha.imag()) < 1e-12);
  CHECK(s.fields.delta_eff == wm);
  // alpha > 0 needs the branch with tan(theta) = -kappa/(2 delta) and cos(theta) < 0
  CHECK(std::tan(s.fields.theta) == doctest::Approx(-1.0 / (2.0 * wm)).epsilon(1e-12));
}

TEST_CASE("mean fields: back-substitution g = 15")
{
  // delta = 50 with alpha = 15 needs delta_c = delta - 2 g0 beta_r
  const double wm = 50.0, gamma = 1e-4, g0 = 1.0, alpha = 15.0, delta = 50.0;
  const double beta_r = -g0 * alpha * alpha * wm / (wm * wm + gamma * gamma / 4.0);
  CHECK(beta_r == doctest::Approx(-4.5).epsilon(1e-6));
  PhysicalParams p;
  p.delta_c = delta - 2.0 * g0 * beta_r;
  CHECK(p.delta_c == doctest::Approx(59.0).epsilon(1e-6));
  p.omega_m = wm;
  p.gamma = gamma;
  p.g0 = g0;
  p.eta_mag = alpha * std::abs(Complex(delta, -0.5));
  const MeanFieldSolution s = SolveMeanFields(p);
  CHECK(s.fields.alpha.real() == doctest::Approx(alpha).epsilon(1e-10));
  CHECK(s.effective.g == doctest::Approx(15.0).epsilon(1e-10));
  CHECK(s.fields.delta_eff == doctest::Approx(delta).epsilon(1e-10));
  for (double r : s.residuals)
  {
    CHECK(r < 1e-10);
  }
}

TEST_CASE("mean fields: residuals for random drives")
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; k++)
  {
    PhysicalParams p;
    p.omega_m = 5.0 + 45.0 * u(rng);
    p.delta_c = p.omega_m * (0.5 + u(rng));
    p.gamma = 1e-3;
    p.g0 = 0.2 * u(rng);
    p.eta_mag = 200.0 * u(rng);
    try
    {
      const MeanFieldSolution s = SolveMeanFields(p);
      for (double r : s.residuals)
      {
        CHECK(r < 1e-10 * std::max(1.0, std::abs(s.fields.alpha)));
      }
      CHECK(s.fields.delta_eff ==
            doctest::Approx(p.delta_c + 2.0 * p.g0 * s.fields.beta_r).epsilon(1e-12));
      CHECK(std::abs(s.fields.alpha.imag()) < 1e-12);
    }
    catch (const NoStableRoot &)
    {
      // strong drives may leave only unstable branches
    }
  }
}

TEST_CASE("mean fields: blue detuning has no stable root")
{
  PhysicalParams p;
  p.delta_c = -50.0;
  p.omega_m = 50.0;
  p.gamma = 1e-4;
  p.g0 = 1.0;
  p.eta_mag = 300.0;
  CHECK_THROWS_AS(SolveMeanFields(p), NoStableRoot);
}

TEST_CASE("mean fields: bistable drive flags ambiguity")
{
  // red-detuned Kerr-like bistability: several stable intensities
  PhysicalParams p;
  p.delta_c = 30.0;
  p.omega_m = 50.0;
  p.gamma = 1e-4;
  p.g0 = 1.0;
  p.eta_mag = 80.0;
  const MeanFieldSolution s = SolveMeanFields(p);
  CHECK(s.stable_roots >= 1);
  CHECK(s.ambiguous == (s.stable_roots > 1));
}

TEST_CASE("drift matrix: literal table for random parameters")
{
  std::mt19937 rng(11);
  for (int k = 0; k < 20; k++)
  {
    const EffectiveParams e = RandomParams(rng);
    const Mat4 chi = DriftMatrix(e);
    const Complex ig = 1i * e.g;
    const Complex table[4][4] = {
        {-e.kappa / 2 - 1i * e.delta, 0.0, -ig, -ig},
        {0.0, -e.kappa / 2 + 1i * e.delta, ig, ig},
        {-ig, -ig, -e.gamma / 2 - 1i * e.omega_m, 0.0},
        {ig, ig, 0.0, -e.gamma / 2 + 1i * e.omega_m},
    };
    for (int i = 0; i < 4; i++)
      for (int j = 0; j < 4; j++)
        CHECK(chi(i, j) == table[i][j]);
    // conjugation symmetry between (a, a+) and (b, b+)
    CHECK(chi(1, 1) == std::conj(chi(0, 0)));
    CHECK(chi(1, 0) == std::conj(chi(0, 1)));
    CHECK(chi(3, 3) == std::conj(chi(2, 2)));
    CHECK(chi(1, 2) == std::conj(chi(0, 2)));
    CHECK(chi(3, 0) == std::conj(chi(2, 0)));
  }
}

TEST_CASE("drift matrix: fig1a entries")
{
  const Mat4 chi = DriftMatrix(Fig1a());
  CHECK(chi(0, 2) == Complex(0.0, -5.0));
  CHECK(chi(0, 0) == Complex(-0.5, -50.0));
  EffectiveParams e = Fig1a();
  e.g = 0.0;
  const Mat4 d = DriftMatrix(e);
  CHECK(d.block<2, 2>(0, 2).norm() == 0.0);
  CHECK(d.block<2, 2>(2, 0).norm() == 0.0);
}

TEST_CASE("nonlinear tensors")
{
  for (const Mat4 &m : NonlinearTensors(0.0))
  {
    CHECK(m.norm() == 0.0);
  }
  const auto t = NonlinearTensors(1.0);
  CHECK(t[0](0, 2) == Complex(0.0, -1.0));
  CHECK(t[0](0, 3) == Complex(0.0, -1.0));
  CHECK(t[1](1, 2) == Complex(0.0, 1.0));
  CHECK(t[1](1, 3) == Complex(0.0, 1.0));
  CHECK(t[2](1, 0) == Complex(0.0, -1.0));
  CHECK(t[3](1, 0) == Complex(0.0, 1.0));
  int nonzero = 0;
  for (const Mat4 &m : t)
    for (int i = 0; i < 16; i++)
      nonzero += m(i) != 0.0;
  CHECK(nonzero == 6);

  // Gamma^2 = conj(Gamma^1) with 1<->2 and 3<->4 swapped, as for chi
  const double g0 = 0.37;
  const auto s = NonlinearTensors(g0);
  const int swap[4] = {1, 0, 3, 2};
  for (int m = 0; m < 4; m++)
    for (int n = 0; n < 4; n++)
    {
      CHECK(s[1](m, n) == std::conj(s[0](swap[m], swap[n])));
      CHECK(s[3](m, n) == std::conj(s[2](m, n)));
    }
}

TEST_CASE("commutator and diffusion matrices")
{
  const Mat4 j = CommutatorMatrix();
  CHECK((j + j.transpose()).norm() == 0.0);
  CHECK(j(0, 1) == 1.0);
  CHECK(j(2, 3) == 1.0);
  CHECK(j(1, 0) == -1.0);
  CHECK(j(3, 2) == -1.0);
  CHECK(j.cwiseAbs().sum() == 4.0);

  EffectiveParams e = Fig1a();
  e.n_ph = 0.3;
  const Mat4 d = DiffusionMatrix(e);
  CHECK((d - d.transpose()).norm() == 0.0);
  CHECK(d(0, 1).real() == doctest::Approx(0.5 * 1.6));
  CHECK(d(2, 3).real() == doctest::Approx(0.5 * 3.0 * 1e-4));
  CHECK(d.cwiseAbs().sum() == doctest::Approx(2 * 0.8 + 2 * 1.5e-4));
}

TEST_CASE("stability check")
{
  EffectiveParams e = Fig1a();
  e.g = 0.0;
  StabilityReport r = StabilityCheck(DriftMatrix(e));
  CHECK(r.stable);
  CHECK(r.eigenvalues[0].imag() == doctest::Approx(-50.0));
  CHECK(r.max_real_part == doctest::Approx(-0.5e-4));

  e.g = 15.0;
  CHECK(StabilityCheck(DriftMatrix(e)).stable);

  Mat4 chi = DriftMatrix(e);
  chi(0, 0).real(0.0);
  chi(1, 1).real(0.0);
  chi(2, 2).real(0.0);
  chi(3, 3).real(0.0);
  CHECK_FALSE(StabilityCheck(chi).stable);

  e.delta = -50.0;  // blue detuning
  CHECK_FALSE(StabilityCheck(DriftMatrix(e)).stable);
}

TEST_CASE("normal frequencies")
{
  NormalModes m = NormalFrequencies(50.0, 50.0, 5.0);
  CHECK(m.omega_minus == doctest::Approx(44.72).epsilon(1e-4));
  CHECK(m.omega_plus == doctest::Approx(54.77).epsilon(1e-4));
  CHECK(m.omega_minus == doctest::Approx(50.0 * std::sqrt(1.0 - 0.2)).epsilon(1e-14));

  m = NormalFrequencies(18.0, 10.0, 0.0);
  CHECK(m.omega_minus == doctest::Approx(10.0));
  CHECK(m.omega_plus == doctest::Approx(18.0));

  m = NormalFrequencies(18.0, 10.0, 2.2);
  CHECK(m.omega_minus == doctest::Approx(9.24).epsilon(1e-3));
  CHECK(m.omega_plus == doctest::Approx(18.40).epsilon(1e-3));

  m = NormalFrequencies(50.0, 50.0, 15.0);
  CHECK(m.omega_plus / m.omega_minus == doctest::Approx(2.0).epsilon(1e-9));

  CHECK_THROWS_AS(NormalFrequencies(50.0, 50.0, 26.0), ImaginaryMode);
}

TEST_CASE("resonance coupling")
{
  for (double wm : {0.3, 1.0, 10.0, 50.0, 1234.5})
  {
    CHECK(std::abs(ResonanceCoupling(wm, wm) / (0.3 * wm) - 1.0) < 1e-10);
  }
  const double g = ResonanceCoupling(18.0, 10.0);
  CHECK(g >= 2.2);
  CHECK(g <= 2.3);
  CHECK(g == doctest::Approx(2.25).epsilon(5e-3));
  // 5 sqrt((D^2 - w^2)^2 + 16 g^2 w D) = 3 (D^2 + w^2)
  CHECK(5.0 * std::sqrt(std::pow(18.0 * 18.0 - 100.0, 2) + 16.0 * g * g * 180.0) ==
        doctest::Approx(3.0 * 424.0).epsilon(1e-10));
  const NormalModes m = NormalFrequencies(18.0, 10.0, g);
  CHECK(m.omega_plus == doctest::Approx(2.0 * m.omega_minus).epsilon(1e-9));

  CHECK_THROWS_AS(ResonanceCoupling(-1.0, 10.0), NoRoot);
  CHECK_THROWS_AS(ResonanceCoupling(10.0, 0.0), NoRoot);
}

TEST_CASE("parameter validation")
{
  EffectiveParams e = Fig1a();
  e.kappa = 0.0;
  CHECK_THROWS_AS(BuildSystem(e), InvalidParameter);
  e = Fig1a();
  e.n_th = -1.0;
  CHECK_THROWS_AS(BuildSystem(e), InvalidParameter);
  PhysicalParams p;
  p.eta_mag = -1.0;
  CHECK_THROWS_AS(SolveMeanFields(p), InvalidParameter);
  const SystemMatrices off = BuildSystem(Fig1a(), false);
  for (const Mat4 &m : off.gamma_tensors)
  {
    CHECK(m.norm() == 0.0);
  }
}
