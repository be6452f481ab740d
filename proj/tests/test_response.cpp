#include <doctest.h>

#include <algorithm>
#include "optoresponse/errors.hpp"
#include "optoresponse/response.hpp"

using namespace optoresponse;
using namespace std::complex_literals;

namespace
{

EffectiveParams Params(double delta, double wm, double g0, double g)
{
  EffectiveParams e;
  e.delta = delta;
  e.omega_m = wm;
  e.gamma = 1e-4;
  e.g0 = g0;
  e.g = g;
  e.kappa_prime = 0.25;
  e.n_th = 1;
  return e;
}

std::vector<Complex> G12(const std::vector<double> &w, const EffectiveParams &e, bool nonlinear)
{
  const GreenInputs in = PrepareGreenInputs(e, nonlinear, MomentConvention::SymmetricPlusHalf);
  return Sweep(w, {2}, in).Column(1, 2);
}

double MaxOf(const std::vector<double> &v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("density of states: Lorentzian")
{
  const EffectiveParams e = Params(50.0, 50.0, 0.0, 0.0);
  const std::vector<double> w = FrequencyGrid{40.0, 60.0, 0.01}.Points();
  const std::vector<double> rho = DensityOfStates(G12(w, e, false));
  for (std::size_t i = 0; i < w.size(); i += 97)
  {
    const double lor = (0.5 / M_PI) / ((w[i] - 50.0) * (w[i] - 50.0) + 0.25);
    CHECK(rho[i] == doctest::Approx(lor).epsilon(1e-12));
  }
  CHECK(MaxOf(rho) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("reflection: closed-form values")
{
  const EffectiveParams e = Params(50.0, 50.0, 0.0, 0.0);
  const std::vector<Complex> g = G12({50.0}, e, false);
  CHECK(std::abs(g[0] + 2i) < 1e-12);
  CHECK(ReflectionExact(g, 0.25)[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ReflectionExact(g, 0.0)[0] == 1.0);
  CHECK(ReflectionApprox({0.0}, 0.3)[0] == 1.0);
  CHECK(ReflectionApprox({2.0 / M_PI}, 0.01)[0] == doctest::Approx(0.96).epsilon(1e-14));
  CHECK_THROWS_AS(ReflectionExact(g, -0.1), InvalidParameter);
}

TEST_CASE("reflection: approximation error scales as kappa'^2")
{
  const EffectiveParams e = Params(50.0, 50.0, 1.0, 5.0);
  const std::vector<double> w = FrequencyGrid{20.0, 80.0, 0.01}.Points();
  const std::vector<Complex> g = G12(w, e, true);
  const std::vector<double> rho = DensityOfStates(g);
  std::vector<double> dev;
  for (double kp : {0.05, 0.01, 0.002})
  {
    const std::vector<double> re = ReflectionExact(g, kp);
    const std::vector<double> ra = ReflectionApprox(rho, kp);
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); i++)
      m = std::max(m, std::abs(re[i] - ra[i]));
    dev.push_back(m);
  }
  CHECK(dev[0] / dev[1] == doctest::Approx(25.0).epsilon(1e-6));
  CHECK(dev[1] / dev[2] == doctest::Approx(25.0).epsilon(1e-6));

  // second-order bound at the density maxima, where Re G vanishes
  const std::vector<double> re = ReflectionExact(g, 0.01);
  const std::vector<double> ra = ReflectionApprox(rho, 0.01);
  int peaks = 0;
  for (std::size_t i = 1; i + 1 < w.size(); i++)
  {
    if (rho[i] > rho[i - 1] && rho[i] >= rho[i + 1])
    {
      peaks++;
      const double x = 2.0 * M_PI * 0.01 * rho[i];
      CHECK(std::abs(re[i] - ra[i]) < 1.1 * x * x);
    }
  }
  CHECK(peaks == 2);
}

TEST_CASE("fig2: anti-resonance transparency")
{
  const EffectiveParams e = Params(10.0, 10.0, 0.2, 0.2);
  const std::vector<double> w = FrequencyGrid{5.0, 15.0, 0.01}.Points();
  const std::vector<Complex> g = G12(w, e, true);
  const std::vector<double> rho = DensityOfStates(g);
  const std::vector<double> r = ReflectionExact(g, e.kappa_prime);
  const std::size_t mid = 500;
  REQUIRE(w[mid] == doctest::Approx(10.0));
  CHECK(rho[mid] < 0.02 * MaxOf(rho));
  CHECK(r[mid] > 0.9);
  CHECK(r[mid] >= r[mid - 1]);
  CHECK(r[mid] >= r[mid + 1]);
}

TEST_CASE("sidebands")
{
  const Complex zeta{0.3, -0.2};
  const ProbeDrive probe{zeta, 30.0};
  const Complex g_w{0.1, -0.4};
  const Complex g_mw{-0.02, 0.01};

  SidebandAmplitudes a = ComputeSidebands(g_w, g_mw, probe, 0.0, 2.0, 5.0);
  CHECK(a.a_as == 1i * std::conj(zeta));
  CHECK(a.a_s == 0.0);
  CHECK(a.a_c == Complex(0.0, 2.0));

  a = ComputeSidebands(g_w, g_mw, ProbeDrive{0.0, 30.0}, 0.25, 2.0, 5.0);
  CHECK(a.a_as == 0.0);
  CHECK(a.a_s == 0.0);
  CHECK(a.a_c == Complex(1.25, 2.0));

  // |A_aS|^2 = |zeta|^2 R pointwise
  const EffectiveParams e = Params(50.0, 50.0, 1.0, 5.0);
  const std::vector<double> w = FrequencyGrid{20.0, 80.0, 0.1}.Points();
  const GreenInputs in = PrepareGreenInputs(e, true, MomentConvention::SymmetricPlusHalf);
  const SpectrumResult s = ComputeSpectrum(w, in, e.kappa_prime, true, {zeta, 0.0}, 0.0, 5.0);
  REQUIRE(s.sidebands.size() == w.size());
  for (std::size_t i = 0; i < w.size(); i++)
  {
    CHECK(std::abs(std::norm(s.sidebands[i].a_as) / std::norm(zeta) - s.r_exact[i]) < 1e-12);
  }
  // anti-Stokes dominates in the red-detuned regime away from the poles
  const std::size_t i30 = 100;
  REQUIRE(w[i30] == doctest::Approx(30.0));
  CHECK(std::abs(s.sidebands[i30].a_as) > 10.0 * std::abs(s.sidebands[i30].a_s));
  // Stokes amplitude uses G^{aa} at -omega
  const Complex g_aa = SolveBlock(-30.0, 1, in).g_col(0);
  CHECK(s.sidebands[i30].a_s == e.kappa_prime * zeta * g_aa);
}

TEST_CASE("output field")
{
  const SidebandAmplitudes a{{1.0, 2.0}, {0.3, -0.1}, {0.01, 0.02}};
  CHECK(OutputField(0.0, a, 7.0) == a.a_c + a.a_as + a.a_s);
  const SidebandAmplitudes dark{{1.0, 2.0}, 0.0, 0.0};
  CHECK(OutputField(0.37, dark, 7.0) == dark.a_c);
  const double period = 2.0 * M_PI / 7.0;
  for (double t : {0.0, 0.1, 1.3})
  {
    CHECK(std::abs(OutputField(t + period, a, 7.0) - OutputField(t, a, 7.0)) < 1e-14);
  }
  const ProbeDrive p{{0.2, 0.1}, 7.0};
  CHECK(std::abs(CavityField(0.0, 3.0, 0.5i, 0.1, p) -
                 (3.0 + std::conj(p.zeta) * 0.5i + p.zeta * 0.1)) < 1e-15);
}

TEST_CASE("sum rule: Lorentzian")
{
  const EffectiveParams e = Params(50.0, 50.0, 0.0, 0.0);
  const std::vector<double> w = FrequencyGrid{-150.0, 250.0, 0.02}.Points();
  const std::vector<double> rho = DensityOfStates(G12(w, e, false));
  const SumRule s = DosSumRule(w, rho);
  CHECK(std::abs(s.total - 1.0) < 1e-3);
  CHECK(s.tail > 1e-3);  // the bare trapezoid misses 2/(400 pi)
  CHECK(std::abs(s.integral + 2.0 / (400.0 * M_PI) - 1.0) < 1e-4);

  const std::vector<double> narrow = FrequencyGrid{40.0, 60.0, 0.02}.Points();
  CHECK_THROWS_AS(DosSumRule(narrow, DensityOfStates(G12(narrow, e, false))), GridTooNarrow);
}

TEST_CASE("sum rule: fig1a on padded grid, nonlinear on and off")
{
  const EffectiveParams e = Params(50.0, 50.0, 1.0, 5.0);
  double totals[2];
  for (bool nonlinear : {false, true})
  {
    const GreenInputs in = PrepareGreenInputs(e, nonlinear, MomentConvention::SymmetricPlusHalf);
    auto rho_at = [&](double w) { return -SolveBlock(w, 2, in).g_col(0).imag() / M_PI; };
    const std::vector<double> w = PaddedGrid({0.0, 120.0, 0.01}, 0.05, 500.0, 1e-6, rho_at);
    CHECK(w.front() < 0.0);
    CHECK(std::is_sorted(w.begin(), w.end()));
    const std::vector<double> rho = DensityOfStates(Sweep(w, {2}, in).Column(1, 2));
    const SumRule s = DosSumRule(w, rho);
    CHECK(std::abs(s.total - 1.0) < 0.01);
    totals[nonlinear] = s.total;
  }
  CHECK(std::abs(totals[0] - totals[1]) < 1e-3);
}
