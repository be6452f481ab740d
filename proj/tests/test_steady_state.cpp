#include <doctest.h>

#include <random>
#include "optoresponse/errors.hpp"
#include "optoresponse/model.hpp"
#include "optoresponse/steady_state.hpp"

using namespace optoresponse;

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

EffectiveParams RandomStable(std::mt19937 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;)
  {
    EffectiveParams e;
    e.kappa = 0.5 + u(rng);
    e.delta = 1.0 + 20.0 * u(rng);
    e.omega_m = 1.0 + 20.0 * u(rng);
    e.gamma = 0.05 + 0.3 * u(rng);
    e.g = 0.45 * std::sqrt(e.delta * e.omega_m) * u(rng);
    e.n_th = 3.0 * u(rng);
    e.n_ph = 0.3 * u(rng);
    if (StabilityCheck(DriftMatrix(e)).stable)
    {
      return e;
    }
  }
}

// dV/dt = chi V + V chi^T + D integrated to a fixed point with RK4.
Mat4 IntegrateCovariance(const Mat4 &chi, const Mat4 &d)
{
  auto rhs = [&](const Mat4 &v) -> Mat4 { return chi * v + v * chi.transpose() + d; };
  Mat4 v = Mat4::Zero();
  const double h = 0.01;
  for (int step = 0; step < 10000000; step++)
  {
    const Mat4 k1 = rhs(v);
    if (k1.cwiseAbs().maxCoeff() < 1e-11)
    {
      break;
    }
    const Mat4 k2 = rhs(v + 0.5 * h * k1);
    const Mat4 k3 = rhs(v + 0.5 * h * k2);
    const Mat4 k4 = rhs(v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

}  // namespace

TEST_CASE("Lyapunov: decoupled thermal state")
{
  EffectiveParams e = Fig1a();
  e.g = 0.0;
  const SystemMatrices s = BuildSystem(e);
  const CovarianceMatrix c = SolveLyapunov(s.chi, s.d_mat);
  Mat4 expected = Mat4::Zero();
  expected(0, 1) = expected(1, 0) = 0.5;
  expected(2, 3) = expected(3, 2) = 1.5;
  CHECK((c.v - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Lyapunov: zero diffusion gives zero covariance")
{
  const Mat4 chi = DriftMatrix(Fig1a());
  const CovarianceMatrix c = SolveLyapunov(chi, Mat4::Zero());
  CHECK(c.v.norm() == 0.0);
}

TEST_CASE("Lyapunov: fig1a residual and occupation bounds")
{
  const SystemMatrices s = BuildSystem(Fig1a());
  const CovarianceMatrix c = SolveLyapunov(s.chi, s.d_mat);
  CHECK(LyapunovResidual(s.chi, s.d_mat, c.v) < 1e-10);
  CHECK((c.v - c.v.transpose()).norm() == 0.0);
  CHECK(c.v(0, 1).real() >= 0.5);
  CHECK(c.v(2, 3).real() >= 0.5);
}

TEST_CASE("Lyapunov: unstable and marginal inputs")
{
  EffectiveParams e = Fig1a();
  e.delta = -50.0;
  const SystemMatrices s = BuildSystem(e);
  CHECK_THROWS_AS(SolveLyapunov(s.chi, s.d_mat), Unstable);

  // gamma = 0 without coupling leaves the mechanics undamped
  e = Fig1a();
  e.gamma = 0.0;
  e.g = 0.0;
  const SystemMatrices m = BuildSystem(e);
  CHECK_THROWS_AS(SolveLyapunov(m.chi, m.d_mat), Unstable);
}

TEST_CASE("Lyapunov: random draws against time integration")
{
  std::mt19937 rng(3);
  for (int k = 0; k < 6; k++)
  {
    const EffectiveParams e = RandomStable(rng);
    const SystemMatrices s = BuildSystem(e);
    const CovarianceMatrix c = SolveLyapunov(s.chi, s.d_mat);
    CHECK(LyapunovResidual(s.chi, s.d_mat, c.v) < 1e-10);
    const Mat4 v_t = IntegrateCovariance(s.chi, s.d_mat);
    CHECK((c.v - v_t).cwiseAbs().maxCoeff() < 1e-6);

    const OrderedMoments m =
        ComputeOrderedMoments(c, s.j_mat, MomentConvention::SymmetricPlusHalf);
    CHECK(m.m(1, 0).real() >= -1e-12);  // <da+ da>
    CHECK(m.m(3, 2).real() >= -1e-12);  // <db+ db>
    CHECK(std::abs(m.m(1, 0).imag()) < 1e-10);
  }
}

TEST_CASE("ordered moments: thermal values and conventions")
{
  EffectiveParams e = Fig1a();
  e.g = 0.0;
  const SystemMatrices s = BuildSystem(e);
  const CovarianceMatrix c = SolveLyapunov(s.chi, s.d_mat);
  const OrderedMoments sym = ComputeOrderedMoments(c, s.j_mat, MomentConvention::SymmetricPlusHalf);
  CHECK(sym.m(0, 1).real() == doctest::Approx(1.0));
  CHECK(std::abs(sym.m(1, 0)) < 1e-12);
  CHECK(sym.m(2, 3).real() == doctest::Approx(2.0));
  CHECK(sym.m(3, 2).real() == doctest::Approx(1.0));
  const OrderedMoments lit = ComputeOrderedMoments(c, s.j_mat, MomentConvention::PaperLiteral);
  CHECK(lit.m(0, 1).real() == doctest::Approx(1.5));
  CHECK(lit.m(1, 0).real() == doctest::Approx(-0.5));

  const SystemMatrices f = BuildSystem(Fig1a());
  const OrderedMoments any = ComputeOrderedMoments(SolveLyapunov(f.chi, f.d_mat), f.j_mat,
                                                   MomentConvention::SymmetricPlusHalf);
  CHECK((any.m - any.m.transpose() - f.j_mat).cwiseAbs().maxCoeff() < 1e-13);
  const OrderedMoments any_lit = ComputeOrderedMoments(SolveLyapunov(f.chi, f.d_mat), f.j_mat,
                                                       MomentConvention::PaperLiteral);
  CHECK((any_lit.m - any_lit.m.transpose() - 2.0 * f.j_mat).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("moment convention names")
{
  CHECK(ParseMomentConvention("symmetric-plus-half") == MomentConvention::SymmetricPlusHalf);
  CHECK(ParseMomentConvention("paper-literal") == MomentConvention::PaperLiteral);
  CHECK(ToString(MomentConvention::PaperLiteral) == "paper-literal");
  CHECK_THROWS_AS(ParseMomentConvention("v+j"), InvalidParameter);
}
