#include "optoresponse/green.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

using namespace std::complex_literals;

void FrequencyGrid::Validate() const
{
  if (!(step > 0.0) || !(omega_min < omega_max) || !std::isfinite(omega_min) ||
      !std::isfinite(omega_max))
  {
    throw InvalidParameter(fmt::format("invalid frequency grid [{}, {}] step {}", omega_min,
                                       omega_max, step));
  }
}

std::vector<double> FrequencyGrid::Points() const
{
  Validate();
  // Index-based so the grid is reproducible bit for bit.
  const auto count = static_cast<long>(std::floor((omega_max - omega_min) / step + 1e-9)) + 1;
  std::vector<double> pts(count);
  for (long i = 0; i < count; i++)
  {
    pts[i] = omega_min + static_cast<double>(i) * step;
  }
  return pts;
}

const std::vector<GreenBlock> &GreenTable::ForSource(int j) const
{
  for (std::size_t k = 0; k < j_set.size(); k++)
  {
    if (j_set[k] == j)
    {
      return blocks[k];
    }
  }
  throw InvalidParameter(fmt::format("source index j = {} was not swept", j));
}

std::vector<Complex> GreenTable::Column(int m, int j) const
{
  const auto &col = ForSource(j);
  std::vector<Complex> out(col.size());
  std::transform(col.begin(), col.end(), out.begin(),
                 [m](const GreenBlock &b) { return b.g_col(m - 1); });
  return out;
}

GreenInputs PrepareGreenInputs(const EffectiveParams &e, bool nonlinear,
                               MomentConvention convention)
{
  const SystemMatrices sys = BuildSystem(e, nonlinear);
  const CovarianceMatrix cov = SolveLyapunov(sys.chi, sys.d_mat);
  return {sys.chi, sys.gamma_tensors, ComputeOrderedMoments(cov, sys.j_mat, convention).m,
          sys.j_mat};
}

AssembledSystem AssembleSystem(double omega, int j, const GreenInputs &in)
{
  if (j < 1 || j > 4)
  {
    throw InvalidParameter(fmt::format("source index j = {} outside 1..4", j));
  }
  const int src = j - 1;
  const auto &gam = in.gamma_tensors;
  const Mat4 &chi = in.chi;
  const Mat4 &mom = in.moments;
  AssembledSystem s;
  s.a.setZero();
  s.b.setZero();

  // G rows: i w G^i + chi^i_m G^m + Gamma^i_mn P^mn = i J^ij
  for (int i = 0; i < 4; i++)
  {
    s.a(i, i) += 1i * omega;
    for (int m = 0; m < 4; m++)
    {
      s.a(i, m) += chi(i, m);
      for (int n = 0; n < 4; n++)
      {
        s.a(i, PIndex(m, n)) += gam[i](m, n);
      }
    }
    s.b(i) = 1i * in.j_mat(i, src);
  }

  // P rows: i w P^mn + chi^m_l P^ln + chi^n_l P^ml + (Gamma . <uu>) G = 0
  for (int m = 0; m < 4; m++)
  {
    for (int n = 0; n < 4; n++)
    {
      const int r = PIndex(m, n);
      s.a(r, r) += 1i * omega;
      for (int l = 0; l < 4; l++)
      {
        s.a(r, PIndex(l, n)) += chi(m, l);
        s.a(r, PIndex(m, l)) += chi(n, l);
      }
      for (int l = 0; l < 4; l++)
      {
        for (int k = 0; k < 4; k++)
        {
          const Complex gm = gam[m](l, k);
          const Complex gn = gam[n](l, k);
          if (gm != 0.0)
          {
            s.a(r, n) += gm * mom(l, k);
            s.a(r, k) += gm * mom(l, n);
            s.a(r, l) += gm * mom(k, n);
          }
          if (gn != 0.0)
          {
            s.a(r, m) += gn * mom(l, k);
            s.a(r, l) += gn * mom(m, k);
            s.a(r, k) += gn * mom(m, l);
          }
        }
      }
    }
  }
  return s;
}

GreenBlock SolveBlock(double omega, int j, const GreenInputs &in)
{
  const AssembledSystem s = AssembleSystem(omega, j, in);
  Eigen::PartialPivLU<BlockMatrix> lu(s.a);
  const BlockVector x = lu.solve(s.b);
  GreenBlock block;
  block.omega = omega;
  block.j = j;
  block.g_col = x.head<4>();
  block.p_col = x.tail<16>();
  block.relative_residual = (s.a * x - s.b).norm() / s.b.norm();
  if (!x.allFinite() || !(lu.rcond() > 1e-15) || !(block.relative_residual < 1e-10))
  {
    throw SingularAt(omega, fmt::format("Green's-function system singular at omega = {:.12e} "
                                        "(rcond {:.3e}, residual {:.3e})",
                                        omega, lu.rcond(), block.relative_residual));
  }
  return block;
}

Vec4 LinearGreen(double omega, const Mat4 &chi, const Mat4 &j_mat, int j)
{
  if (j < 1 || j > 4)
  {
    throw InvalidParameter(fmt::format("source index j = {} outside 1..4", j));
  }
  const Mat4 a = chi + Mat4::Identity() * Complex(0.0, omega);
  const Vec4 b = 1i * j_mat.col(j - 1);
  Eigen::PartialPivLU<Mat4> lu(a);
  const Vec4 x = lu.solve(b);
  if (!x.allFinite() || !(lu.rcond() > 1e-15))
  {
    throw SingularAt(omega, fmt::format("linear resolvent singular at omega = {:.12e}", omega));
  }
  return x;
}

GreenTable Sweep(const std::vector<double> &omegas, const std::vector<int> &j_set,
                 const GreenInputs &in)
{
  GreenTable table;
  table.omegas = omegas;
  table.j_set = j_set;
  table.blocks.resize(j_set.size());
  const long count = static_cast<long>(omegas.size());
  for (std::size_t jk = 0; jk < j_set.size(); jk++)
  {
    const int j = j_set[jk];
    if (j < 1 || j > 4)
    {
      throw InvalidParameter(fmt::format("source index j = {} outside 1..4", j));
    }
    auto &out = table.blocks[jk];
    out.resize(omegas.size());
    // Per-point failures are collected and rethrown in grid order.
    std::vector<char> bad(omegas.size(), 0);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; i++)
    {
      try
      {
        out[i] = SolveBlock(omegas[i], j, in);
      }
      catch (const SingularAt &)
      {
        bad[i] = 1;
      }
    }
    for (long i = 0; i < count; i++)
    {
      if (bad[i])
      {
        SolveBlock(omegas[i], j, in);  // rethrows with the diagnostic
      }
    }
  }
  return table;
}

std::vector<double> RefineAround(const std::vector<double> &base, double base_step,
                                 const std::vector<double> &centers, double half_width,
                                 int levels, int factor)
{
  std::vector<double> pts = base;
  double step = base_step;
  double width = half_width;
  for (int level = 0; level < levels; level++)
  {
    step /= factor;
    for (double c : centers)
    {
      const auto count = static_cast<long>(std::floor(2.0 * width / step + 1e-9));
      for (long i = 0; i <= count; i++)
      {
        const double w = c - width + static_cast<double>(i) * step;
        if (w >= base.front() && w <= base.back())
        {
          pts.push_back(w);
        }
      }
    }
    width /= factor;
  }
  std::sort(pts.begin(), pts.end());
  const double tol = 1e-3 * base_step / std::pow(static_cast<double>(factor), levels);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [tol](double a, double b) { return std::abs(a - b) <= tol; }),
            pts.end());
  return pts;
}

CausalityReport CausalityCheck(const std::vector<double> &omegas,
                               const std::vector<Complex> &g_aa_dag, const Mat4 &chi_ref,
                               double t_max, double t_step)
{
  if (omegas.size() < 3 || omegas.size() != g_aa_dag.size())
  {
    throw InvalidParameter("causality check needs matching frequency and Green's arrays");
  }
  if (!(t_step > 0.0) || !(t_max > t_step))
  {
    throw InvalidParameter("causality check needs a positive time window");
  }
  if (!StabilityCheck(chi_ref).stable)
  {
    throw Unstable("causality reference drift matrix is not stable");
  }
  const double h = omegas[1] - omegas[0];
  for (std::size_t i = 1; i < omegas.size(); i++)
  {
    if (std::abs(omegas[i] - omegas[i - 1] - h) > 1e-6 * h)
    {
      throw InvalidParameter("causality check requires a uniform frequency grid");
    }
  }
  // The discrete transform is periodic in t with period 2 pi / h.
  const double alias_t = M_PI / h;
  if (t_max >= alias_t)
  {
    throw GridTooCoarse(fmt::format("time window {} exceeds the alias half-period {:.3f}",
                                    t_max, alias_t));
  }

  const Mat4 jm = CommutatorMatrix();
  const std::size_t n = omegas.size();
  std::vector<Complex> rem(n);
  for (std::size_t i = 0; i < n; i++)
  {
    const double w = 0.5 * h * ((i == 0 || i + 1 == n) ? 1.0 : 2.0);
    rem[i] = w * (g_aa_dag[i] - LinearGreen(omegas[i], chi_ref, jm, 2)(0));
  }
  auto transform = [&](double t)
  {
    const Complex rot = std::polar(1.0, -h * t);
    Complex phase = std::polar(1.0, -omegas[0] * t);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      acc += rem[i] * phase;
      phase *= rot;
    }
    return acc / (2.0 * M_PI);
  };
  // G_ref(t) = -i theta(t) (e^{chi t} J)^{12}
  auto reference = [&](double t)
  {
    if (t <= 0.0)
    {
      return Complex(0.0);
    }
    const Mat4 prop = (chi_ref * t).exp();
    return Complex(-1i * (prop * jm)(0, 1));
  };

  CausalityReport report;
  const auto steps = static_cast<long>(std::floor(t_max / t_step + 1e-9));
  for (long k = 1; k <= steps; k++)
  {
    const double t = static_cast<double>(k) * t_step;
    report.max_positive = std::max(report.max_positive, std::abs(transform(t) + reference(t)));
    report.max_negative = std::max(report.max_negative, std::abs(transform(-t)));
  }
  report.g_zero_plus = transform(0.0) - 1i;
  report.ratio = report.max_negative / report.max_positive;

  const double edge = std::abs(transform(alias_t - t_step) + reference(alias_t - t_step));
  if (edge > 1e-3 * report.max_positive)
  {
    throw GridTooCoarse(fmt::format(
        "response has not decayed within the alias period (|G| = {:.3e} at t = {:.3f})", edge,
        alias_t - t_step));
  }
  return report;
}

}  // namespace optoresponse
