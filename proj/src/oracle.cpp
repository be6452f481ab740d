#include "optoresponse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/SparseLU>
#include <fmt/format.h>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

using namespace std::complex_literals;

namespace
{

using Triplet = Eigen::Triplet<Complex>;

// Above this many vectorized unknowns the steady state is found by propagation.
constexpr int kDirectSolveLimit = 40000;

SparseC Identity(int n)
{
  SparseC id(n, n);
  id.setIdentity();
  return id;
}

SparseC Lowering(int n)
{
  std::vector<Triplet> t;
  for (int k = 1; k < n; k++)
  {
    t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  }
  SparseC op(n, n);
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

// (A (x) B)(i_A n_B + i_B, j_A n_B + j_B) = A(i_A, j_A) B(i_B, j_B)
SparseC Kron(const SparseC &a, const SparseC &b)
{
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ca = 0; ca < a.outerSize(); ca++)
  {
    for (SparseC::InnerIterator ia(a, ca); ia; ++ia)
    {
      for (int cb = 0; cb < b.outerSize(); cb++)
      {
        for (SparseC::InnerIterator ib(b, cb); ib; ++ib)
        {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
        }
      }
    }
  }
  SparseC out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseC Adjoint(const SparseC &m)
{
  return SparseC(m.adjoint());
}

// vec(C rho C^dag) - vec({C^dag C, rho})/2 with column-major vectorization.
SparseC Dissipator(const SparseC &c, const SparseC &id)
{
  const SparseC cdc = Adjoint(c) * c;
  const SparseC cdc_t = SparseC(cdc.transpose());
  return Kron(SparseC(c.conjugate()), c) - 0.5 * Kron(id, cdc) - 0.5 * Kron(cdc_t, id);
}

VecX Vectorize(const MatX &m)
{
  return Eigen::Map<const VecX>(m.data(), m.size());
}

MatX Unvectorize(const VecX &v, int dim)
{
  return Eigen::Map<const MatX>(v.data(), dim, dim);
}

// Row vector w with w . vec(X) = Tr[op X].
VecX TraceWeights(const SparseC &op, int dim)
{
  VecX w = VecX::Zero(static_cast<Eigen::Index>(dim) * dim);
  for (int col = 0; col < op.outerSize(); col++)
  {
    for (SparseC::InnerIterator it(op, col); it; ++it)
    {
      // Tr[op X] = sum_ij op(j, i) X(i, j)
      w(it.col() + static_cast<Eigen::Index>(dim) * it.row()) += it.value();
    }
  }
  return w;
}

double InfinityNorm(const SparseC &m)
{
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (int col = 0; col < m.outerSize(); col++)
  {
    for (SparseC::InnerIterator it(m, col); it; ++it)
    {
      rows(it.row()) += std::abs(it.value());
    }
  }
  return rows.maxCoeff();
}

SteadyDensity Characterize(MatX rho, const Generator &gen)
{
  SteadyDensity ss;
  ss.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  rho /= tr;
  ss.trace_error = std::abs(rho.trace() - 1.0);
  Eigen::SelfAdjointEigenSolver<MatX> eig(rho, Eigen::EigenvaluesOnly);
  ss.min_eigenvalue = eig.eigenvalues().minCoeff();
  ss.residual = (gen.liouvillian * Vectorize(rho)).cwiseAbs().maxCoeff();
  for (int ib = 0; ib < gen.n_b; ib++)
  {
    ss.top_population_a += rho((gen.n_a - 1) * gen.n_b + ib, (gen.n_a - 1) * gen.n_b + ib).real();
  }
  for (int ia = 0; ia < gen.n_a; ia++)
  {
    ss.top_population_b += rho(ia * gen.n_b + gen.n_b - 1, ia * gen.n_b + gen.n_b - 1).real();
  }
  ss.rho = std::move(rho);
  return ss;
}

void EnforceCutoff(const SteadyDensity &ss, const Generator &gen)
{
  const double limit = 1e-4;
  if (ss.top_population_a > limit || ss.top_population_b > limit)
  {
    throw CutoffTooSmall(fmt::format(
        "top Fock populations {:.3e} (optical, n_a = {}) and {:.3e} (mechanical, n_b = {}) "
        "exceed {:.0e}",
        ss.top_population_a, gen.n_a, ss.top_population_b, gen.n_b, limit));
  }
}

VecX Rk4Step(const SparseC &l, const VecX &x, double h)
{
  const VecX k1 = l * x;
  const VecX k2 = l * (x + 0.5 * h * k1);
  const VecX k3 = l * (x + 0.5 * h * k2);
  const VecX k4 = l * (x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double StableStep(const SparseC &l)
{
  // RK4 is stable on the imaginary axis up to |lambda h| = 2.83.
  return 2.5 / InfinityNorm(l);
}

}  // namespace

void FockConfig::Validate() const
{
  if (n_a < 2 || n_b < 2)
  {
    throw InvalidParameter("Fock cutoffs must be at least 2");
  }
  if (!(dt > 0.0) || tau_max < 0.0)
  {
    throw InvalidParameter("correlation step must be positive and horizon nonnegative");
  }
}

Generator BuildGenerator(const EffectiveParams &e, const FockConfig &f)
{
  e.Validate();
  f.Validate();
  if (e.n_ph != 0.0)
  {
    throw InvalidParameter("master-equation oracle assumes n_ph = 0");
  }
  const StabilityReport stab = StabilityCheck(DriftMatrix(e));
  if (!stab.stable)
  {
    throw Unstable("oracle requires a stable drift matrix; " + FormatEigenvalues(stab));
  }

  Generator gen;
  gen.n_a = f.n_a;
  gen.n_b = f.n_b;
  gen.dim = f.n_a * f.n_b;
  gen.a = Kron(Lowering(f.n_a), Identity(f.n_b));
  gen.b = Kron(Identity(f.n_a), Lowering(f.n_b));
  const SparseC ad = Adjoint(gen.a);
  const SparseC bd = Adjoint(gen.b);
  const SparseC id = Identity(gen.dim);

  const SparseC num_a = ad * gen.a;
  const SparseC xb = gen.b + bd;
  gen.hamiltonian = e.delta * num_a + e.omega_m * SparseC(bd * gen.b) +
                    e.g * SparseC(SparseC(gen.a + ad) * xb) + e.g0 * SparseC(num_a * xb);
  gen.hamiltonian.prune(Complex(0.0));

  const SparseC h_t = SparseC(gen.hamiltonian.transpose());
  SparseC l = Complex(0.0, -1.0) * (Kron(id, gen.hamiltonian) - Kron(h_t, id));
  l += e.kappa * Dissipator(gen.a, id);
  if (e.gamma > 0.0)
  {
    l += e.gamma * (e.n_th + 1.0) * Dissipator(gen.b, id);
    if (e.n_th > 0.0)
    {
      l += e.gamma * e.n_th * Dissipator(bd, id);
    }
  }
  l.prune(Complex(0.0));
  l.makeCompressed();
  gen.liouvillian = std::move(l);

  gen.slowest_rate = std::numeric_limits<double>::infinity();
  for (const Complex &z : stab.eigenvalues)
  {
    gen.slowest_rate = std::min(gen.slowest_rate, -z.real());
  }
  return gen;
}

SteadyDensity SolveSteadyDensity(const Generator &gen, bool enforce_cutoff)
{
  const int n = gen.dim * gen.dim;
  if (n > kDirectSolveLimit)
  {
    SteadyDensity ss = PropagateSteadyDensity(gen);
    if (enforce_cutoff)
    {
      EnforceCutoff(ss, gen);
    }
    return ss;
  }

  // Trace preservation makes the diagonal rows linearly dependent; replace the
  // rho(0,0) row with the normalization Tr rho = 1.
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(gen.liouvillian.nonZeros() + gen.dim));
  for (int col = 0; col < gen.liouvillian.outerSize(); col++)
  {
    for (SparseC::InnerIterator it(gen.liouvillian, col); it; ++it)
    {
      if (it.row() != 0)
      {
        t.emplace_back(it.row(), it.col(), it.value());
      }
    }
  }
  for (int i = 0; i < gen.dim; i++)
  {
    t.emplace_back(0, i + gen.dim * i, 1.0);
  }
  SparseC a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  VecX rhs = VecX::Zero(n);
  rhs(0) = 1.0;

  Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
  {
    throw NonUniqueSteadyState("generator null space is degenerate: " + lu.lastErrorMessage());
  }
  const VecX x = lu.solve(rhs);
  if (!x.allFinite())
  {
    throw NonUniqueSteadyState("generator null space is degenerate");
  }
  SteadyDensity ss = Characterize(Unvectorize(x, gen.dim), gen);
  if (enforce_cutoff)
  {
    EnforceCutoff(ss, gen);
  }
  return ss;
}

SteadyDensity PropagateSteadyDensity(const Generator &gen, double tolerance, double t_limit)
{
  MatX rho = MatX::Zero(gen.dim, gen.dim);
  rho(0, 0) = 1.0;
  VecX x = Vectorize(rho);
  const double h = StableStep(gen.liouvillian);
  double t = 0.0;
  while (t < t_limit)
  {
    for (int k = 0; k < 1000; k++)
    {
      x = Rk4Step(gen.liouvillian, x, h);
    }
    t += 1000 * h;
    if ((gen.liouvillian * x).cwiseAbs().maxCoeff() < tolerance)
    {
      break;
    }
  }
  return Characterize(Unvectorize(x, gen.dim), gen);
}

Mat4 SteadyCovariance(const SteadyDensity &ss, const Generator &gen)
{
  const std::array<SparseC, 4> ops = {gen.a, Adjoint(gen.a), gen.b, Adjoint(gen.b)};
  std::array<Complex, 4> mean;
  for (int i = 0; i < 4; i++)
  {
    mean[i] = (ops[i] * ss.rho).trace();
  }
  Mat4 v;
  for (int i = 0; i < 4; i++)
  {
    for (int j = 0; j < 4; j++)
    {
      const MatX sym = ops[i] * (ops[j] * ss.rho) + ops[j] * (ops[i] * ss.rho);
      v(i, j) = 0.5 * sym.trace() - mean[i] * mean[j];
    }
  }
  return v;
}

CorrelationSeries CommutatorCorrelation(const SteadyDensity &ss, const Generator &gen,
                                        const FockConfig &f)
{
  f.Validate();
  const double horizon = f.tau_max > 0.0 ? f.tau_max : 10.0 / gen.slowest_rate;
  if (!std::isfinite(horizon))
  {
    throw InvalidParameter("correlation horizon is not finite; set tau_max explicitly");
  }
  const SparseC ad = Adjoint(gen.a);
  const MatX x0 = ad * ss.rho - ss.rho * ad;
  VecX x = Vectorize(x0);
  const VecX weights = TraceWeights(gen.a, gen.dim);

  const int substeps = std::max(1, static_cast<int>(std::ceil(f.dt / StableStep(gen.liouvillian))));
  const double h = f.dt / substeps;
  const auto samples = static_cast<long>(std::ceil(horizon / f.dt)) + 1;

  CorrelationSeries c;
  c.dt = f.dt;
  c.values.reserve(samples);
  c.values.push_back(weights.transpose() * x);
  for (long k = 1; k < samples; k++)
  {
    for (int s = 0; s < substeps; s++)
    {
      x = Rk4Step(gen.liouvillian, x, h);
    }
    c.values.push_back(weights.transpose() * x);
  }
  return c;
}

OracleDos DosFromCorrelation(const CorrelationSeries &c, const std::vector<double> &omegas,
                             const WindowSettings &window, double max_peak_bias)
{
  if (c.values.size() < 2)
  {
    throw InvalidParameter("correlation series needs at least two samples");
  }
  const double t_end = c.tau_max();
  const double flat = window.flat_fraction * t_end;
  const double decay = window.decay_fraction * t_end;
  const std::size_t n = c.values.size();
  std::vector<double> win(n);
  for (std::size_t k = 0; k < n; k++)
  {
    const double tau = c.dt * static_cast<double>(k);
    win[k] = tau <= flat ? 1.0 : std::exp(-(tau - flat) / decay);
  }

  // Half-line trapezoid; the tau = 0 sample carries weight 1/2 so that twice
  // the real part equals the full-line sum.
  auto half_line = [&](double w, bool windowed)
  {
    const Complex rot = std::polar(1.0, w * c.dt);
    Complex phase = 1.0;
    Complex acc = 0.0;
    for (std::size_t k = 0; k < n; k++)
    {
      const double weight = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
      acc += weight * (windowed ? win[k] : 1.0) * c.values[k] * phase;
      phase *= rot;
    }
    return acc * c.dt;
  };

  OracleDos out;
  out.rho.resize(omegas.size());
  std::vector<double> raw(omegas.size());
  double max_re = 0.0;
  double max_im = 0.0;
  for (std::size_t i = 0; i < omegas.size(); i++)
  {
    const Complex half = half_line(omegas[i], true);
    out.rho[i] = half.real() / M_PI;
    raw[i] = half_line(omegas[i], false).real() / M_PI;
    // Full line: half + conj-extended half, whose imaginary parts cancel exactly.
    const Complex full = half + std::conj(half);
    max_re = std::max(max_re, std::abs(full.real()));
    max_im = std::max(max_im, std::abs(full.imag()));
  }
  out.imaginary_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  if (!omegas.empty())
  {
    const double peak = *std::max_element(out.rho.begin(), out.rho.end());
    const double raw_peak = *std::max_element(raw.begin(), raw.end());
    out.peak_bias = std::abs(peak - raw_peak) / std::abs(raw_peak);
    if (out.peak_bias > max_peak_bias)
    {
      throw WindowBias(fmt::format("windowing changes the density peak by {:.3e}", out.peak_bias));
    }
  }
  return out;
}

std::vector<double> DosFromResolvent(const SteadyDensity &ss, const Generator &gen,
                                     const std::vector<double> &omegas)
{
  const SparseC ad = Adjoint(gen.a);
  const VecX x0 = Vectorize(MatX(ad * ss.rho - ss.rho * ad));
  const VecX weights = TraceWeights(gen.a, gen.dim);
  const int n = gen.dim * gen.dim;
  const SparseC id = Identity(n);

  std::vector<double> rho(omegas.size());
  Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  for (std::size_t i = 0; i < omegas.size(); i++)
  {
    SparseC shifted = gen.liouvillian + Complex(0.0, omegas[i]) * id;
    shifted.makeCompressed();
    if (!analyzed)
    {
      lu.analyzePattern(shifted);
      analyzed = true;
    }
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success)
    {
      throw SingularAt(omegas[i], "shifted generator is singular");
    }
    const VecX y = lu.solve(-x0);
    rho[i] = Complex(weights.transpose() * y).real() / M_PI;
  }
  return rho;
}

ScanReport ConvergenceScan(const EffectiveParams &e,
                           const std::vector<std::pair<int, int>> &cutoffs,
                           const std::vector<double> &omegas, const FockConfig &base,
                           bool stop_when_converged, const WindowSettings &window)
{
  ScanReport report;
  for (std::size_t k = 0; k < cutoffs.size(); k++)
  {
    FockConfig f = base;
    f.n_a = cutoffs[k].first;
    f.n_b = cutoffs[k].second;
    const Generator gen = BuildGenerator(e, f);
    const SteadyDensity ss = SolveSteadyDensity(gen, false);
    ScanEntry entry;
    entry.n_a = f.n_a;
    entry.n_b = f.n_b;
    entry.top_population = std::max(ss.top_population_a, ss.top_population_b);
    if (!omegas.empty())
    {
      OracleDos dos = DosFromCorrelation(CommutatorCorrelation(ss, gen, f), omegas, window,
                                         std::numeric_limits<double>::infinity());
      entry.peak_bias = dos.peak_bias;
      entry.rho = std::move(dos.rho);
      entry.peak_rho = *std::max_element(entry.rho.begin(), entry.rho.end());
    }
    const bool stable_peak =
        k > 0 && std::abs(entry.peak_rho - report.entries.back().peak_rho) <=
                     0.01 * std::abs(entry.peak_rho);
    report.entries.push_back(std::move(entry));
    if (stable_peak && report.entries.back().top_population < 1e-4)
    {
      report.converged = true;
      report.recommended = f;
      report.recommended_index = static_cast<int>(k);
      if (stop_when_converged)
      {
        break;
      }
    }
  }
  return report;
}

}  // namespace optoresponse
