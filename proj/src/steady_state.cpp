#include "optoresponse/steady_state.hpp"

#include <string>
#include <fmt/format.h>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

MomentConvention ParseMomentConvention(std::string_view name)
{
  if (name == "symmetric-plus-half")
  {
    return MomentConvention::SymmetricPlusHalf;
  }
  if (name == "paper-literal")
  {
    return MomentConvention::PaperLiteral;
  }
  throw InvalidParameter(fmt::format("unknown moment convention '{}'", name));
}

std::string_view ToString(MomentConvention convention)
{
  return convention == MomentConvention::SymmetricPlusHalf ? "symmetric-plus-half"
                                                           : "paper-literal";
}

CovarianceMatrix SolveLyapunov(const Mat4 &chi, const Mat4 &d_mat)
{
  const StabilityReport stab = StabilityCheck(chi);
  if (!stab.stable)
  {
    throw Unstable("Lyapunov equation requires a stable drift matrix; " +
                   FormatEigenvalues(stab));
  }

  // Column-major vec: vec(chi V) = (I (x) chi) vec V, vec(V chi^T) = (chi (x) I) vec V.
  using Mat16 = Eigen::Matrix<Complex, 16, 16>;
  using Vec16 = Eigen::Matrix<Complex, 16, 1>;
  Mat16 a = Mat16::Zero();
  for (int col = 0; col < 4; col++)
  {
    for (int row = 0; row < 4; row++)
    {
      const int r = row + 4 * col;
      for (int k = 0; k < 4; k++)
      {
        a(r, k + 4 * col) += chi(row, k);
        a(r, row + 4 * k) += chi(col, k);
      }
    }
  }
  Vec16 rhs;
  for (int col = 0; col < 4; col++)
  {
    for (int row = 0; row < 4; row++)
    {
      rhs(row + 4 * col) = -d_mat(row, col);
    }
  }

  Eigen::FullPivLU<Mat16> lu(a);
  if (!lu.isInvertible())
  {
    throw Singular("vectorized Lyapunov system is singular");
  }
  const Vec16 x = lu.solve(rhs);
  CovarianceMatrix cov;
  for (int col = 0; col < 4; col++)
  {
    for (int row = 0; row < 4; row++)
    {
      cov.v(row, col) = x(row + 4 * col);
    }
  }
  // Exact solution is symmetric; remove round-off asymmetry.
  cov.v = 0.5 * (cov.v + cov.v.transpose()).eval();
  return cov;
}

OrderedMoments ComputeOrderedMoments(const CovarianceMatrix &cov, const Mat4 &j_mat,
                                     MomentConvention convention)
{
  const double weight = convention == MomentConvention::SymmetricPlusHalf ? 0.5 : 1.0;
  return {cov.v + weight * j_mat};
}

double LyapunovResidual(const Mat4 &chi, const Mat4 &d_mat, const Mat4 &v)
{
  return (chi * v + v * chi.transpose() + d_mat).cwiseAbs().maxCoeff();
}

}  // namespace optoresponse
