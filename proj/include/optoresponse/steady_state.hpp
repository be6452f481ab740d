#pragma once

#include <string_view>
#include "optoresponse/model.hpp"

namespace optoresponse
{

// V^{ij} = <u^i u^j + u^j u^i>/2 in the steady state.
struct CovarianceMatrix
{
  Mat4 v;
};

// M^{ij} = <u^i u^j> in the steady state.
struct OrderedMoments
{
  Mat4 m;
};

enum class MomentConvention
{
  SymmetricPlusHalf,  // M = V + J/2, the operator identity
  PaperLiteral,       // M = V + J
};

MomentConvention ParseMomentConvention(std::string_view name);
std::string_view ToString(MomentConvention convention);

// Solves chi V + V chi^T = -D through the 16-dimensional vectorized system.
CovarianceMatrix SolveLyapunov(const Mat4 &chi, const Mat4 &d_mat);

OrderedMoments ComputeOrderedMoments(const CovarianceMatrix &cov, const Mat4 &j_mat,
                                     MomentConvention convention);

// max_ij |(chi V + V chi^T + D)_ij|
double LyapunovResidual(const Mat4 &chi, const Mat4 &d_mat, const Mat4 &v);

}  // namespace optoresponse
