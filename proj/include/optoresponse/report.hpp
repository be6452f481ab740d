#pragma once

#include <ostream>
#include <string>
#include <vector>
#include "optoresponse/green.hpp"
#include "optoresponse/response.hpp"

namespace optoresponse
{

// 12 significant digits, scientific notation.
std::string FormatNumber(double x);

// Columns: omega_pc_over_kappa, rho_times_kappa, r_exact, r_approx,
// re_a_as, im_a_as, re_a_s, im_a_s. Sideband columns are nan when the
// spectrum was computed without them. kappa rescales to kappa units.
void WriteSpectrumCsv(std::ostream &out, const SpectrumResult &s, double kappa = 1.0);

// Columns: omega_pc, re/im of G^{mj} for every m and requested j; with
// verbose also re/im of P^{mnj}.
void WriteGreenCsv(std::ostream &out, const GreenTable &table, bool verbose);

struct PlotCurve
{
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> rho;  // kappa rho
  std::vector<double> r;
};

// Two stacked panels, kappa rho (top) and R (bottom) versus omega_pc/kappa.
void WriteSpectrumSvg(std::ostream &out, const std::vector<PlotCurve> &curves,
                      const std::string &title);

}  // namespace optoresponse
