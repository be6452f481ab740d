#include "optoresponse/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fmt/format.h>

namespace optoresponse
{

std::string FormatNumber(double x)
{
  if (std::isnan(x))
  {
    return "nan";
  }
  return fmt::format("{:.11e}", x);
}

void WriteSpectrumCsv(std::ostream &out, const SpectrumResult &s, double kappa)
{
  out << "omega_pc_over_kappa,rho_times_kappa,r_exact,r_approx,re_a_as,im_a_as,re_a_s,im_a_s\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.omegas.size(); i++)
  {
    Complex a_as{nan, nan};
    Complex a_s{nan, nan};
    if (!s.sidebands.empty())
    {
      a_as = s.sidebands[i].a_as;
      a_s = s.sidebands[i].a_s;
    }
    out << FormatNumber(s.omegas[i] / kappa) << ',' << FormatNumber(s.rho[i] * kappa) << ','
        << FormatNumber(s.r_exact[i]) << ',' << FormatNumber(s.r_approx[i]) << ','
        << FormatNumber(a_as.real()) << ',' << FormatNumber(a_as.imag()) << ','
        << FormatNumber(a_s.real()) << ',' << FormatNumber(a_s.imag()) << '\n';
  }
}

void WriteGreenCsv(std::ostream &out, const GreenTable &table, bool verbose)
{
  out << "omega_pc";
  for (int j : table.j_set)
  {
    for (int m = 1; m <= 4; m++)
    {
      out << fmt::format(",re_g{0}{1},im_g{0}{1}", m, j);
    }
    if (verbose)
    {
      for (int m = 1; m <= 4; m++)
      {
        for (int n = 1; n <= 4; n++)
        {
          out << fmt::format(",re_p{0}{1}{2},im_p{0}{1}{2}", m, n, j);
        }
      }
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < table.omegas.size(); i++)
  {
    out << FormatNumber(table.omegas[i]);
    for (std::size_t k = 0; k < table.j_set.size(); k++)
    {
      const GreenBlock &blk = table.blocks[k][i];
      for (int m = 0; m < 4; m++)
      {
        out << ',' << FormatNumber(blk.g_col(m).real()) << ','
            << FormatNumber(blk.g_col(m).imag());
      }
      if (verbose)
      {
        for (int q = 0; q < 16; q++)
        {
          out << ',' << FormatNumber(blk.p_col(q).real()) << ','
              << FormatNumber(blk.p_col(q).imag());
        }
      }
    }
    out << '\n';
  }
}

namespace
{

struct Panel
{
  double x0, y0, w, h;  // pixel box
  double xmin, xmax, ymin, ymax;

  double X(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double Y(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

// 1, 2 or 5 times a power of ten, about n ticks.
double NiceStep(double span, int n)
{
  const double raw = span / n;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
  {
    if (m * p >= raw)
    {
      return m * p;
    }
  }
  return 10.0 * p;
}

void DrawAxes(std::ostream &out, const Panel &p, const std::string &ylabel, bool xlabels)
{
  out << fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      p.x0, p.y0, p.w, p.h);
  const double xs = NiceStep(p.xmax - p.xmin, 6);
  for (double x = std::ceil(p.xmin / xs) * xs; x <= p.xmax + 1e-9 * xs; x += xs)
  {
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                       "stroke=\"black\"/>\n",
                       p.X(x), p.y0 + p.h, p.y0 + p.h - 5);
    if (xlabels)
    {
      out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                         p.X(x), p.y0 + p.h + 18, x);
    }
  }
  const double ys = NiceStep(p.ymax - p.ymin, 4);
  for (double y = std::ceil(p.ymin / ys) * ys; y <= p.ymax + 1e-9 * ys; y += ys)
  {
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
                       "stroke=\"black\"/>\n",
                       p.x0, p.Y(y), p.x0 + 5);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n",
                       p.x0 - 6, p.Y(y) + 4, y);
  }
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
                     p.x0 - 50, p.y0 + p.h / 2, p.x0 - 50, p.y0 + p.h / 2, ylabel);
}

void DrawCurve(std::ostream &out, const Panel &p, const PlotCurve &c,
               const std::vector<double> &y)
{
  out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"",
                     c.color, c.dashed ? " stroke-dasharray=\"6,4\"" : "");
  for (std::size_t i = 0; i < c.x.size(); i++)
  {
    out << fmt::format("{:.2f},{:.2f} ", p.X(c.x[i]), p.Y(std::clamp(y[i], p.ymin, p.ymax)));
  }
  out << "\"/>\n";
}

}  // namespace

void WriteSpectrumSvg(std::ostream &out, const std::vector<PlotCurve> &curves,
                      const std::string &title)
{
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double rho_max = 0.0;
  double r_min = 1.0;
  double r_max = 1.0;
  for (const auto &c : curves)
  {
    if (c.x.empty())
      continue;
    xmin = std::min(xmin, c.x.front());
    xmax = std::max(xmax, c.x.back());
    for (double v : c.rho)
      rho_max = std::max(rho_max, v);
    for (double v : c.r)
    {
      r_min = std::min(r_min, v);
      r_max = std::max(r_max, v);
    }
  }
  if (!(xmax > xmin))
  {
    xmin = 0.0;
    xmax = 1.0;
  }
  const double width = 640;
  const double height = 620;
  Panel top{80, 40, 520, 240, xmin, xmax, 0.0, rho_max > 0.0 ? 1.05 * rho_max : 1.0};
  const double pad = 0.05 * std::max(r_max - r_min, 1e-3);
  Panel bottom{80, 320, 520, 240, xmin, xmax, r_min - pad, r_max + pad};

  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
                     "font-family=\"serif\" font-size=\"13\">\n",
                     width, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{}</text>\n", width / 2,
                     title);
  DrawAxes(out, top, "&#954;&#961;", false);
  DrawAxes(out, bottom, "R", true);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">&#969;<tspan "
                     "font-size=\"10\" dy=\"3\">pc</tspan><tspan dy=\"-3\">/&#954;</tspan></text>\n",
                     bottom.x0 + bottom.w / 2, bottom.y0 + bottom.h + 40);
  double legend_y = top.y0 + 18;
  for (const auto &c : curves)
  {
    DrawCurve(out, top, c, c.rho);
    DrawCurve(out, bottom, c, c.r);
    out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
                       "stroke-width=\"1.5\"{4}/>\n",
                       top.x0 + top.w - 150, legend_y, top.x0 + top.w - 120, c.color,
                       c.dashed ? " stroke-dasharray=\"6,4\"" : "");
    out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", top.x0 + top.w - 114,
                       legend_y + 4, c.label);
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace optoresponse
