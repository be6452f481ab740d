#pragma once

#include <exception>
#include <map>
#include <ostream>
#include <string>
#include <vector>
#include "optoresponse/config.hpp"
#include "optoresponse/response.hpp"

namespace optoresponse
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitUnstable = 2,
  kExitSolverFailure = 3,
  kExitNoRoot = 4,
  kExitCutoffTooSmall = 5,
  kExitNoStableRoot = 6,
};

// Maps a library exception onto the process exit code.
int ExitCodeFor(const std::exception &e);

// Spectrum for the resolved parameters on SweepGrid(config). Sidebands are
// filled when j_set contains 1.
SpectrumResult RunSpectrum(const RunConfig &config, const EffectiveParams &e);

struct CompareResult
{
  std::vector<double> omegas;
  std::vector<double> rho_glrt;    // configured moment convention
  std::vector<double> rho_oracle;
  double relative_l2 = 0.0;
  std::map<std::string, double> l2_by_convention;
  std::string best_convention;
  ScanReport scan;
  FockConfig cutoffs;   // used for rho_oracle
  double tau_max = 0.0;
  double peak_bias = 0.0;
  double top_population = 0.0;
};

// ||a - b||_2 / ||b||_2
double RelativeL2(const std::vector<double> &a, const std::vector<double> &b);

// Runs GLRT (both conventions) and the master equation on config.grid.
// The oracle uses the scan recommendation when a scan list is configured.
CompareResult RunCompare(const RunConfig &config);

int CmdSpectrum(const RunConfig &config, std::ostream &out, std::ostream &err);
int CmdGreen(const RunConfig &config, std::ostream &out, std::ostream &err);
int CmdResonance(double delta, double omega_m, double kappa, double gamma, std::ostream &out,
                 std::ostream &err);
int CmdCompare(const RunConfig &config, std::ostream &out, std::ostream &err);
int CmdMeanfield(const RunConfig &config, std::ostream &out, std::ostream &err);

// Full command line, argv[0] included.
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace optoresponse
