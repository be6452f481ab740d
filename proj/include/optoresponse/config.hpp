#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>
#include "optoresponse/green.hpp"
#include "optoresponse/model.hpp"
#include "optoresponse/oracle.hpp"
#include "optoresponse/steady_state.hpp"

namespace optoresponse
{

enum class InputMode
{
  Effective,  // (delta, g) given directly, as in the presets
  Physical,   // (delta_c, eta_mag) given; mean fields are solved for
};

struct OracleBlock
{
  FockConfig fock;
  // Cutoff pairs for the convergence scan; empty means fock.n_a/n_b as given.
  std::vector<std::pair<int, int>> scan;
  WindowSettings window;
  double max_peak_bias = 0.01;
};

struct RunConfig
{
  InputMode mode = InputMode::Effective;
  std::string preset;
  EffectiveParams effective;
  PhysicalParams physical;
  FrequencyGrid grid{0.0, 100.0, 0.01};
  std::vector<int> j_set{1, 2};  // j = 1 feeds the Stokes sideband
  bool nonlinear = true;
  MomentConvention convention = MomentConvention::SymmetricPlusHalf;
  std::string output;        // spectrum CSV (or comparison CSV)
  std::string plot;          // SVG
  std::string green_output;  // GreenTable CSV
  std::string report;        // comparison JSON
  bool verbose = false;
  int refine_levels = 0;     // adaptive refinement around omega_plus/minus
  double refine_half_width = 3.0;
  int refine_factor = 10;
  Complex zeta{1.0, 0.0};    // probe amplitude used for the sideband columns
  std::optional<OracleBlock> oracle;
  // Keys only meaningful in physical mode that were explicitly set.
  std::vector<std::string> physical_keys;

  void Validate() const;
};

std::vector<std::string> PresetNames();

// Named parameter sets; throws InvalidParameter for an unknown name.
RunConfig PresetConfig(std::string_view name);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat "key = value" lines, '#' starts a comment. Throws InvalidParameter on
// malformed lines.
KeyValues ParseKeyValues(std::string_view text);

// Applies pairs in order on top of the preset named by a "preset" pair (which
// is applied first wherever it appears), then validates.
RunConfig BuildConfig(const KeyValues &pairs);

RunConfig LoadConfigFile(const std::string &path);

// Effective parameters actually used by the pipeline; solves the mean fields
// in physical mode.
EffectiveParams ResolveEffective(const RunConfig &config);

// "key = value" lines of every physical parameter, shortest round-trip form.
std::string EchoParameters(const RunConfig &config);

// Grid plus refinement windows around the linear normal frequencies.
std::vector<double> SweepGrid(const RunConfig &config, const EffectiveParams &e);

}  // namespace optoresponse
